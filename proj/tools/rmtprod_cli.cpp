#include <cmath>
#include <cstdint>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include <rmtprod/beta4.hpp>
#include <rmtprod/finite_beta2.hpp>
#include <rmtprod/io.hpp>
#include <rmtprod/macro.hpp>
#include <rmtprod/montecarlo.hpp>
#include <rmtprod/verify.hpp>
#include <rmtprod/weights.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmtprod;

namespace {

constexpr int exit_ok = 0, exit_verify = 1, exit_usage = 2, exit_numerical = 3, exit_scope = 4;
constexpr const char* tool_version = "0.1.0";

json versions() {
    return {{"rmtprod", tool_version},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                          "." + std::to_string(BOOST_VERSION % 100)},
            {"compiler", __VERSION__}};
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

std::optional<ChainSpec> load_or_report(const std::string& path) {
    try {
        return load_chain_spec(path);
    } catch (const spec_parse_error& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return std::nullopt;
    }
}

struct Grid {
    double lo = 0.0, hi = 0.0;
    std::size_t steps = 0;
    double at(std::size_t k) const {
        return steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }
};

// MIN:MAX:STEPS
std::optional<Grid> parse_grid(const std::string& s) {
    const auto a = s.find(':'), b = s.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) return std::nullopt;
    try {
        std::size_t used = 0;
        Grid g;
        g.lo = std::stod(s.substr(0, a), &used);
        if (used != a) return std::nullopt;
        g.hi = std::stod(s.substr(a + 1, b - a - 1), &used);
        if (used != b - a - 1) return std::nullopt;
        const long long n = std::stoll(s.substr(b + 1), &used);
        if (used != s.size() - b - 1 || n < 1 || !(g.hi >= g.lo) || g.lo < 0.0) return std::nullopt;
        g.steps = static_cast<std::size_t>(n);
        return g;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

json dataset_summary(const SpectraDataset& ds) {
    std::size_t zero = 0;
    double sum = 0.0, top = 0.0;
    for (const auto& r : ds.realizations) {
        zero += r.zero_modes;
        for (const cplx& z : r.eigenvalues) {
            sum += std::abs(z);
            top = std::max(top, std::abs(z));
        }
    }
    const std::size_t n = ds.eigenvalue_count();
    return {{"realizations", ds.realizations.size()},
            {"eigenvalues", n},
            {"zero_modes", zero},
            {"mean_modulus", n ? sum / static_cast<double>(n) : 0.0},
            {"max_modulus", top},
            {"scale", ds.scale}};
}

int cmd_sample(const std::string& spec_path, std::uint64_t seed, std::size_t reps, const std::string& out,
               bool macro, std::size_t bins) {
    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create " << out << ": " << ec.message() << '\n';
        return exit_usage;
    }
    json manifest{{"command", "sample"},
                  {"seed", seed},
                  {"versions", versions()},
                  {"config", {{"spec_file", spec_path}, {"realizations", reps}, {"macro_scale", macro}, {"bins", bins}}}};
    const auto spec = load_or_report(spec_path);
    if (!spec) {
        manifest["status"] = "spec_error";
        write_json(dir / "manifest.json", manifest);
        return exit_usage;
    }
    manifest["config"]["spec"] = to_json(*spec);
    try {
        if (!spec->closed()) throw std::invalid_argument("eigenvalues need a closed chain (N_0 = N_M)");
        ExperimentConfig cfg;
        cfg.spec = *spec;
        cfg.n_realizations = reps;
        cfg.master_seed = seed;
        cfg.collect_singular_values = true;
        cfg.scaling = macro ? Scaling::macro : Scaling::raw;
        const SpectraDataset ds = run_experiment(cfg);
        const Histogram h = histogram_radial(ds, bins);
        std::ofstream e(dir / "eigenvalues.csv"), s(dir / "singular_values.csv"), hs(dir / "histogram.csv");
        write_eigenvalues_csv(e, ds);
        write_singular_values_csv(s, ds);
        write_histogram_csv(hs, h);
        manifest["status"] = "ok";
        manifest["summary"] = dataset_summary(ds);
        manifest["outputs"] = {{"eigenvalues", (dir / "eigenvalues.csv").string()},
                               {"singular_values", (dir / "singular_values.csv").string()},
                               {"histogram", (dir / "histogram.csv").string()},
                               {"manifest", (dir / "manifest.json").string()}};
        write_json(dir / "manifest.json", manifest);
        return exit_ok;
    } catch (const std::exception& ex) {
        manifest["status"] = "numerical_failure";
        manifest["error"] = ex.what();
        write_json(dir / "manifest.json", manifest);
        std::cerr << "sample failed: " << ex.what() << '\n';
        return exit_numerical;
    }
}

int cmd_density(const std::string& spec_path, bool finite, const std::string& grid_text, const std::string& out) {
    const auto grid = parse_grid(grid_text);
    if (!grid) {
        std::cerr << "grid must be MIN:MAX:STEPS with 0 <= MIN <= MAX and STEPS >= 1\n";
        return exit_usage;
    }
    const auto spec = load_or_report(spec_path);
    if (!spec) return exit_usage;
    if (finite && spec->dyson.is_real()) {
        std::cerr << "unsupported (out of scope): finite-n density for beta = 1\n";
        return exit_scope;
    }
    json manifest{{"command", "density"},
                  {"versions", versions()},
                  {"config", {{"spec_file", spec_path}, {"spec", to_json(*spec)}, {"mode", finite ? "finite-n" : "macro"},
                              {"grid", grid_text}}}};
    const fs::path manifest_path = fs::path(out + ".manifest.json");
    try {
        const DerivedIndices idx = derive_indices(*spec);
        std::vector<std::array<double, 3>> rows;
        if (finite) {
            const WeightModel w = weight_model(idx);
            for (std::size_t k = 0; k < grid->steps; ++k) {
                const double r = grid->at(k);
                double rho, proj;
                if (spec->dyson.is_quaternion()) {
                    proj = radial_projection_beta4(w, idx.n_min, r);
                    // angular average; density_beta4 vanishes on the real axis
                    rho = r > 0.0 ? proj / (2.0 * std::numbers::pi * r) : 0.0;
                } else {
                    rho = density_finite_beta2(w, idx.n_min, cplx(r, 0.0));
                    proj = radial_density_finite_beta2(w, idx.n_min, r);
                }
                rows.push_back({r, rho, proj});
            }
        } else {
            const MacroModel m = macro_model(idx);
            for (std::size_t k = 0; k < grid->steps; ++k) {
                const double r = grid->at(k);
                rows.push_back({r, macro_density(m, r), macro_radial_density(m, r)});
            }
        }
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        os.precision(17);
        os << "r,rho,rho_radial_projection\n";
        for (const auto& row : rows) os << row[0] << ',' << row[1] << ',' << row[2] << '\n';
        double integral = 0.0;
        for (std::size_t k = 1; k < rows.size(); ++k)
            integral += 0.5 * (rows[k][0] - rows[k - 1][0]) * (rows[k][2] + rows[k - 1][2]);
        manifest["status"] = "ok";
        manifest["summary"] = {{"points", rows.size()}, {"radial_integral_trapezoid", integral}, {"n_min", idx.n_min}};
        manifest["outputs"] = {{"density", out}, {"manifest", manifest_path.string()}};
        write_json(manifest_path, manifest);
        return exit_ok;
    } catch (const std::exception& ex) {
        manifest["status"] = "numerical_failure";
        manifest["error"] = ex.what();
        write_json(manifest_path, manifest);
        std::cerr << "density failed: " << ex.what() << '\n';
        return exit_numerical;
    }
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else {
        for (const auto& n : suite_names())
            if (n == suite) names.push_back(n);
        if (names.empty()) {
            std::cerr << "unknown suite " << suite << "\n";
            return exit_usage;
        }
    }
    json report{{"command", "verify"}, {"seed", seed}, {"versions", versions()}, {"config", {{"suite", suite}}}};
    json suites = json::array();
    bool all = true;
    for (const auto& n : names) {
        json js{{"name", n}};
        try {
            const SuiteResult r = run_suite(n, seed);
            json checks = json::array();
            for (const auto& c : r.checks)
                checks.push_back({{"name", c.name},
                                  {"value", c.value},
                                  {"threshold", c.threshold},
                                  {"relation", c.below ? "<" : ">"},
                                  {"passed", c.passed()}});
            js["checks"] = checks;
            js["passed"] = r.passed();
            all = all && r.passed();
        } catch (const std::exception& ex) {
            js["passed"] = false;
            js["error"] = ex.what();
            all = false;
        }
        std::cout << (js["passed"].get<bool>() ? "PASS " : "FAIL ") << n << '\n';
        suites.push_back(js);
    }
    report["suites"] = suites;
    report["passed"] = all;
    if (!out.empty()) {
        report["outputs"] = {{"report", out}};
        write_json(out, report);
    }
    return all ? exit_ok : exit_verify;
}

int cmd_lyapunov(const std::string& spec_path, const std::string& mode, std::uint64_t seed, std::size_t reps,
                 std::optional<std::size_t> n_min_flag) {
    const auto spec = load_or_report(spec_path);
    if (!spec) return exit_usage;
    const bool mc = mode != "macro", macro = mode != "mc";
    json out{{"mc_mean", nullptr}, {"mc_stderr", nullptr}, {"macro_value", nullptr}, {"discrepancy", nullptr}};
    try {
        const DerivedIndices idx = derive_indices(*spec);
        if (mc) {
            if (!spec->closed()) {
                std::cerr << "Monte Carlo Lyapunov estimate needs a closed chain (N_0 = N_M)\n";
                return exit_numerical;
            }
            ExperimentConfig cfg;
            cfg.spec = *spec;
            cfg.n_realizations = reps;
            cfg.master_seed = seed;
            const LyapunovEstimate e = lyapunov_estimate(run_experiment(cfg).spectra());
            out["mc_mean"] = e.mean;
            out["mc_stderr"] = e.standard_error;
        }
        if (macro) out["macro_value"] = lyapunov_macro(macro_model(idx), n_min_flag.value_or(idx.n_min), idx.m1);
        if (mc && macro) out["discrepancy"] = out["mc_mean"].get<double>() - out["macro_value"].get<double>();
    } catch (const std::exception& ex) {
        std::cerr << "lyapunov failed: " << ex.what() << '\n';
        return exit_numerical;
    }
    std::cout << out.dump(2) << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Products of rectangular random matrices: sampling, analytic densities, verification"};
    app.require_subcommand(1);

    std::string spec_path, out, grid, suite, mode = "both";
    std::uint64_t seed = 0;
    std::size_t reps = 100, bins = 50, n_min = 0;
    bool macro_scale = false, finite = false, macro = false;

    auto* sample = app.add_subcommand("sample", "sample a chain and write spectra");
    sample->add_option("--spec", spec_path, "chain spec JSON")->required();
    sample->add_option("--seed", seed, "master seed")->required();
    sample->add_option("--realizations", reps, "number of realizations")->required()->check(CLI::PositiveNumber);
    sample->add_option("--out", out, "output directory")->required();
    sample->add_flag("--macro-scale", macro_scale, "divide eigenvalues by N_min^(M1/2)");
    sample->add_option("--bins", bins, "radial histogram bins")->check(CLI::PositiveNumber);

    auto* density = app.add_subcommand("density", "evaluate the analytic eigenvalue density on a radial grid");
    density->add_option("--spec", spec_path, "chain spec JSON")->required();
    auto* f_fin = density->add_flag("--finite-n", finite, "finite-N density (beta 2 or 4)");
    density->add_flag("--macro", macro, "large-N density in macroscopic units")->excludes(f_fin);
    density->add_option("--grid", grid, "MIN:MAX:STEPS")->required();
    density->add_option("--out", out, "output CSV")->required();

    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("--suite", suite, "commute|reduction|appendixA|weights|lyapunov|all")->required();
    verify->add_option("--seed", seed, "master seed");
    verify->add_option("--out", out, "JSON report");

    auto* lyap = app.add_subcommand("lyapunov", "mean log modulus of the eigenvalues");
    lyap->add_option("--spec", spec_path, "chain spec JSON")->required();
    lyap->add_option("--mode", mode, "mc|macro|both")->check(CLI::IsMember({"mc", "macro", "both"}));
    lyap->add_option("--seed", seed, "master seed");
    lyap->add_option("--realizations", reps, "number of realizations")->check(CLI::PositiveNumber);
    auto* n_opt = lyap->add_option("--n-min", n_min, "N_min used in the macroscopic value")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*sample) return cmd_sample(spec_path, seed, reps, out, macro_scale, bins);
        if (*density) return cmd_density(spec_path, finite, grid, out);
        if (*verify) return cmd_verify(suite, seed, out);
        if (*lyap)
            return cmd_lyapunov(spec_path, mode, seed, reps,
                                *n_opt ? std::optional<std::size_t>(n_min) : std::nullopt);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_numerical;
    }
    return exit_usage;
}
