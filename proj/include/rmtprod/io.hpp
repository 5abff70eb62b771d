#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chain.hpp"

namespace rmtprod {

struct spec_parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::size_t get_nat(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw spec_parse_error(where + ": missing \"" + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw spec_parse_error(where + ": \"" + key + "\" must be a nonnegative integer");
    return v.get<std::size_t>();
}

inline FactorSpec parse_plain_factor(const nlohmann::json& j, const std::string& where, bool allow_induced) {
    if (!j.is_object()) throw spec_parse_error(where + ": factor must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw spec_parse_error(where + ": missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    BathCheck check = BathCheck::strict;
    if (j.contains("bath_check")) {
        const auto c = j.at("bath_check").get<std::string>();
        if (c == "subblock") check = BathCheck::subblock;
        else if (c != "strict") throw spec_parse_error(where + ": bath_check must be strict or subblock");
    }
    if (kind == "ginibre" || kind == "jacobi") {
        const std::size_t out = get_nat(j, "n_out", where), in = get_nat(j, "n_in", where);
        if (kind == "ginibre") {
            if (j.contains("bath_dim")) throw spec_parse_error(where + ": \"bath_dim\" only allowed for jacobi");
            return FactorSpec::ginibre(out, in);
        }
        return FactorSpec::jacobi(out, in, get_nat(j, "bath_dim", where), check);
    }
    if (kind == "induced" && allow_induced) {
        if (!j.contains("base")) throw spec_parse_error(where + ": induced factor needs \"base\"");
        const FactorSpec base = parse_plain_factor(j.at("base"), where + ".base", false);
        FactorSpec f = FactorSpec::induced(base);
        if (j.contains("n_out") && get_nat(j, "n_out", where) != f.n_out)
            throw spec_parse_error(where + ": n_out must equal min(base dims)");
        if (j.contains("n_in") && get_nat(j, "n_in", where) != f.n_in)
            throw spec_parse_error(where + ": n_in must equal min(base dims)");
        return f;
    }
    throw spec_parse_error(where + ": unknown kind \"" + kind + "\"");
}

inline nlohmann::json plain_factor_json(const FactorSpec& f) {
    nlohmann::json j{{"kind", kind_name(f.kind)}, {"n_out", f.n_out}, {"n_in", f.n_in}};
    if (f.kind == FactorKind::jacobi) {
        j["bath_dim"] = f.bath_dim;
        if (f.bath_check == BathCheck::subblock) j["bath_check"] = "subblock";
    }
    return j;
}

} // namespace detail

// {"beta": 1|2|4, "factors": [{"kind": "ginibre"|"jacobi"|"induced", "n_out", "n_in",
//  "bath_dim" (jacobi), "bath_check" (optional), "base" (induced)}]}
inline ChainSpec chain_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw spec_parse_error("spec must be a JSON object");
    if (!j.contains("beta") || !j.at("beta").is_number_integer()) throw spec_parse_error("missing integer \"beta\"");
    ChainSpec spec;
    try {
        spec.dyson = DysonClass(j.at("beta").get<int>());
    } catch (const std::invalid_argument& e) {
        throw spec_parse_error(e.what());
    }
    if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").empty())
        throw spec_parse_error("\"factors\" must be a nonempty array");
    std::size_t k = 0;
    for (const auto& f : j.at("factors"))
        spec.factors.push_back(detail::parse_plain_factor(f, "factors[" + std::to_string(k++) + "]", true));
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw spec_parse_error(e.what());
    }
    return spec;
}

inline ChainSpec parse_chain_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw spec_parse_error(std::string("malformed JSON: ") + e.what());
    }
    try {
        return chain_spec_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw spec_parse_error(e.what());
    }
}

inline ChainSpec load_chain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_parse_error("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_chain_spec(ss.str());
}

inline nlohmann::json to_json(const ChainSpec& spec) {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : spec.factors) {
        if (f.kind == FactorKind::induced) {
            fs.push_back({{"kind", "induced"}, {"n_out", f.n_out}, {"n_in", f.n_in},
                          {"base", detail::plain_factor_json(f.base())}});
        } else {
            fs.push_back(detail::plain_factor_json(f));
        }
    }
    return {{"beta", spec.dyson.beta}, {"factors", fs}};
}

} // namespace rmtprod
