#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rmtprod {

// Engine state is a function of (master_seed, stream_index) only, so two
// workers handed the same pair draw identical sequences.
class SeededStream {
public:
    SeededStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
            static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32),
            0x9e3779b9u};
        engine_.seed(seq);
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    double normal(double stddev = 1.0) { return stddev * normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::complex<double> complex_normal(double component_stddev) {
        double re = normal(component_stddev);
        double im = normal(component_stddev);
        return {re, im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace rmtprod
