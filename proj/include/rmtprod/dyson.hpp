#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rmtprod {

// Dyson index with the block size gamma of the complex representation.
struct DysonClass {
    int beta = 2;

    constexpr DysonClass() = default;
    constexpr explicit DysonClass(int b) : beta(b) {
        if (b != 1 && b != 2 && b != 4)
            throw std::invalid_argument("Dyson index must be 1, 2 or 4");
    }

    constexpr int gamma() const { return beta == 4 ? 2 : 1; }
    constexpr bool is_real() const { return beta == 1; }
    constexpr bool is_quaternion() const { return beta == 4; }

    friend constexpr bool operator==(DysonClass a, DysonClass b) { return a.beta == b.beta; }
};

inline constexpr DysonClass real_class{1};
inline constexpr DysonClass complex_class{2};
inline constexpr DysonClass quaternion_class{4};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (d == 0) throw std::invalid_argument("Rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
};

} // namespace rmtprod
