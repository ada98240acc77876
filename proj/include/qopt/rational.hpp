#pragma once

#include "qopt/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <string>

namespace qopt {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Small exact positive-or-zero rational used for model weights.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
        detail::require(d != 0, "rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    [[nodiscard]] double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    [[nodiscard]] BigRational to_big() const { return BigRational(num, den); }

    [[nodiscard]] std::string to_string() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    static Ratio parse(const std::string& num, const std::string& den) {
        try {
            std::size_t a = 0, b = 0;
            const auto n = std::stoll(num, &a);
            const auto d = std::stoll(den, &b);
            detail::require(a == num.size() && b == den.size(), "malformed rational \"" + num + "/" + den + "\"");
            return {n, d};
        } catch (const std::logic_error&) {
            throw ArgumentError("malformed rational \"" + num + "/" + den + "\"");
        }
    }

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    const auto g = std::gcd(a, b);
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a / g, b, &out)) throw DomainError("denominator lcm overflows 64 bits");
    return out;
}

}  // namespace qopt
