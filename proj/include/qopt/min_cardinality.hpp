#pragma once

// Dilation threshold Delta_eps and the cardinalities from which the eps-relaxed upper bound holds.

#include "qopt/ehrhart.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qopt {

struct MinCardinality {
    double epsilon = 0.0;
    std::int64_t delta = 0;
    double J_eps = 0.0;
    std::uint64_t M_eps = 0;
    double Jp_eps = 0.0;
    std::uint64_t Mp_eps = 0;
    /// (1+eps)^{-1/N}
    double rate_factor = 1.0;
    std::int64_t scan_ceiling = 0;
};

namespace detail {

inline BigRational exact_rational(double x) {
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    e -= 53;
    BigRational out = BigRational(mant);
    if (e > 0) out *= BigRational(BigInt(1) << e);
    else if (e < 0) out /= BigRational(BigInt(1) << -e);
    return out;
}

inline std::uint64_t big_to_u64(const BigInt& v) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("cardinality exceeds 64 bits");
    return static_cast<std::uint64_t>(v);
}

inline BigRational pow_int(const BigRational& x, int n) {
    BigRational out = 1;
    for (int i = 0; i < n; ++i) out *= x;
    return out;
}

}  // namespace detail

inline MinCardinality min_cardinality(const BoundModel& model, double eps, const EhrhartQP& qp) {
    if (!model.rational_homogeneous())
        throw DomainError("minimum cardinality needs a homogeneous model with rational weights");
    detail::require(std::isfinite(eps) && eps > 0.0, "epsilon must be positive");
    detail::require(qp.N() == static_cast<int>(model.dimension()), "Ehrhart polynomial dimension does not match the model");
    const int n = qp.N();
    const BigRational vol = qp.leading_exact();
    const BigRational e = detail::exact_rational(eps);

    // Past the first j where eps |P| j^N exceeds sum_i max_r |c_i(r)| j^i the leading term
    // dominates for good. Located by doubling and bisection on eps |P| - sum_i m_i j^{i-N},
    // which increases in j.
    std::vector<double> mass(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BigRational m = 0;
        for (const auto& row : qp.rows()) m = std::max<BigRational>(m, abs(row[static_cast<std::size_t>(i)]));
        mass[static_cast<std::size_t>(i)] = static_cast<double>(m) * (1.0 + 1e-12);
    }
    const double lead = eps * static_cast<double>(vol);
    auto dominated = [&](double j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += mass[static_cast<std::size_t>(i)] * std::pow(j, i - n);
        return lead - s > 1e-9 * lead;
    };
    std::int64_t hi = 1;
    while (!dominated(static_cast<double>(hi))) {
        hi *= 2;
        if (hi > (std::int64_t{1} << 40)) throw ResourceError("Delta scan ceiling is impractically large");
    }
    std::int64_t lo = hi / 2;
    while (hi - lo > 1) {
        const auto mid = lo + (hi - lo) / 2;
        (dominated(static_cast<double>(mid)) ? hi : lo) = mid;
    }
    const std::int64_t j_max = hi;

    std::int64_t delta = 0;
    const BigRational factor = (1 + e) * vol;
    for (std::int64_t j = j_max; j >= 0; --j) {
        if (BigRational(qp.evaluate(j)) > factor * detail::pow_int(BigRational(j), n)) {
            delta = j;
            break;
        }
    }

    MinCardinality out;
    out.epsilon = eps;
    out.delta = delta;
    out.scan_ceiling = j_max;
    const double dn = n;
    out.J_eps = std::max(2.0 / std::expm1(1.0 / dn), static_cast<double>(delta));
    out.Jp_eps = std::max(1.0 / std::expm1(1.0 / dn), static_cast<double>(delta));
    out.M_eps = detail::big_to_u64(qp.evaluate(static_cast<std::int64_t>(std::ceil(out.J_eps))));
    out.Mp_eps = detail::big_to_u64(qp.evaluate(static_cast<std::int64_t>(std::ceil(out.Jp_eps))));
    out.rate_factor = std::pow(1.0 + eps, -1.0 / dn);
    return out;
}

}  // namespace qopt
