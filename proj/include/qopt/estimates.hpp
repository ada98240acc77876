#pragma once

// Closed-form truncation estimates: asymptotic upper and lower bounds, sums of j^N e^{-j},
// pre-asymptotic bounds and the Stechkin-type comparison bounds.

#include "qopt/errors.hpp"
#include "qopt/format.hpp"
#include "qopt/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qopt {

namespace detail {

inline void require_positive(double x, const char* name) {
    require(std::isfinite(x) && x > 0.0, std::string(name) + " must be a positive finite number");
}

inline void require_dimension(int N) { require(N >= 1, "N must be at least 1"); }

constexpr double kE = std::numbers::e;

/// e / (e - 1)
constexpr double kGeomFactor = kE / (kE - 1.0);

}  // namespace detail

/// C_u(eps) = (4e + 4 eps e - 2) e/(e-1).
inline double upper_constant(double eps) {
    detail::require(std::isfinite(eps) && eps >= 0.0, "epsilon must be nonnegative");
    return (4.0 * detail::kE + 4.0 * eps * detail::kE - 2.0) * detail::kGeomFactor;
}

inline double upper_asymptotic(double M, int N, double volP, double eps, bool relaxed = false) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require_dimension(N);
    detail::require_positive(volP, "volP");
    detail::require_positive(eps, "epsilon");
    const double rate = std::pow(M / (volP * (1.0 + eps)), 1.0 / N);
    double v = upper_constant(eps) * M * std::exp(-rate);
    if (relaxed) v *= (N + 1) / 2.0;
    return v;
}

/// C_l = 1/2 (2/3)^{1-1/N} N |P|^{1/N} q/(e^q - 1).
inline double lower_constant(int N, double volP, int q) {
    detail::require_dimension(N);
    detail::require_positive(volP, "volP");
    detail::require(q >= 1, "q must be at least 1");
    const double n = N;
    return 0.5 * std::pow(2.0 / 3.0, 1.0 - 1.0 / n) * n * std::pow(volP, 1.0 / n) * q / std::expm1(q);
}

inline double lower_asymptotic(double M, int N, double volP, int q) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    const double n = N;
    return lower_constant(N, volP, q) * std::pow(M, 1.0 - 1.0 / n) * std::exp(-std::pow(M / volP, 1.0 / n));
}

/// Smallest admissible J for the L-form bound on sum_{j>=J} j^N e^{-j}.
inline double sum_jN_threshold(int N, double L) {
    detail::require_dimension(N);
    detail::require(std::isfinite(L) && L > 1.0, "L must exceed 1");
    const double n = N;
    return std::max(1.0 / std::expm1(1.0 / n), L / std::expm1((L - 1.0) / n));
}

inline double sum_jN_bound(double J, int N, double L) {
    const double thr = sum_jN_threshold(N, L);
    if (!(J >= thr))
        throw DomainError("J=" + format_double(J) + " is below the threshold " + format_double(thr) + " for L=" +
                          format_double(L));
    return L * std::exp(N * std::log(J) - J) * detail::kGeomFactor;
}

/// J^N e^{-J} e/(e-1), a lower bound on the sum for the same J range.
inline double sum_jN_lower(double J, int N) {
    detail::require_dimension(N);
    detail::require_positive(J, "J");
    return std::exp(N * std::log(J) - J) * detail::kGeomFactor;
}

/// sum_{j>=J} j^N e^{-j} by direct summation.
inline double sum_jN_exact(long J, int N) {
    detail::require(N >= 0, "N must be nonnegative");
    detail::require(J >= 0, "J must be nonnegative");
    CompensatedSum acc;
    for (long j = J;; ++j) {
        const double term = (j == 0) ? (N == 0 ? 1.0 : 0.0) : std::exp(N * std::log(static_cast<double>(j)) - j);
        acc += term;
        if (j > N && term < 1e-18 * acc.value()) break;
    }
    return acc.value();
}

/// Li_{-N}(z) = sum_{j>=1} j^N z^j.
inline double polylog_neg(int N, double z) {
    detail::require(N >= 0, "N must be nonnegative");
    detail::require(std::isfinite(z) && z > 0.0 && z < 1.0, "z must lie in (0,1)");
    const double lz = std::log(z);
    CompensatedSum acc;
    // terms increase up to j ~ N/(-log z) then decay geometrically
    const double peak = N / -lz;
    for (long j = 1;; ++j) {
        const double term = std::exp(N * std::log(static_cast<double>(j)) + j * lz);
        acc += term;
        if (j > peak && term < 1e-17 * acc.value()) break;
    }
    return acc.value();
}

inline double pre_asymptotic_sum_bound(long J, int N) {
    detail::require_dimension(N);
    detail::require(J >= 1, "J must be at least 1");
    if (J > N + 1)
        throw DomainError("J=" + std::to_string(J) + " exceeds the pre-asymptotic regime J <= N+1 = " +
                          std::to_string(N + 1));
    const double n = N;
    const double jm = static_cast<double>(J - 1);
    const double sub = jm == 0.0 ? 0.0 : std::exp((n + 1.0) * std::log(jm) - jm * (n + 1.0) / (n + 2.0)) / (n + 1.0);
    return polylog_neg(N, 1.0 / detail::kE) - sub;
}

/// e sigma [Li_{-N}(1/e) - (M/sigma)^{(N+1)/N}/(N+1) exp(-(M/sigma)^{1/N}(N+1)/(N+2))].
/// max_M is #(P_N cap Z^N), the end of the regime.
inline double pre_asymptotic_tail_bound(double M, int N, double sigma, double max_M) {
    detail::require_dimension(N);
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require_positive(sigma, "sigma");
    if (M > max_M)
        throw DomainError("M=" + format_double(M) + " exceeds the pre-asymptotic regime M <= #(P_N) = " +
                          format_double(max_M));
    const double n = N;
    const double r = std::pow(M / sigma, 1.0 / n);
    const double sub = std::pow(r, n + 1.0) / (n + 1.0) * std::exp(-r * (n + 1.0) / (n + 2.0));
    return detail::kE * sigma * (polylog_neg(N, 1.0 / detail::kE) - sub);
}

inline double stechkin(double M, std::span<const double> lambda, double p) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require(std::isfinite(p) && p > 0.0 && p < 1.0, "p must lie in (0,1)");
    detail::require(!lambda.empty(), "lambda must be nonempty");
    double log_factor = 0.0;
    for (double l : lambda) {
        detail::require_positive(l, "lambda");
        log_factor -= std::log(-std::expm1(-p * l));
    }
    return std::exp(log_factor / p + (1.0 - 1.0 / p) * std::log(M));
}

inline constexpr double xi_max = (detail::kE - 1.0) / detail::kE;

inline double stechkin_optimized(double M, std::span<const double> lambda, double xi = xi_max) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require(std::isfinite(xi) && xi > 0.0 && xi <= xi_max, "xi must lie in (0, (e-1)/e]");
    detail::require(!lambda.empty(), "lambda must be nonempty");
    const double n = static_cast<double>(lambda.size());
    double log_prod = 0.0;
    for (double l : lambda) {
        detail::require_positive(l, "lambda");
        log_prod += std::log(l);
    }
    const double rate = std::exp((std::log(M) + log_prod) / n) * n * xi / detail::kE;
    return M * std::exp(-rate);
}

inline double iso_stechkin(double M, int N, double lambda, double p) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require_dimension(N);
    detail::require_positive(lambda, "lambda");
    detail::require_positive(p, "p");
    const double n = N;
    const double lv = -n * std::log(-std::expm1(-lambda / 2.0)) - std::log(M) / p -
                      (n / p) * std::log(-std::expm1(-p * lambda / 2.0));
    return std::exp(lv);
}

inline double iso_optimized(double M, int N, double lambda) {
    detail::require_dimension(N);
    detail::require_positive(lambda, "lambda");
    const double n = N;
    const double threshold = std::pow(1.09, n);
    if (!(M > threshold))
        throw DomainError("M=" + format_double(M) + " must exceed 1.09^N = " + format_double(threshold));
    const double root = std::pow(M, 1.0 / n);
    const double eps = xi_max * (1.0 - 1.09 / root);
    const double lv = -n * std::log(-std::expm1(-lambda / 2.0)) + (lambda * n / (2.0 * detail::kE)) * std::log1p(-eps) * root;
    return std::exp(lv);
}

inline double complex_bound(double M, int N, double lambda) {
    detail::require(std::isfinite(M) && M >= 1.0, "M must be at least 1");
    detail::require_dimension(N);
    detail::require_positive(lambda, "lambda");
    const double log_nfact = std::lgamma(N + 1.0);
    return std::exp(-lambda * std::exp((std::log(M) + log_nfact) / N)) / std::expm1(lambda);
}

/// 64 log-spaced points in (0, 4].
inline std::vector<double> tangency_p_grid() {
    std::vector<double> out;
    const double lo = std::log(1e-2), hi = std::log(4.0);
    for (int k = 0; k < 64; ++k) out.push_back(std::exp(lo + (hi - lo) * k / 63.0));
    return out;
}

}  // namespace qopt
