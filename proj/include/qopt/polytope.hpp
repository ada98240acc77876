#pragma once

// Limiting set P = { b_inf <= 1 }: exact vertices and volume.

#include "qopt/bound_model.hpp"
#include "qopt/index_sets.hpp"
#include "qopt/lattice_count.hpp"
#include "qopt/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

namespace qopt {

using RationalPoint = std::vector<std::pair<std::int64_t, std::int64_t>>;  // (num, den) per coordinate

namespace detail {

using i128 = __int128;

inline i128 abs128(i128 x) { return x < 0 ? -x : x; }

inline i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        const i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Fraction-free Gauss-Jordan on an n x (n+1) system. Returns false when singular;
/// otherwise x_i = num[i] / det.
inline bool solve_integer_system(std::vector<std::vector<i128>> a, std::vector<i128>& num, i128& det) {
    const std::size_t n = a.size();
    i128 prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a[p][k] == 0) ++p;
        if (p == n) return false;
        std::swap(a[p], a[k]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0; j <= n; ++j) {
                if (j == k) continue;
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (i != k) a[i][k] = 0;
        for (std::size_t i = 0; i < k; ++i) a[i][i] = a[k][k];
        prev = a[k][k];
    }
    det = prev;
    num.resize(n);
    for (std::size_t i = 0; i < n; ++i) num[i] = a[i][n];
    return true;
}

}  // namespace detail

/// Vertices of { nu >= 0 : rows . nu <= D } for the scaled form of a rational homogeneous model.
inline std::vector<RationalPoint> polytope_vertices(const BoundModel& model) {
    using detail::i128;
    const auto poly = model.scaled_polytope();
    const std::size_t n = model.dimension();
    const std::size_t k = poly.rows.size();
    // Halfspaces h . x <= c: the K model rows, then -x_i <= 0.
    std::vector<std::vector<i128>> h;
    std::vector<i128> c;
    for (const auto& r : poly.rows) {
        h.emplace_back(r.begin(), r.end());
        c.push_back(poly.denom);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<i128> e(n, 0);
        e[i] = -1;
        h.push_back(std::move(e));
        c.push_back(0);
    }
    const std::size_t m = k + n;
    std::set<RationalPoint> found;
    std::vector<bool> pick(m, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
    std::vector<i128> num;
    do {
        std::vector<std::vector<i128>> sys;
        for (std::size_t i = 0; i < m; ++i)
            if (pick[i]) {
                auto row = h[i];
                row.push_back(c[i]);
                sys.push_back(std::move(row));
            }
        i128 det = 0;
        if (!detail::solve_integer_system(std::move(sys), num, det)) continue;
        if (det < 0) {
            det = -det;
            for (auto& x : num) x = -x;
        }
        bool feasible = true;
        for (std::size_t i = 0; i < m && feasible; ++i) {
            i128 s = 0;
            for (std::size_t j = 0; j < n; ++j) s += h[i][j] * num[j];
            feasible = s <= c[i] * det;
        }
        if (!feasible) continue;
        RationalPoint v;
        for (auto x : num) {
            const i128 g = detail::gcd128(x, det);
            v.emplace_back(static_cast<std::int64_t>(x / g), static_cast<std::int64_t>(det / g));
        }
        found.insert(std::move(v));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return {found.begin(), found.end()};
}

/// lcm of all vertex coordinate denominators.
inline std::int64_t vertex_denominator_lcm(const std::vector<RationalPoint>& vertices) {
    std::int64_t q = 1;
    for (const auto& v : vertices)
        for (const auto& [num, den] : v) q = checked_lcm(q, den);
    return q;
}

enum class VolumeMethod { analytic_simplex, lattice_scaling };

inline std::string_view to_string(VolumeMethod m) {
    return m == VolumeMethod::analytic_simplex ? "analytic_simplex" : "lattice_scaling";
}

inline VolumeMethod volume_method_from_string(std::string_view s) {
    if (s == "analytic_simplex" || s == "analytic") return VolumeMethod::analytic_simplex;
    if (s == "lattice_scaling" || s == "scaling") return VolumeMethod::lattice_scaling;
    throw ArgumentError("unknown volume method \"" + std::string(s) + "\"");
}

struct LimitingSet {
    double volume = 0.0;
    VolumeMethod method = VolumeMethod::analytic_simplex;
    double tau_used = 0.0;
    double error_estimate = 0.0;
};

struct VolumeOptions {
    double tol = 1e-6;
    /// Largest lattice count attempted on the dilation ladder.
    std::size_t max_points = 50'000'000;
    unsigned threads = 1;
};

namespace detail {

/// #(tau P cap Z^N) for the family's limiting set.
class ScaledCounter {
public:
    explicit ScaledCounter(const BoundModel& model) : model_(model) {
        if (model.rational_homogeneous()) {
            poly_ = model.scaled_polytope();
            counter_.emplace(poly_.rows);
        } else if (model.family() == Family::FactorialAlpha) {
            // handled by the dedicated walk
        } else if (model.family() == Family::LegendreSqrt) {
            std::vector<double> w;
            for (double l : model.lambda()) w.push_back(2.0 * l);
            linear_.emplace(BoundModel::weighted_linear(std::move(w)));
        } else if (model.family() == Family::SupAffine) {
            auto terms = std::vector<AffineTerm>(model.terms().begin(), model.terms().end());
            for (auto& t : terms) t.offset = 0.0;
            linear_.emplace(BoundModel::sup_affine(std::move(terms)));
        } else {
            linear_.emplace(model);
        }
    }

    double count(double tau, const VolumeOptions& opts) {
        if (counter_) return count_to_double(counter_->count(poly_.capacity(tau)));
        if (linear_) {
            EnumerationOptions e;
            e.max_members = opts.max_points;
            e.threads = opts.threads;
            return static_cast<double>(count_superlevel(*linear_, tau, e));
        }
        return factorial_count(tau, opts);
    }

private:
    // #{ nu >= 0 : lambda . nu - G(nu) < tau/2 }, pruned by lambda . nu - G >= (1-p) lambda . nu.
    double factorial_count(double tau, const VolumeOptions& opts) {
        const std::size_t n = model_.dimension();
        const auto lam = model_.lambda();
        const double p = model_.margin();
        std::vector<double> nu(n, 0.0);
        std::size_t total = 0;
        auto rec = [&](auto&& self, std::size_t d, double partial) -> void {
            for (double x = 0.0;; x += 1.0) {
                const double part = partial + lam[d] * x;
                if ((1.0 - p) * part >= tau / 2.0) break;
                nu[d] = x;
                if (d + 1 == n) {
                    if (part - stirling_limit(nu) < tau / 2.0) {
                        if (++total > opts.max_points)
                            throw ResourceError("point ceiling max_points=" + std::to_string(opts.max_points) + " exceeded");
                    }
                } else {
                    self(self, d + 1, part);
                }
            }
            nu[d] = 0.0;
        };
        rec(rec, 0, 0.0);
        return static_cast<double>(total);
    }

    const BoundModel& model_;
    ScaledPolytope poly_;
    std::optional<LatticeCounter> counter_;
    std::optional<BoundModel> linear_;
};

}  // namespace detail

/// |P| for the model's limiting set.
inline LimitingSet volume(const BoundModel& model, VolumeMethod method, const VolumeOptions& opts = {}) {
    const std::size_t n = model.dimension();
    if (method == VolumeMethod::analytic_simplex) {
        double factor = 1.0;
        if (model.family() == Family::LegendreSqrt) factor = std::ldexp(1.0, -static_cast<int>(n));
        else if (model.family() != Family::WeightedLinear)
            throw DomainError("analytic_simplex volume applies to WeightedLinear and LegendreSqrt only");
        double log_prod = std::lgamma(static_cast<double>(n) + 1.0);
        for (double l : model.lambda()) log_prod += std::log(l);
        return {factor * std::exp(-log_prod), method, 1.0, 0.0};
    }

    detail::require(std::isfinite(opts.tol) && opts.tol > 0.0, "volume tol must be positive");
    detail::ScaledCounter counter(model);
    // Integer periods when rational.
    double tau = 1.0;
    if (model.rational_homogeneous()) tau = static_cast<double>(vertex_denominator_lcm(polytope_vertices(model)));
    const double dn = static_cast<double>(n);
    std::vector<std::vector<double>> table;
    double best = 0.0, err = std::numeric_limits<double>::infinity(), tau_best = tau;
    try {
        for (int level = 0; level < 40; ++level, tau *= 2.0) {
            const double c = counter.count(tau, opts);
            std::vector<double> row{c / std::pow(tau, dn)};
            for (std::size_t m = 1; m <= table.size(); ++m) {
                const double f = std::ldexp(1.0, static_cast<int>(m)) - 1.0;
                row.push_back(row[m - 1] + (row[m - 1] - table.back()[m - 1]) / f);
            }
            if (!table.empty()) {
                const double diff = std::abs(row.back() - table.back().back());
                best = row.back();
                err = diff;
                tau_best = tau;
                if (diff < opts.tol * std::abs(best) && best > 0.0) return {best, method, tau, diff};
            }
            table.push_back(std::move(row));
        }
    } catch (const ResourceError& e) {
        if (table.size() >= 2) throw ResourceError(std::string(e.what()) + "; volume not converged at tau=" +
                                                       format_double(tau_best) + ", error " + format_double(err),
                                                   best);
        throw;
    }
    throw ResourceError("volume did not converge on the dilation ladder", best);
}

}  // namespace qopt
