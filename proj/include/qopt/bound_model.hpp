#pragma once

// Coefficient-bound models B(nu) = prefactor * exp(-b(nu)) and their exponent functions.

#include "qopt/errors.hpp"
#include "qopt/multi_index.hpp"
#include "qopt/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qopt {

enum class Family { WeightedLinear, SupAffine, LegendreSqrt, FactorialAlpha };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::WeightedLinear: return "WeightedLinear";
        case Family::SupAffine: return "SupAffine";
        case Family::LegendreSqrt: return "LegendreSqrt";
        case Family::FactorialAlpha: return "FactorialAlpha";
    }
    return "?";
}

inline Family family_from_string(std::string_view s) {
    for (auto f : {Family::WeightedLinear, Family::SupAffine, Family::LegendreSqrt, Family::FactorialAlpha})
        if (to_string(f) == s) return f;
    throw ArgumentError("unknown bound family \"" + std::string(s) + "\"");
}

/// One element of a finite admissible set: contributes w . nu - offset to the supremum.
/// offset = -log(delta) >= 0.
struct AffineTerm {
    double offset = 0.0;
    std::vector<double> weights;
    std::optional<std::vector<Ratio>> rational_weights;
};

/// Integer form of a homogeneous rational model: D * b(nu) = max_k rows[k] . nu.
struct ScaledPolytope {
    std::int64_t denom = 1;
    std::vector<std::vector<std::int64_t>> rows;

    [[nodiscard]] std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }

    [[nodiscard]] std::int64_t value(std::span<const MultiIndex::value_type> nu) const {
        std::int64_t best = 0;
        for (const auto& row : rows) {
            std::int64_t s = 0;
            for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * nu[i];
            best = std::max(best, s);
        }
        return best;
    }

    /// Largest scaled level not exceeding tau (tau*D snapped to an integer when within round-off).
    [[nodiscard]] std::int64_t capacity(double tau) const {
        const double x = tau * static_cast<double>(denom);
        const double r = std::round(x);
        if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
        return static_cast<std::int64_t>(std::floor(x));
    }
};

class BoundModel {
public:
    static BoundModel weighted_linear(std::vector<double> lambda, double prefactor = 1.0) {
        BoundModel m(Family::WeightedLinear, lambda.size(), prefactor);
        m.lambda_ = std::move(lambda);
        m.validate();
        return m;
    }

    static BoundModel weighted_linear(std::vector<Ratio> lambda, double prefactor = 1.0) {
        std::vector<double> real(lambda.size());
        std::transform(lambda.begin(), lambda.end(), real.begin(), [](const Ratio& r) { return r.to_double(); });
        BoundModel m(Family::WeightedLinear, lambda.size(), prefactor);
        m.lambda_ = std::move(real);
        m.rational_ = std::move(lambda);
        m.validate();
        return m;
    }

    static BoundModel sup_affine(std::vector<AffineTerm> terms, double prefactor = 1.0) {
        detail::require(!terms.empty(), "SupAffine needs at least one affine term");
        BoundModel m(Family::SupAffine, terms.front().weights.size(), prefactor);
        for (auto& t : terms) {
            if (t.weights.empty() && t.rational_weights) {
                for (const auto& r : *t.rational_weights) t.weights.push_back(r.to_double());
            }
        }
        m.dimension_ = terms.front().weights.size();
        m.terms_ = std::move(terms);
        m.validate();
        return m;
    }

    static BoundModel legendre_sqrt(std::vector<double> lambda, double prefactor = 1.0) {
        BoundModel m(Family::LegendreSqrt, lambda.size(), prefactor);
        m.lambda_ = std::move(lambda);
        m.validate();
        return m;
    }

    static BoundModel factorial_alpha(std::vector<double> alpha, double prefactor = 1.0) {
        BoundModel m(Family::FactorialAlpha, alpha.size(), prefactor);
        m.alpha_ = std::move(alpha);
        m.validate();
        m.lambda_.resize(m.alpha_.size());
        std::transform(m.alpha_.begin(), m.alpha_.end(), m.lambda_.begin(), [](double a) { return -std::log(a); });
        m.margin_ = choose_margin(m.alpha_);
        return m;
    }

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] double prefactor() const noexcept { return prefactor_; }

    /// lambda_i; for FactorialAlpha this is -log(alpha_i).
    [[nodiscard]] std::span<const double> lambda() const noexcept { return lambda_; }
    [[nodiscard]] std::span<const double> alpha() const noexcept { return alpha_; }
    [[nodiscard]] std::span<const AffineTerm> terms() const noexcept { return terms_; }
    [[nodiscard]] const std::optional<std::vector<Ratio>>& rational_weights() const noexcept { return rational_; }

    /// Summability margin p in (0,1) with sum alpha_i^p < 1 (FactorialAlpha only).
    [[nodiscard]] double margin() const noexcept { return margin_; }

    [[nodiscard]] BoundModel with_prefactor(double prefactor) const {
        BoundModel m = *this;
        m.prefactor_ = prefactor;
        m.validate();
        return m;
    }

    /// b(tau nu) = tau b(nu) and offsets are absent.
    [[nodiscard]] bool homogeneous() const noexcept {
        if (family_ == Family::WeightedLinear) return true;
        if (family_ == Family::SupAffine)
            return std::all_of(terms_.begin(), terms_.end(), [](const AffineTerm& t) { return t.offset == 0.0; });
        return false;
    }

    /// nu <= mu componentwise implies b(nu) <= b(mu) on the lattice.
    [[nodiscard]] bool lattice_monotone() const noexcept {
        switch (family_) {
            case Family::WeightedLinear:
            case Family::SupAffine: return true;
            case Family::LegendreSqrt:
                // f(x+1) - f(x) = 2 lambda - log((2x+3)/(2x+1)) is smallest at x = 0.
                return std::all_of(lambda_.begin(), lambda_.end(),
                                   [](double l) { return 2.0 * l >= std::log(3.0); });
            case Family::FactorialAlpha: return dimension_ == 1;
        }
        return false;
    }

    /// Homogeneous with exact rational weights everywhere; enables exact counting and Ehrhart fits.
    [[nodiscard]] bool rational_homogeneous() const noexcept {
        if (!homogeneous()) return false;
        if (family_ == Family::WeightedLinear) return rational_.has_value();
        return std::all_of(terms_.begin(), terms_.end(), [](const AffineTerm& t) { return t.rational_weights.has_value(); });
    }

    [[nodiscard]] ScaledPolytope scaled_polytope() const {
        if (!rational_homogeneous()) throw DomainError("model is not homogeneous with rational weights");
        std::vector<const std::vector<Ratio>*> rows;
        if (family_ == Family::WeightedLinear) rows.push_back(&*rational_);
        else
            for (const auto& t : terms_) rows.push_back(&*t.rational_weights);
        std::int64_t d = 1;
        for (const auto* r : rows)
            for (const auto& w : *r) d = checked_lcm(d, w.den);
        ScaledPolytope out;
        out.denom = d;
        for (const auto* r : rows) {
            std::vector<std::int64_t> row;
            for (const auto& w : *r) row.push_back(w.num * (d / w.den));
            out.rows.push_back(std::move(row));
        }
        return out;
    }

private:
    BoundModel(Family f, std::size_t n, double prefactor) : family_(f), dimension_(n), prefactor_(prefactor) {}

    static double choose_margin(const std::vector<double>& alpha) {
        auto power_sum = [&](double p) {
            double s = 0.0;
            for (double a : alpha) s += std::pow(a, p);
            return s;
        };
        for (double p : {0.5, 0.75, 0.9})
            if (power_sum(p) < 1.0) return p;
        // sum alpha^p decreases in p and is < 1 at p = 1; bisect for the crossing.
        double lo = 0.9, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (power_sum(mid) < 1.0 ? hi : lo) = mid;
        }
        return 0.5 * (hi + 1.0);
    }

    void validate() const {
        auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
        detail::require(dimension_ >= 1, "model dimension must be positive");
        detail::require(positive(prefactor_), "prefactor must be a positive finite number");
        switch (family_) {
            case Family::WeightedLinear:
            case Family::LegendreSqrt:
                detail::require(lambda_.size() == dimension_, "lambda has wrong length");
                for (double l : lambda_) detail::require(positive(l), "lambda entries must be positive");
                break;
            case Family::SupAffine:
                for (const auto& t : terms_) {
                    detail::require(t.weights.size() == dimension_, "affine term weights have wrong length");
                    for (double w : t.weights) detail::require(positive(w), "affine term weights must be positive");
                    detail::require(std::isfinite(t.offset) && t.offset >= 0.0, "affine offsets must be >= 0");
                    if (t.rational_weights) check_rational(*t.rational_weights, t.weights);
                }
                break;
            case Family::FactorialAlpha: {
                detail::require(alpha_.size() == dimension_, "alpha has wrong length");
                double s = 0.0;
                for (double a : alpha_) {
                    detail::require(std::isfinite(a) && a > 0.0 && a < 1.0, "alpha entries must lie in (0,1)");
                    s += a;
                }
                detail::require(s < 1.0, "FactorialAlpha requires sum(alpha) < 1");
                break;
            }
        }
        if (rational_) {
            detail::require(family_ == Family::WeightedLinear, "rational_weights apply to WeightedLinear lambda");
            check_rational(*rational_, lambda_);
        }
    }

    void check_rational(const std::vector<Ratio>& r, const std::vector<double>& real) const {
        detail::require(r.size() == dimension_, "rational_weights have wrong length");
        for (std::size_t i = 0; i < r.size(); ++i) {
            detail::require(r[i].num > 0, "rational weights must be positive");
            const double x = r[i].to_double();
            detail::require(std::abs(x - real[i]) <= 4.0 * std::numeric_limits<double>::epsilon() * x,
                            "rational_weights do not match lambda at entry " + std::to_string(i));
        }
    }

    Family family_;
    std::size_t dimension_;
    double prefactor_;
    std::vector<double> lambda_;
    std::vector<double> alpha_;
    std::vector<AffineTerm> terms_;
    std::optional<std::vector<Ratio>> rational_;
    double margin_ = 0.0;
};

namespace detail {

inline void check_point(const BoundModel& model, std::span<const double> nu) {
    require(nu.size() == model.dimension(), "point dimension " + std::to_string(nu.size()) +
                                                " does not match model dimension " +
                                                std::to_string(model.dimension()));
    for (double x : nu) require(std::isfinite(x) && x >= 0.0, "point entries must be finite and nonnegative");
}

/// Unchecked b(nu) over [0, inf)^N.
inline double b_unchecked(const BoundModel& model, std::span<const double> nu) {
    const auto lam = model.lambda();
    switch (model.family()) {
        case Family::WeightedLinear: {
            double s = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) s += lam[i] * nu[i];
            return s;
        }
        case Family::SupAffine: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& t : model.terms()) {
                double s = -t.offset;
                for (std::size_t i = 0; i < nu.size(); ++i) s += t.weights[i] * nu[i];
                best = std::max(best, s);
            }
            return best;
        }
        case Family::LegendreSqrt: {
            double s = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) s += 2.0 * lam[i] * nu[i] - std::log1p(2.0 * nu[i]);
            return s;
        }
        case Family::FactorialAlpha: {
            double linear = 0.0, total = 0.0, lg = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) {
                linear += lam[i] * nu[i];
                total += nu[i];
                lg += std::lgamma(nu[i] + 1.0);
            }
            return 2.0 * linear - 2.0 * (std::lgamma(total + 1.0) - lg);
        }
    }
    return 0.0;
}

/// G(nu) = log(|nu|^|nu| / prod nu_i^nu_i) with 0 log 0 = 0.
inline double stirling_limit(std::span<const double> nu) {
    double total = 0.0, s = 0.0;
    for (double x : nu) {
        total += x;
        if (x > 0.0) s += x * std::log(x);
    }
    return total > 0.0 ? total * std::log(total) - s : 0.0;
}

/// lim b(tau nu) / tau; the limiting set is { b_inf <= 1 } (strict for FactorialAlpha).
inline double limit_function(const BoundModel& model, std::span<const double> nu) {
    const auto lam = model.lambda();
    switch (model.family()) {
        case Family::WeightedLinear: return b_unchecked(model, nu);
        case Family::SupAffine: {
            double best = 0.0;
            for (const auto& t : model.terms()) {
                double s = 0.0;
                for (std::size_t i = 0; i < nu.size(); ++i) s += t.weights[i] * nu[i];
                best = std::max(best, s);
            }
            return best;
        }
        case Family::LegendreSqrt: {
            double s = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) s += 2.0 * lam[i] * nu[i];
            return s;
        }
        case Family::FactorialAlpha: {
            double s = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) s += lam[i] * nu[i];
            return 2.0 * (s - stirling_limit(nu));
        }
    }
    return 0.0;
}

}  // namespace detail

/// b(nu) for a real point of [0, inf)^N.
inline double eval_b(const BoundModel& model, std::span<const double> nu) {
    detail::check_point(model, nu);
    return detail::b_unchecked(model, nu);
}

/// b(nu) at a lattice point. Rational homogeneous models are evaluated exactly, so ties are exact.
inline double eval_b(const BoundModel& model, const MultiIndex& nu) {
    detail::require(nu.size() == model.dimension(), "multi-index dimension " + std::to_string(nu.size()) +
                                                        " does not match model dimension " +
                                                        std::to_string(model.dimension()));
    if (model.rational_homogeneous()) {
        const auto poly = model.scaled_polytope();
        return static_cast<double>(poly.value(nu.entries())) / static_cast<double>(poly.denom);
    }
    const auto real = nu.as_real();
    return detail::b_unchecked(model, real);
}

inline double eval_b(const BoundModel& model, std::initializer_list<double> nu) {
    return eval_b(model, std::span<const double>(nu.begin(), nu.size()));
}

/// Membership of nu in the limiting set P of the family.
inline bool limiting_membership(const BoundModel& model, std::span<const double> nu) {
    detail::check_point(model, nu);
    if (model.family() == Family::FactorialAlpha) {
        for (double x : nu)
            detail::require(x > 0.0, "FactorialAlpha limiting set is defined on (0, inf)^N; zero entry given");
        double s = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i) s += model.lambda()[i] * nu[i];
        return s - detail::stirling_limit(nu) < 0.5;
    }
    return detail::limit_function(model, nu) <= 1.0;
}

inline bool limiting_membership(const BoundModel& model, std::initializer_list<double> nu) {
    return limiting_membership(model, std::span<const double>(nu.begin(), nu.size()));
}

}  // namespace qopt
