#pragma once

// Exact truncation errors sum_{nu not in Lambda_M} prefactor * exp(-b(nu)).

#include "qopt/index_sets.hpp"
#include "qopt/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string_view>
#include <vector>

namespace qopt {

enum class TailMethod { closed_form, controlled_enumeration, level_counting };

inline std::string_view to_string(TailMethod m) {
    switch (m) {
        case TailMethod::closed_form: return "closed_form";
        case TailMethod::controlled_enumeration: return "controlled_enumeration";
        case TailMethod::level_counting: return "level_counting";
    }
    return "?";
}

struct TailOptions {
    /// Relative accuracy requested for each tail (and for totals without a closed form).
    double tol = 1e-12;
    EnumerationOptions enumeration{};
};

struct TotalValue {
    double value = 0.0;
    double abs_error_bound = 0.0;
    TailMethod method = TailMethod::closed_form;
};

struct TailValue {
    std::size_t M = 0;
    double head_sum = 0.0;
    double total_sum = 0.0;
    double tail = 0.0;
    double abs_error_bound = 0.0;
    TailMethod method = TailMethod::closed_form;
};

namespace detail {

constexpr double kRounding = 4.0 * std::numeric_limits<double>::epsilon();

/// log of sum_nu exp(-s b(nu)) bounded from above, for 0 < s < 1; +inf when no bound is known.
inline double log_partition_bound(const BoundModel& model, double s) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (model.family()) {
        case Family::WeightedLinear: {
            double acc = 0.0;
            for (double l : model.lambda()) acc -= std::log(-std::expm1(-s * l));
            return acc;
        }
        case Family::LegendreSqrt: {
            double acc = 0.0;
            for (double l : model.lambda()) {
                const double y = std::exp(-2.0 * s * l);
                acc += std::log1p(y) - 2.0 * std::log(-std::expm1(-2.0 * s * l));
            }
            return acc;
        }
        case Family::SupAffine: {
            double best = inf;
            for (const auto& t : model.terms()) {
                double acc = s * t.offset;
                for (double w : t.weights) acc -= std::log(-std::expm1(-s * w));
                best = std::min(best, acc);
            }
            return best;
        }
        case Family::FactorialAlpha: {
            const double e = std::min(2.0 * s, 1.0);
            double q = 0.0;
            for (double a : model.alpha()) q += std::pow(a, e);
            return q < 1.0 ? -std::log1p(-q) : inf;
        }
    }
    return inf;
}

constexpr int kThetaGrid = 64;

}  // namespace detail

/// Upper bound on sum_{b(nu) > T} exp(-b(nu)), without prefactor.
inline double remainder_envelope(const BoundModel& model, double T) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < detail::kThetaGrid; ++k) {
        const double theta = static_cast<double>(k) / detail::kThetaGrid;
        best = std::min(best, -theta * T + detail::log_partition_bound(model, 1.0 - theta));
    }
    return std::exp(best);
}

/// Smallest grid-optimal T with remainder_envelope(model, T) <= target.
inline double envelope_level(const BoundModel& model, double target) {
    detail::require(target > 0.0, "remainder target must be positive");
    double best = std::numeric_limits<double>::infinity();
    const double lt = std::log(target);
    for (int k = 1; k < detail::kThetaGrid; ++k) {
        const double theta = static_cast<double>(k) / detail::kThetaGrid;
        const double ls = detail::log_partition_bound(model, 1.0 - theta);
        if (std::isfinite(ls)) best = std::min(best, (ls - lt) / theta);
    }
    if (!std::isfinite(best)) throw DomainError("no summable envelope for this model");
    return best;
}

namespace detail {

/// Cumulative level counts cum(s) = #{ nu : D b(nu) <= s } of a rational homogeneous model.
class LevelCounts {
public:
    explicit LevelCounts(const BoundModel& model) : poly_(model.scaled_polytope()), counter_(poly_.rows) {}

    [[nodiscard]] std::int64_t denom() const noexcept { return poly_.denom; }
    [[nodiscard]] const ScaledPolytope& polytope() const noexcept { return poly_; }

    Count cum(std::int64_t s) {
        if (s < 0) return 0;
        while (static_cast<std::int64_t>(cum_.size()) <= s)
            cum_.push_back(counter_.count(static_cast<std::int64_t>(cum_.size())));
        return cum_[static_cast<std::size_t>(s)];
    }

    Count level(std::int64_t s) { return cum(s) - cum(s - 1); }

    /// Smallest s with cum(s) >= M.
    std::int64_t level_of_rank(Count M) {
        std::int64_t s = 0;
        while (cum(s) < M) ++s;
        return s;
    }

private:
    ScaledPolytope poly_;
    LatticeCounter counter_;
    std::vector<Count> cum_;
};

inline double closed_form_total(const BoundModel& model) {
    double acc = 1.0;
    if (model.family() == Family::WeightedLinear) {
        for (double l : model.lambda()) acc /= -std::expm1(-l);
    } else {
        for (double l : model.lambda()) {
            const double x = std::exp(-2.0 * l);
            const double d = -std::expm1(-2.0 * l);
            acc *= (1.0 + x) / (d * d);
        }
    }
    return acc;
}

inline bool has_closed_total(const BoundModel& model) {
    return model.family() == Family::WeightedLinear || model.family() == Family::LegendreSqrt;
}

inline void check_tol(double tol) { require(std::isfinite(tol) && tol > 0.0, "tol must be positive"); }

/// sum exp(-b) over { b <= T } with key strictly after `cut` (or all when cut is null).
inline double enumerate_sum(const BoundModel& model, double T, const Member* cut, const EnumerationOptions& opts) {
    std::vector<CompensatedSum> parts;
    SuperlevelWalker probe(model, std::max(T, 0.0));
    const auto firsts = probe.first_values();
    parts.resize(firsts.size());
    std::atomic<std::size_t> visited{0};
    parallel_for(firsts.size(), opts.threads, [&](std::size_t i) {
        SuperlevelWalker w(model, std::max(T, 0.0));
        Member probe_member;
        w.walk(firsts[i], [&](std::span<const std::int32_t> nu, double b, std::int64_t scaled) {
            if (visited.fetch_add(1) + 1 > opts.max_members)
                throw ResourceError("member ceiling max_members=" + std::to_string(opts.max_members) + " exceeded");
            if (cut) {
                std::int64_t order = 0;
                for (auto v : nu) order += v;
                bool after;
                if (scaled >= 0 && cut->scaled >= 0 && scaled != cut->scaled) after = scaled > cut->scaled;
                else if (scaled < 0 && b != cut->b) after = b > cut->b;
                else if (order != cut->order) after = order > cut->order;
                else after = std::lexicographical_compare(cut->nu.entries().begin(), cut->nu.entries().end(),
                                                          nu.begin(), nu.end());
                if (!after) return;
            }
            parts[i] += std::exp(-b);
        });
    });
    CompensatedSum total;
    for (const auto& p : parts) total += p;
    return total.value();
}

inline std::vector<TailValue> level_tails(const BoundModel& model, const std::vector<std::size_t>& Ms,
                                          const TailOptions& opts) {
    LevelCounts counts(model);
    const double D = static_cast<double>(counts.denom());
    const double closed = has_closed_total(model) ? closed_form_total(model) : std::numeric_limits<double>::quiet_NaN();
    std::vector<TailValue> out;
    for (auto M : Ms) {
        const auto s_star = counts.level_of_rank(M);
        const double w_star = std::exp(-static_cast<double>(s_star) / D);
        const double T = std::max(envelope_level(model, opts.tol * w_star), static_cast<double>(s_star) / D);
        const auto s_max = static_cast<std::int64_t>(std::ceil(T * D));
        const double remainder = remainder_envelope(model, static_cast<double>(s_max) / D);

        CompensatedSum tail;
        for (std::int64_t s = s_max; s > s_star; --s)
            tail += count_to_double(counts.level(s)) * std::exp(-static_cast<double>(s) / D);
        tail += count_to_double(counts.cum(s_star) - static_cast<Count>(M)) * w_star;

        CompensatedSum head;
        for (std::int64_t s = 0; s < s_star; ++s) head += count_to_double(counts.level(s)) * std::exp(-static_cast<double>(s) / D);
        head += count_to_double(static_cast<Count>(M) - counts.cum(s_star - 1)) * w_star;

        TailValue v;
        v.M = M;
        v.head_sum = head.value();
        v.tail = tail.value();
        v.total_sum = std::isnan(closed) ? v.head_sum + v.tail + remainder : closed;
        v.abs_error_bound = remainder + kRounding * (v.tail + v.head_sum);
        v.method = TailMethod::level_counting;
        out.push_back(v);
    }
    return out;
}

inline std::vector<TailValue> enumerated_tails(const BoundModel& model, const std::vector<std::size_t>& Ms,
                                               const TailOptions& opts) {
    const std::size_t m_max = *std::max_element(Ms.begin(), Ms.end());
    const auto lambda = build_quasi_optimal(model, m_max + 1, opts.enumeration);
    const auto& members = lambda.members();
    const Member& cut = members[m_max - 1];
    const double b_next = members[m_max].b;
    const double T = std::max(envelope_level(model, opts.tol * std::exp(-b_next)), b_next);
    const double remainder = remainder_envelope(model, T);
    const double beyond = enumerate_sum(model, T, &cut, opts.enumeration);

    std::vector<double> suffix(m_max + 1);
    CompensatedSum acc;
    acc += beyond;
    suffix[m_max] = acc.value();
    for (std::size_t k = m_max; k-- > 0;) {
        acc += std::exp(-members[k].b);
        suffix[k] = acc.value();
    }
    std::vector<double> prefix(m_max + 1, 0.0);
    CompensatedSum head;
    for (std::size_t k = 0; k < m_max; ++k) {
        head += std::exp(-members[k].b);
        prefix[k + 1] = head.value();
    }
    const bool closed = has_closed_total(model);
    const double total = closed ? closed_form_total(model) : prefix[m_max] + suffix[m_max] + remainder;

    std::vector<TailValue> out;
    for (auto M : Ms) {
        TailValue v;
        v.M = M;
        v.head_sum = prefix[M];
        v.tail = suffix[M];
        v.total_sum = total;
        v.abs_error_bound = remainder + kRounding * (v.tail + v.head_sum);
        v.method = TailMethod::controlled_enumeration;
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// sum_nu prefactor * exp(-b(nu)); closed form when separable, otherwise counted or enumerated
/// until the analytic remainder is below tol times the largest term.
inline TotalValue total_sum(const BoundModel& model, double tol = 1e-12, const EnumerationOptions& opts = {}) {
    detail::check_tol(tol);
    const double pf = model.prefactor();
    if (detail::has_closed_total(model)) return {pf * detail::closed_form_total(model), 0.0, TailMethod::closed_form};
    const double b0 = eval_b(model, MultiIndex(model.dimension()));
    const double target = tol * std::exp(-b0);
    if (model.rational_homogeneous()) {
        detail::LevelCounts counts(model);
        const double D = static_cast<double>(counts.denom());
        const auto s_max = static_cast<std::int64_t>(std::ceil(envelope_level(model, target) * D));
        CompensatedSum acc;
        for (std::int64_t s = s_max; s >= 0; --s) acc += count_to_double(counts.level(s)) * std::exp(-static_cast<double>(s) / D);
        const double rem = remainder_envelope(model, static_cast<double>(s_max) / D);
        return {pf * acc.value(), pf * (rem + detail::kRounding * acc.value()), TailMethod::level_counting};
    }
    const double T = std::max(envelope_level(model, target), 0.0);
    const double rem = remainder_envelope(model, T);
    double value = 0.0;
    try {
        value = detail::enumerate_sum(model, T, nullptr, opts);
    } catch (const ResourceError& e) {
        throw ResourceError(std::string(e.what()) + " while summing the series to tol=" + format_double(tol));
    }
    return {pf * value, pf * (rem + detail::kRounding * value), TailMethod::controlled_enumeration};
}

/// Tails for several cardinalities at once; Lambda_M follows the total order (b, |nu|, lex).
inline std::vector<TailValue> exact_tails(const BoundModel& model, const std::vector<std::size_t>& Ms,
                                          const TailOptions& opts = {}) {
    detail::check_tol(opts.tol);
    for (auto M : Ms) detail::require(M >= 1, "M must be at least 1");
    if (Ms.empty()) return {};
    std::vector<TailValue> out;
    if (model.family() == Family::WeightedLinear && model.dimension() == 1) {
        const double l = model.lambda()[0];
        const double total = detail::closed_form_total(model);
        for (auto M : Ms) {
            TailValue v;
            v.M = M;
            v.tail = std::exp(-l * static_cast<double>(M)) * total;
            v.head_sum = -std::expm1(-l * static_cast<double>(M)) * total;
            v.total_sum = total;
            v.abs_error_bound = detail::kRounding * total;
            v.method = TailMethod::closed_form;
            out.push_back(v);
        }
    } else if (model.rational_homogeneous()) {
        out = detail::level_tails(model, Ms, opts);
    } else {
        out = detail::enumerated_tails(model, Ms, opts);
    }
    const double pf = model.prefactor();
    for (auto& v : out) {
        v.head_sum *= pf;
        v.tail *= pf;
        v.total_sum *= pf;
        v.abs_error_bound *= pf;
    }
    return out;
}

inline TailValue exact_tail(const BoundModel& model, std::size_t M, const TailOptions& opts = {}) {
    return exact_tails(model, {M}, opts).front();
}

/// Level cardinalities #{ nu : b(nu) <= J } for integer levels J.
inline std::vector<std::size_t> level_cardinalities(const BoundModel& model, const std::vector<std::int64_t>& levels,
                                                    const EnumerationOptions& opts = {}) {
    std::vector<double> taus(levels.begin(), levels.end());
    std::vector<std::size_t> out;
    for (const auto& [t, c] : cardinality_profile(model, taus, opts)) out.push_back(static_cast<std::size_t>(c));
    return out;
}

}  // namespace qopt
