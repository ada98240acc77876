#pragma once

// Superlevel sets { nu : b(nu) <= tau } on the lattice and quasi-optimal index sets.

#include "qopt/bound_model.hpp"
#include "qopt/format.hpp"
#include "qopt/lattice_count.hpp"
#include "qopt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace qopt {

struct EnumerationOptions {
    std::size_t max_members = 50'000'000;
    unsigned threads = 1;
};

/// One member of an index set. `scaled` holds D*b(nu) as an integer when the model is
/// rational homogeneous, and -1 otherwise.
struct Member {
    MultiIndex nu;
    double b = 0.0;
    std::int64_t scaled = -1;
    std::int64_t order = 0;
};

/// Strict total order (b, |nu|, lex).
inline bool key_less(const Member& x, const Member& y) {
    if (x.scaled >= 0 && y.scaled >= 0) {
        if (x.scaled != y.scaled) return x.scaled < y.scaled;
    } else if (x.b != y.b) {
        return x.b < y.b;
    }
    if (x.order != y.order) return x.order < y.order;
    return x.nu < y.nu;
}

inline Member make_member(MultiIndex nu, double b, std::int64_t scaled = -1) {
    const auto order = nu.order();
    return {std::move(nu), b, scaled, order};
}

class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::size_t dimension, std::vector<Member> members, std::string envelope)
        : dimension_(dimension), members_(std::move(members)), envelope_(std::move(envelope)) {}

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
    [[nodiscard]] const std::vector<Member>& members() const noexcept { return members_; }
    [[nodiscard]] const Member& operator[](std::size_t i) const { return members_[i]; }

    /// Pruning rule used while enumerating.
    [[nodiscard]] const std::string& envelope() const noexcept { return envelope_; }

    [[nodiscard]] static constexpr const char* order_rule() noexcept { return "b_value,order,lex"; }

    [[nodiscard]] double max_b() const { return members_.empty() ? -std::numeric_limits<double>::infinity() : members_.back().b; }

    [[nodiscard]] bool contains(const MultiIndex& nu) const {
        return std::any_of(members_.begin(), members_.end(), [&](const Member& m) { return m.nu == nu; });
    }

    [[nodiscard]] std::vector<MultiIndex> indices() const {
        std::vector<MultiIndex> out;
        out.reserve(members_.size());
        for (const auto& m : members_) out.push_back(m.nu);
        return out;
    }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < dimension_; ++i) os << "nu_" << (i + 1) << ',';
        os << "b_value,rank\n";
        for (std::size_t r = 0; r < members_.size(); ++r) {
            for (auto v : members_[r].nu.entries()) os << v << ',';
            os << format_double(members_[r].b) << ',' << (r + 1) << '\n';
        }
    }

private:
    std::size_t dimension_ = 0;
    std::vector<Member> members_;
    std::string envelope_;
};

namespace detail {

/// Depth-first walk over { nu : b(nu) <= tau } with family-specific pruning.
class SuperlevelWalker {
public:
    SuperlevelWalker(const BoundModel& model, double tau) : model_(model), tau_(tau), n_(model.dimension()) {
        require(std::isfinite(tau), "tau must be finite");
        slack_ = 1e-12 * std::max(1.0, std::abs(tau));
        if (model.rational_homogeneous()) {
            mode_ = Mode::exact;
            poly_ = model.scaled_polytope();
            cap_ = poly_.capacity(tau);
            iparts_.assign(n_ + 1, std::vector<std::int64_t>(poly_.rows.size(), 0));
        } else if (model.family() == Family::FactorialAlpha) {
            mode_ = Mode::factorial;
            rparts_.assign(n_ + 1, std::vector<double>(1, 0.0));
        } else if (model.family() == Family::LegendreSqrt) {
            mode_ = model.lattice_monotone() ? Mode::separable : Mode::separable_min;
            setup_legendre();
        } else {
            mode_ = Mode::linear;
            const auto k = model.family() == Family::SupAffine ? model.terms().size() : 1;
            rparts_.assign(n_ + 1, std::vector<double>(k, 0.0));
        }
        nu_.assign(n_, 0);
    }

    [[nodiscard]] std::string envelope() const {
        switch (mode_) {
            case Mode::exact: return "exact_scaled_partial";
            case Mode::linear: return "partial_b";
            case Mode::separable: return "partial_b";
            case Mode::separable_min: return "separable_minimum";
            case Mode::factorial: return "margin_linear(p=" + format_double(model_.margin()) + ")";
        }
        return "";
    }

    [[nodiscard]] bool exact() const noexcept { return mode_ == Mode::exact; }
    [[nodiscard]] std::int64_t denom() const noexcept { return poly_.denom; }

    /// Admissible values of the first coordinate.
    std::vector<std::int32_t> first_values() {
        std::vector<std::int32_t> out;
        if (mode_ == Mode::exact && cap_ < 0) return out;
        for (std::int32_t x = 0;; ++x) {
            const auto s = step(0, x);
            if (s == Step::stop) break;
            if (s == Step::take) out.push_back(x);
        }
        return out;
    }

    /// Visits every member with nu_0 = first, as visit(nu_entries, b, scaled).
    template <class Visit>
    void walk(std::int32_t first, Visit&& visit) {
        if (step(0, first) != Step::take) return;
        nu_[0] = first;
        if (n_ == 1) leaf(visit);
        else recurse(1, visit);
        nu_[0] = 0;
    }

private:
    enum class Mode { exact, linear, separable, separable_min, factorial };
    enum class Step { take, skip, stop };

    void setup_legendre() {
        const auto lam = model_.lambda();
        argmin_.resize(n_);
        minval_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto f = [&](double x) { return 2.0 * lam[i] * x - std::log1p(2.0 * x); };
            const double xs = std::max(0.0, 1.0 / (2.0 * lam[i]) - 0.5);
            const auto lo = static_cast<std::int32_t>(std::floor(xs));
            argmin_[i] = f(lo + 1) < f(lo) ? lo + 1 : lo;
            minval_[i] = f(argmin_[i]);
        }
        tailmin_.assign(n_ + 1, 0.0);
        for (std::size_t i = n_; i-- > 0;) tailmin_[i] = tailmin_[i + 1] + minval_[i];
        rparts_.assign(n_ + 1, std::vector<double>(1, 0.0));
    }

    Step step(std::size_t d, std::int32_t x) {
        switch (mode_) {
            case Mode::exact: {
                const auto& cur = iparts_[d];
                auto& nxt = iparts_[d + 1];
                std::int64_t v = 0;
                for (std::size_t k = 0; k < cur.size(); ++k) {
                    nxt[k] = cur[k] + poly_.rows[k][d] * x;
                    v = std::max(v, nxt[k]);
                }
                return v > cap_ ? Step::stop : Step::take;
            }
            case Mode::linear: {
                const auto& cur = rparts_[d];
                auto& nxt = rparts_[d + 1];
                double v = -std::numeric_limits<double>::infinity();
                if (model_.family() == Family::SupAffine) {
                    const auto terms = model_.terms();
                    for (std::size_t k = 0; k < terms.size(); ++k) {
                        nxt[k] = cur[k] + terms[k].weights[d] * x;
                        v = std::max(v, nxt[k] - terms[k].offset);
                    }
                } else {
                    nxt[0] = cur[0] + model_.lambda()[d] * x;
                    v = nxt[0];
                }
                return v > tau_ + slack_ ? Step::stop : Step::take;
            }
            case Mode::separable:
            case Mode::separable_min: {
                const double lam = model_.lambda()[d];
                rparts_[d + 1][0] = rparts_[d][0] + (2.0 * lam * x - std::log1p(2.0 * x));
                const double env = rparts_[d + 1][0] + tailmin_[d + 1];
                if (env <= tau_ + slack_) return Step::take;
                return x >= argmin_[d] ? Step::stop : Step::skip;
            }
            case Mode::factorial: {
                rparts_[d + 1][0] = rparts_[d][0] + model_.lambda()[d] * x;
                const double env = (2.0 - 2.0 * model_.margin()) * rparts_[d + 1][0];
                return env > tau_ + slack_ ? Step::stop : Step::take;
            }
        }
        return Step::stop;
    }

    template <class Visit>
    void recurse(std::size_t d, Visit& visit) {
        for (std::int32_t x = 0;; ++x) {
            const auto s = step(d, x);
            if (s == Step::stop) break;
            if (s == Step::skip) continue;
            nu_[d] = x;
            if (d + 1 == n_) leaf(visit);
            else recurse(d + 1, visit);
        }
        nu_[d] = 0;
    }

    template <class Visit>
    void leaf(Visit& visit) {
        if (mode_ == Mode::exact) {
            std::int64_t v = 0;
            for (auto p : iparts_[n_]) v = std::max(v, p);
            visit(std::span<const std::int32_t>(nu_), static_cast<double>(v) / static_cast<double>(poly_.denom), v);
            return;
        }
        real_.assign(nu_.begin(), nu_.end());
        const double b = b_unchecked(model_, real_);
        if (b <= tau_) visit(std::span<const std::int32_t>(nu_), b, std::int64_t{-1});
    }

    const BoundModel& model_;
    double tau_;
    double slack_ = 0.0;
    std::size_t n_;
    Mode mode_ = Mode::linear;
    ScaledPolytope poly_;
    std::int64_t cap_ = 0;
    std::vector<std::vector<std::int64_t>> iparts_;
    std::vector<std::vector<double>> rparts_;
    std::vector<std::int32_t> argmin_;
    std::vector<double> minval_;
    std::vector<double> tailmin_;
    std::vector<std::int32_t> nu_;
    std::vector<double> real_;
};

/// Runs a walker per first-coordinate subtree; fn(subtree_index, walker, first_value).
template <class Fn>
std::size_t for_each_subtree(const BoundModel& model, double tau, unsigned threads, Fn&& fn) {
    SuperlevelWalker probe(model, tau);
    const auto firsts = probe.first_values();
    parallel_for(firsts.size(), threads, [&](std::size_t i) {
        SuperlevelWalker w(model, tau);
        fn(i, w, firsts[i]);
    });
    return firsts.size();
}

inline void check_tau(double tau) {
    require(std::isfinite(tau), "tau must be finite");
    require(tau >= 0.0, "tau must be nonnegative");
}

}  // namespace detail

/// All lattice points with b(nu) <= tau, sorted by the total order.
inline IndexSet enumerate_superlevel(const BoundModel& model, double tau, const EnumerationOptions& opts = {}) {
    detail::check_tau(tau);
    detail::SuperlevelWalker probe(model, tau);
    const auto firsts = probe.first_values();
    std::vector<std::vector<Member>> parts(firsts.size());
    std::atomic<std::size_t> total{0};
    detail::parallel_for(firsts.size(), opts.threads, [&](std::size_t i) {
        detail::SuperlevelWalker w(model, tau);
        auto& out = parts[i];
        w.walk(firsts[i], [&](std::span<const std::int32_t> nu, double b, std::int64_t scaled) {
            if (total.fetch_add(1) + 1 > opts.max_members)
                throw ResourceError("member ceiling max_members=" + std::to_string(opts.max_members) + " exceeded");
            out.push_back(make_member(MultiIndex(std::vector<std::int32_t>(nu.begin(), nu.end())), b, scaled));
        });
    });
    std::vector<Member> members;
    members.reserve(total.load());
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(members));
    std::sort(members.begin(), members.end(), key_less);
    return {model.dimension(), std::move(members), probe.envelope()};
}

/// #{ nu : b(nu) <= tau }. Rational homogeneous models are counted without listing members.
inline std::uint64_t count_superlevel(const BoundModel& model, double tau, const EnumerationOptions& opts = {}) {
    detail::check_tau(tau);
    if (model.rational_homogeneous()) {
        const auto poly = model.scaled_polytope();
        LatticeCounter counter(poly.rows);
        return count_to_u64(counter.count(poly.capacity(tau)));
    }
    return enumerate_superlevel(model, tau, opts).size();
}

/// The first M lattice points under the total order (b, |nu|, lex).
inline IndexSet build_quasi_optimal(const BoundModel& model, std::size_t M, const EnumerationOptions& opts = {}) {
    detail::require(M >= 1, "M must be at least 1");
    if (M > opts.max_members)
        throw ResourceError("member ceiling max_members=" + std::to_string(opts.max_members) + " exceeded");
    const std::size_t n = model.dimension();

    if (!model.lattice_monotone()) {
        // No coordinate monotonicity: grow a superlevel set until it holds M points.
        double tau = 1.0;
        for (;;) {
            auto set = enumerate_superlevel(model, tau, opts);
            if (set.size() >= M) {
                std::vector<Member> head(set.members().begin(), set.members().begin() + static_cast<std::ptrdiff_t>(M));
                return {n, std::move(head), set.envelope()};
            }
            const double ratio = std::pow(static_cast<double>(M) / std::max<double>(1.0, static_cast<double>(set.size())),
                                          1.0 / static_cast<double>(n));
            tau *= std::clamp(1.2 * ratio, 1.25, 2.0);
        }
    }

    // Best-first search. nu + e_i is generated only from the parent obtained by lowering the
    // last nonzero entry, so every point enters the frontier once and after its parent.
    const bool exact = model.rational_homogeneous();
    ScaledPolytope poly;
    if (exact) poly = model.scaled_polytope();
    auto make = [&](MultiIndex nu) {
        if (exact) {
            const auto v = poly.value(nu.entries());
            return make_member(std::move(nu), static_cast<double>(v) / static_cast<double>(poly.denom), v);
        }
        const auto real = nu.as_real();
        const double b = detail::b_unchecked(model, real);
        return make_member(std::move(nu), b);
    };
    auto after = [](const Member& x, const Member& y) { return key_less(y, x); };
    std::priority_queue<Member, std::vector<Member>, decltype(after)> frontier(after);
    frontier.push(make(MultiIndex(n)));

    std::vector<Member> members;
    members.reserve(M);
    while (members.size() < M) {
        Member cur = frontier.top();
        frontier.pop();
        std::size_t last = 0;
        for (std::size_t i = n; i-- > 0;)
            if (cur.nu[i] != 0) {
                last = i;
                break;
            }
        for (std::size_t i = last; i < n; ++i) {
            MultiIndex child = cur.nu;
            child.increment(i);
            frontier.push(make(std::move(child)));
        }
        members.push_back(std::move(cur));
    }
    return {n, std::move(members), exact ? "exact_scaled_partial" : "partial_b"};
}

/// Counts #{ nu : b(nu) <= tau } for each tau of a nondecreasing list.
inline std::vector<std::pair<double, std::uint64_t>> cardinality_profile(const BoundModel& model,
                                                                         const std::vector<double>& taus,
                                                                         const EnumerationOptions& opts = {}) {
    for (std::size_t i = 0; i < taus.size(); ++i) {
        detail::check_tau(taus[i]);
        detail::require(i == 0 || taus[i - 1] <= taus[i], "tau list must be ascending");
    }
    std::vector<std::pair<double, std::uint64_t>> out;
    if (taus.empty()) return out;
    if (model.rational_homogeneous()) {
        const auto poly = model.scaled_polytope();
        LatticeCounter counter(poly.rows);
        for (double t : taus) out.emplace_back(t, count_to_u64(counter.count(poly.capacity(t))));
        return out;
    }
    const auto set = enumerate_superlevel(model, taus.back(), opts);
    for (double t : taus) {
        const auto it = std::upper_bound(set.members().begin(), set.members().end(), t,
                                         [](double v, const Member& m) { return v < m.b; });
        out.emplace_back(t, static_cast<std::uint64_t>(it - set.members().begin()));
    }
    return out;
}

}  // namespace qopt
