// Acceptance suite. Prints one PASS/FAIL line per criterion; `acceptance K` runs criterion K only.

#include "qopt/commands.hpp"
#include "qopt/qopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace qopt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) { return format_sci(x, 4); }

struct LevelRow {
    std::int64_t J;
    std::size_t M;
    double exact;
};

std::vector<LevelRow> p2_levels(std::int64_t hi) {
    const auto m = preset_model("P2");
    std::vector<std::int64_t> levels;
    for (std::int64_t j = 0; j <= hi; ++j) levels.push_back(j);
    const auto Ms = level_cardinalities(m, levels);
    const auto tails = exact_tails(m, Ms);
    std::vector<LevelRow> out;
    for (std::size_t i = 0; i < levels.size(); ++i) out.push_back({levels[i], Ms[i], tails[i].tail});
    return out;
}

// 1. lower <= exact <= upper(0.3) on P2 levels, exact <= upper(1), upper(4) from M_eps on.
Outcome sandwich() {
    const auto t0 = Clock::now();
    const auto m = preset_model("P2");
    const auto qp = ehrhart_fit(m);
    const double vol = qp.volume();
    const int n = 4;
    const auto floor_j = static_cast<std::int64_t>(std::ceil(2.0 / std::expm1(0.25)));
    const auto rows = p2_levels(40);
    int bad = 0, checked = 0;
    std::ostringstream why;
    for (const auto& r : rows) {
        if (r.J < floor_j) continue;
        const double M = static_cast<double>(r.M);
        const double lo = lower_asymptotic(M, n, vol, qp.q());
        const double up = upper_asymptotic(M, n, vol, 0.3);
        ++checked;
        if (!(lo <= r.exact && r.exact <= up)) {
            ++bad;
            why << " J=" << r.J;
        }
    }
    std::ostringstream extra;
    for (double eps : {1.0, 4.0}) {
        const auto mc = min_cardinality(m, eps, qp);
        int n_eps = 0;
        for (const auto& r : rows) {
            if (r.M < mc.M_eps) continue;
            ++n_eps;
            if (r.exact > upper_asymptotic(static_cast<double>(r.M), n, vol, eps)) {
                ++bad;
                why << " eps=" << eps << ",J=" << r.J;
            }
        }
        extra << " eps=" << eps << ":M_eps=" << mc.M_eps << "(" << n_eps << " levels)";
    }
    const double secs = seconds_since(t0);
    const auto d03 = min_cardinality(m, 0.3, qp).delta;
    std::ostringstream os;
    os << "levels J=" << floor_j << ".." << 40 << " (" << checked << " rows), Delta_0.3=" << d03 << extra.str()
       << ", violations=" << bad << why.str() << ", " << fmt(secs) << " s";
    return {bad == 0 && secs < 60.0, os.str()};
}

// Per-coordinate bound B with b(nu) > T whenever some nu_i > B.
std::vector<int> box_edges(const BoundModel& m, double T) {
    const std::size_t n = m.dimension();
    std::vector<int> out(n);
    switch (m.family()) {
        case Family::WeightedLinear:
            for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(std::floor(T / m.lambda()[i]));
            break;
        case Family::SupAffine:
            for (std::size_t i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& t : m.terms()) best = std::min(best, (T + t.offset) / t.weights[i]);
                out[i] = static_cast<int>(std::floor(best));
            }
            break;
        case Family::LegendreSqrt: {
            // each coordinate term is bounded below by its minimum over [0, inf)
            double floor_sum = 0.0;
            for (double l : m.lambda()) floor_sum += l < 1.0 ? (1.0 - l) + std::log(l) : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double l = m.lambda()[i];
                const double own = l < 1.0 ? (1.0 - l) + std::log(l) : 0.0;
                const double rest = floor_sum - own;
                int x = 0;
                for (int k = 0;; ++k) {
                    if (2.0 * l * k - std::log(2.0 * k + 1.0) + rest > T && 2.0 * l * (2.0 * k + 1.0) > 2.0) break;
                    x = k + 1;
                }
                out[i] = x;
            }
            break;
        }
        case Family::FactorialAlpha:
            // b >= 2(1-p) lambda . nu whenever sum alpha^p <= 1
            for (std::size_t i = 0; i < n; ++i)
                out[i] = static_cast<int>(std::floor(T / (2.0 * (1.0 - m.margin()) * m.lambda()[i])));
            break;
    }
    return out;
}

struct BoxSum {
    double total = 0.0;
    std::vector<double> sorted_terms;  // ascending b
    std::vector<double> b_values;
    std::size_t points = 0;

    std::size_t below(double T) const {
        return static_cast<std::size_t>(std::upper_bound(b_values.begin(), b_values.end(), T) - b_values.begin());
    }
};

BoxSum box_sum(const BoundModel& m, const std::vector<int>& edge) {
    const std::size_t n = m.dimension();
    std::vector<Member> terms;
    std::vector<MultiIndex::value_type> nu(n, 0);
    for (;;) {
        MultiIndex idx(std::vector<MultiIndex::value_type>(nu.begin(), nu.end()));
        terms.push_back(make_member(idx, eval_b(m, idx.as_real())));
        std::size_t d = 0;
        while (d < n && nu[d] == edge[d]) nu[d++] = 0;
        if (d == n) break;
        ++nu[d];
    }
    std::sort(terms.begin(), terms.end(), key_less);
    BoxSum out;
    out.points = terms.size();
    CompensatedSum acc;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) acc += std::exp(-it->b);
    out.total = acc.value();
    for (const auto& t : terms) {
        out.sorted_terms.push_back(std::exp(-t.b));
        out.b_values.push_back(t.b);
    }
    return out;
}

// 2. exact_tail against brute-force box sums, all families, N <= 3.
Outcome oracles() {
    const auto t0 = Clock::now();
    std::vector<std::pair<std::string, BoundModel>> models{
        {"linear1", BoundModel::weighted_linear(std::vector<double>{0.8})},
        {"linear3", BoundModel::weighted_linear(std::vector<double>{0.7, 1.1, 1.9})},
        {"linear3q", BoundModel::weighted_linear(std::vector<Ratio>{{1, 1}, {3, 2}, {2, 1}})},
        {"sup2", BoundModel::sup_affine({{0.4, {1.0, 0.5}, std::nullopt}, {0.1, {0.45, 1.1}, std::nullopt}})},
        {"sup3", BoundModel::sup_affine({{0.0, {0.9, 0.9, 0.9}, std::nullopt}, {0.7, {1.3, 0.6, 1.0}, std::nullopt}})},
        {"legendre2", BoundModel::legendre_sqrt({0.35, 1.2})},
        {"legendre3", BoundModel::legendre_sqrt({0.6, 0.9, 1.5})},
        {"factorial2", BoundModel::factorial_alpha({0.25, 0.25})},
        {"factorial3", BoundModel::factorial_alpha({0.3, 0.2, 0.25})},
    };
    const std::vector<std::size_t> Ms{1, 2, 7, 25, 100, 400};
    double worst = 0.0;
    std::string worst_model;
    std::size_t points = 0;
    for (const auto& [name, m] : models) {
        // the box must also hold every term ranked up to the largest M
        double T = envelope_level(m, 1e-13);
        auto box = box_sum(m, box_edges(m, T));
        while (box.below(T) < Ms.back()) {
            T += 1.0;
            box = box_sum(m, box_edges(m, T));
        }
        points += box.points;
        const auto tails = exact_tails(m, Ms);
        for (std::size_t i = 0; i < Ms.size(); ++i) {
            CompensatedSum head;
            for (std::size_t k = Ms[i]; k-- > 0;) head += box.sorted_terms[k];
            const double diff = std::abs(tails[i].tail - (box.total - head.value()));
            if (diff > worst) {
                worst = diff;
                worst_model = name;
            }
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << models.size() << " models, " << points << " box points, max |diff|=" << fmt(worst) << " (" << worst_model
       << "), " << fmt(secs) << " s";
    return {worst <= 1e-10 && secs < 120.0, os.str()};
}

// 3. Ehrhart fits: held-out integer equality, leading coefficient against the volume.
Outcome ehrhart() {
    int failures = 0;
    std::ostringstream os;
    for (const auto& p : presets) {
        const auto m = preset_model(p.name);
        const auto qp = ehrhart_fit(m);
        const auto poly = m.scaled_polytope();
        LatticeCounter counter(poly.rows);
        const std::int64_t n = static_cast<std::int64_t>(m.dimension());
        // held out: beyond both the fitting nodes and the fitter's own verification window
        const std::int64_t start = (n + 1) * qp.q() + std::max<std::int64_t>(EhrhartOptions{}.max_verify, 2 * qp.q()) + 1;
        const std::int64_t count = std::max<std::int64_t>(2 * qp.q(), 8);
        for (std::int64_t j = start; j < start + count; ++j)
            if (qp.evaluate(j) != detail::to_big(counter.count(j * poly.denom))) ++failures;
        double ref = 0.0, rel = 0.0, tol = 0.0;
        std::string how;
        if (m.family() == Family::WeightedLinear) {
            ref = volume(m, VolumeMethod::analytic_simplex).volume;
            tol = 1e-9;
            how = "analytic";
        } else {
            VolumeOptions vo;
            vo.tol = 1e-3;
            ref = volume(m, VolumeMethod::lattice_scaling, vo).volume;
            tol = 1e-3;
            how = "scaling";
        }
        rel = std::abs(qp.volume() - ref) / ref;
        if (rel > tol) ++failures;
        os << ' ' << p.name << ":q=" << qp.q() << ",held_out=" << count << "," << how << "_rel=" << fmt(rel);
    }
    const auto qp = ehrhart_fit(preset_model("P3"));
    for (int j = 0; j <= 25; ++j) {
        BigInt c = 1;
        for (int i = 1; i <= 8; ++i) c = c * (j + i) / i;
        if (qp.evaluate(j) != c) ++failures;
    }
    os << " simplex_binomial_j<=25";
    return {failures == 0, "failures=" + std::to_string(failures) + os.str()};
}

// 4. j^N e^-j sandwich.
Outcome jn_sandwich() {
    int violations = 0, lower_checks = 0, upper_checks = 0;
    for (int N : {1, 2, 4, 8, 20}) {
        for (long J = 1; J <= 3L * N; ++J) {
            const double exact = sum_jN_exact(J, N);
            ++lower_checks;
            if (sum_jN_lower(static_cast<double>(J), N) > exact) ++violations;
            for (double L : {2.0, N + 1.0}) {
                if (L <= 1.0 || static_cast<double>(J) < sum_jN_threshold(N, L)) continue;
                ++upper_checks;
                if (exact > sum_jN_bound(static_cast<double>(J), N, L)) ++violations;
            }
        }
    }
    std::ostringstream os;
    os << "lower checks=" << lower_checks << ", upper checks=" << upper_checks << ", violations=" << violations;
    return {violations == 0 && upper_checks > 0, os.str()};
}

// 5. Pre-asymptotic dominance for N = 20.
Outcome preasymptotic() {
    constexpr int N = 20;
    // frozen from the first run: the worst ratio for J <= 5 was 1 + 6.5e-9
    constexpr double ratio_limit = 1.0 + 1e-6;
    const double li = polylog_neg(N, std::exp(-1.0));
    int bad = 0;
    double worst_ratio = 0.0;
    for (long J = 1; J <= 21; ++J) {
        // bound - exact = sum_{j<J} j^N e^{-j} - (J-1)^{N+1}/(N+1) e^{-(J-1)(N+1)/(N+2)}, free of cancellation
        CompensatedSum head;
        for (long j = 1; j < J; ++j) head += std::exp(N * std::log(static_cast<double>(j)) - j);
        const double jm = static_cast<double>(J - 1);
        const double sub = jm == 0.0 ? 0.0 : std::exp((N + 1.0) * std::log(jm) - jm * (N + 1.0) / (N + 2.0)) / (N + 1.0);
        if (head.value() < sub) ++bad;
        const double bound = pre_asymptotic_sum_bound(J, N);
        const double exact = sum_jN_exact(J, N);
        if (std::abs(bound - (li - sub)) > 1e-15 * li) ++bad;
        if (J <= 5) worst_ratio = std::max(worst_ratio, bound / exact);
    }
    std::ostringstream os;
    os << "J=1..21 dominance violations=" << bad << ", max ratio J<=5 = 1+" << fmt(worst_ratio - 1.0)
       << " (limit 1+" << fmt(ratio_limit - 1.0) << ")";
    return {bad == 0 && worst_ratio <= ratio_limit, os.str()};
}

// 6. Stechkin dominance and the crossover level.
Outcome stechkin_cross() {
    const auto m = preset_model("P2");
    const auto qp = ehrhart_fit(m);
    const auto rows = p2_levels(40);
    const std::vector<double> ps{0.3, 0.5, 0.7, 0.9};
    int bad = 0, checked = 0;
    auto dominated = [&](std::size_t M, double exact) {
        for (double p : ps) {
            ++checked;
            if (stechkin(static_cast<double>(M), m.lambda(), p) < exact) ++bad;
        }
    };
    for (const auto& r : rows) dominated(r.M, r.exact);
    const std::vector<std::size_t> between{2, 5, 10, 50, 200, 1000, 4000, 10000};
    const auto tails = exact_tails(m, between);
    for (std::size_t i = 0; i < between.size(); ++i) dominated(between[i], tails[i].tail);

    std::int64_t cross = -1;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        double best = std::numeric_limits<double>::infinity();
        for (double p : ps) best = std::min(best, stechkin(static_cast<double>(it->M), m.lambda(), p));
        if (!(upper_asymptotic(static_cast<double>(it->M), 4, qp.volume(), 0.3) < best)) break;
        cross = it->J;
    }
    std::ostringstream os;
    os << "dominance checks=" << checked << ", violations=" << bad << ", J_cross=" << cross;
    return {bad == 0 && cross >= 0, os.str()};
}

// 7. Empirical minimum cardinalities against the target orders of magnitude (10^3 at eps=0.3, 10^0 at eps=4).
Outcome orders() {
    const auto m = preset_model("P2");
    const double vol = ehrhart_fit(m).volume();
    const auto rows = p2_levels(40);
    auto empirical = [&](double eps) {
        std::int64_t first = -1;
        for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
            if (it->exact > upper_asymptotic(static_cast<double>(it->M), 4, vol, eps)) break;
            first = it->J;
        }
        return first;
    };
    auto nearest = [&](double target) {
        std::int64_t best = 0;
        for (const auto& r : rows)
            if (std::abs(std::log10(static_cast<double>(r.M)) - std::log10(target)) <
                std::abs(std::log10(static_cast<double>(rows[static_cast<std::size_t>(best)].M)) - std::log10(target)))
                best = r.J;
        return best;
    };
    const auto j03 = empirical(0.3), j4 = empirical(4.0);
    const auto t03 = nearest(1e3), t4 = nearest(1.0);
    const bool ok03 = j03 >= 0 && std::abs(j03 - t03) <= 1;
    const bool ok4 = j4 >= 0 && std::abs(j4 - t4) <= 1;
    std::ostringstream os;
    os << "eps=0.3: empirical J=" << j03 << " (M=" << rows[static_cast<std::size_t>(std::max<std::int64_t>(j03, 0))].M
       << ") vs level J=" << t03 << " (M=" << rows[static_cast<std::size_t>(t03)].M << ") " << (ok03 ? "ok" : "MISMATCH")
       << "; eps=4: empirical J=" << j4 << " (M=" << rows[static_cast<std::size_t>(std::max<std::int64_t>(j4, 0))].M
       << ") vs level J=" << t4 << " (M=" << rows[static_cast<std::size_t>(t4)].M << ") " << (ok4 ? "ok" : "MISMATCH");
    return {ok03 && ok4, os.str()};
}

// Downward-closed sets of size M in two dimensions are Young diagrams: column heights
// h_0 >= h_1 >= ... summing to M.
void partitions(int left, int cap, std::vector<int>& parts, const std::function<void(const std::vector<int>&)>& visit) {
    if (left == 0) {
        visit(parts);
        return;
    }
    for (int h = std::min(left, cap); h >= 1; --h) {
        parts.push_back(h);
        partitions(left - h, h, parts, visit);
        parts.pop_back();
    }
}

// 8. Exhaustive optimality for N = 2, M <= 6.
Outcome small_optimality() {
    const auto t0 = Clock::now();
    const std::vector<double> grid{0.3, 0.7, 1.0, 1.6, 2.5};
    int bad = 0, sets = 0;
    for (double l1 : grid)
        for (double l2 : grid) {
            const auto m = BoundModel::weighted_linear(std::vector<double>{l1, l2});
            for (std::size_t M = 1; M <= 6; ++M) {
                double head_q = 0.0;
                for (const auto& mem : build_quasi_optimal(m, M).members()) head_q += std::exp(-mem.b);
                std::vector<int> parts;
                partitions(static_cast<int>(M), static_cast<int>(M), parts, [&](const std::vector<int>& cols) {
                    ++sets;
                    double head = 0.0;
                    for (std::size_t c = 0; c < cols.size(); ++c)
                        for (int r = 0; r < cols[c]; ++r) head += std::exp(-(l1 * static_cast<double>(c) + l2 * r));
                    // larger head means smaller bound-tail; ties allowed
                    if (head > head_q * (1.0 + 1e-14)) ++bad;
                });
            }
        }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << grid.size() * grid.size() << " models, " << sets << " lower sets, better sets found=" << bad << ", " << fmt(secs)
       << " s";
    return {bad == 0 && secs < 10.0, os.str()};
}

// 9. Byte-identical CSV across worker counts.
Outcome determinism() {
    RunConfig cfg;
    cfg.model_spec = "P2";
    cfg.model = preset_model("P2");
    std::vector<std::string> outs;
    for (unsigned threads : {1u, 8u, 1u, 8u}) {
        cfg.threads = threads;
        std::ostringstream os;
        cmd_tail(cfg).write_csv(os);
        outs.push_back(os.str());
    }
    const bool same = std::all_of(outs.begin(), outs.end(), [&](const std::string& s) { return s == outs.front(); });
    return {same && !outs.front().empty(), std::to_string(outs.front().size()) + " bytes, runs 1/8/1/8 threads " +
                                               (same ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
        {1, {"sandwich on P2 levels", sandwich}},
        {2, {"exact tails vs box sums", oracles}},
        {3, {"Ehrhart exactness", ehrhart}},
        {4, {"j^N e^-j sandwich", jn_sandwich}},
        {5, {"pre-asymptotic dominance", preasymptotic}},
        {6, {"Stechkin dominance and crossover", stechkin_cross}},
        {7, {"minimum cardinality orders", orders}},
        {8, {"small-instance optimality", small_optimality}},
        {9, {"determinism across threads", determinism}},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
    if (which.empty())
        for (const auto& [k, v] : criteria) which.push_back(k);
    bool all = true;
    for (int k : which) {
        const auto it = criteria.find(k);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << k << '\n';
            return 2;
        }
        Outcome o;
        try {
            o = it->second.second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << k << " [" << it->second.first << "] " << (o.pass ? "PASS" : "FAIL") << ": " << o.detail
                  << std::endl;
    }
    return all ? 0 : 1;
}
