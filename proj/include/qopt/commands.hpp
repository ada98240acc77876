#pragma once

// Command implementations behind the qopt executable. Each command fills a Table that is
// rendered as CSV or JSON; estimate cells that cannot be evaluated stay empty and carry a reason.

#include "qopt/assumptions.hpp"
#include "qopt/ehrhart.hpp"
#include "qopt/estimates.hpp"
#include "qopt/min_cardinality.hpp"
#include "qopt/model_json.hpp"
#include "qopt/polytope.hpp"
#include "qopt/presets.hpp"
#include "qopt/tails.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qopt {

struct RunConfig {
    std::string model_spec;
    std::optional<BoundModel> model;
    std::vector<std::size_t> Ms;
    std::optional<std::pair<long, long>> levels;
    std::vector<double> eps{0.3, 1.0, 4.0};
    std::vector<double> p{0.3, 0.5, 0.7, 0.9};
    double xi = xi_max;
    double tol = 1e-12;
    std::string format = "csv";
    std::string out;
    std::uint32_t seed = 12345;
    unsigned threads = 1;
    std::optional<int> dim;  // sumjn exponent; model dimension, else 20
    std::optional<int> inject_period;
    std::string volume_method;
    int max_verify = 16;
    /// Box edge for the brute-force tail oracle in `check`; sized from the weights when unset.
    std::optional<int> oracle_box;
    double oracle_tol = 1e-10;

    [[nodiscard]] nlohmann::json to_json(const std::string& command) const {
        nlohmann::json doc;
        doc["command"] = command;
        doc["model_spec"] = model_spec;
        if (model) doc["model"] = model_to_json(*model);
        doc["M"] = Ms;
        if (levels) doc["levels"] = {levels->first, levels->second};
        doc["eps"] = eps;
        doc["p"] = p;
        doc["xi"] = xi;
        doc["tol"] = tol;
        doc["format"] = format;
        doc["seed"] = seed;
        doc["threads"] = threads;
        if (dim) doc["dim"] = *dim;
        if (inject_period) doc["inject_period"] = *inject_period;
        if (!volume_method.empty()) doc["volume_method"] = volume_method;
        doc["max_verify"] = max_verify;
        if (oracle_box) doc["oracle_box"] = *oracle_box;
        doc["oracle_tol"] = oracle_tol;
        return doc;
    }
};

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string>;

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

    void add(std::vector<Cell> row) {
        detail::require(row.size() == columns_.size(), "table row has wrong width");
        for (auto& c : row)
            if (auto* d = std::get_if<double>(&c); d && !std::isfinite(*d)) c = std::monostate{};
        rows_.push_back(std::move(row));
    }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) os << format_double(v);
                        else if constexpr (std::is_same_v<T, std::string>) os << v;
                        else if constexpr (!std::is_same_v<T, std::monostate>) os << v;
                    },
                    row[i]);
            }
            os << '\n';
        }
    }

    [[nodiscard]] nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& row : rows_) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t i = 0; i < row.size(); ++i)
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::monostate>) obj[columns_[i]] = nullptr;
                        else obj[columns_[i]] = v;
                    },
                    row[i]);
            arr.push_back(std::move(obj));
        }
        return arr;
    }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "json") os << to_json().dump(2) << '\n';
        else write_csv(os);
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

namespace detail {

/// Collects "column=reason" notes for cells left empty.
class Reasons {
public:
    void add(const std::string& column, const std::string& why) {
        if (!text_.empty()) text_ += ';';
        text_ += column + '=' + sanitize(why);
    }
    [[nodiscard]] Cell cell() const { return text_.empty() ? Cell{} : Cell{text_}; }

private:
    static std::string sanitize(std::string s) {
        for (auto& ch : s)
            if (ch == ',' || ch == ';' || ch == '\n' || ch == '"') ch = ' ';
        return s;
    }
    std::string text_;
};

/// Evaluates an estimate; failures and non-positive values become an empty cell plus a reason.
template <class Fn>
Cell estimate_cell(const std::string& column, Reasons& reasons, Fn&& fn) {
    try {
        const double v = fn();
        if (std::isfinite(v) && v > 0.0) return v;
        reasons.add(column, std::isfinite(v) ? "non_positive" : "non_finite");
    } catch (const DomainError& e) {
        reasons.add(column, std::string("out_of_regime: ") + e.what());
    } catch (const Error& e) {
        reasons.add(column, e.what());
    }
    return {};
}

inline std::string tag(const std::string& prefix, double v) { return prefix + format_double(v); }

inline const BoundModel& need_model(const RunConfig& cfg) {
    if (!cfg.model) throw ArgumentError("this command needs --model");
    return *cfg.model;
}

inline bool isotropic(const BoundModel& m) {
    if (m.family() != Family::WeightedLinear) return false;
    const auto l = m.lambda();
    return std::all_of(l.begin(), l.end(), [&](double x) { return x == l[0]; });
}

/// Homogeneous models in the sense of b(tau nu) = tau b(nu).
inline bool homogeneous(const BoundModel& m) { return m.homogeneous(); }

struct Geometry {
    std::optional<double> volume;
    std::string volume_reason;
    std::optional<int> q;
    std::string q_reason;
};

inline Geometry geometry(const BoundModel& m, const RunConfig& cfg) {
    Geometry g;
    if (m.rational_homogeneous()) {
        EhrhartOptions eo;
        eo.inject_period = cfg.inject_period;
        eo.max_verify = cfg.max_verify;
        const auto qp = ehrhart_fit(m, eo);
        g.volume = qp.volume();
        g.q = qp.q();
        return g;
    }
    g.q_reason = "needs a homogeneous model with rational weights";
    if (m.family() == Family::WeightedLinear || m.family() == Family::LegendreSqrt) {
        g.volume = volume(m, VolumeMethod::analytic_simplex).volume;
        return g;
    }
    try {
        VolumeOptions vo;
        vo.tol = 1e-6;
        vo.threads = cfg.threads;
        g.volume = volume(m, VolumeMethod::lattice_scaling, vo).volume;
    } catch (const Error& e) {
        g.volume_reason = e.what();
    }
    return g;
}

inline std::vector<std::int64_t> level_range(const RunConfig& cfg, long lo, long hi) {
    const auto [a, b] = cfg.levels.value_or(std::pair<long, long>{lo, hi});
    require(a >= 0 && a <= b, "levels must satisfy 0 <= J1 <= J2");
    std::vector<std::int64_t> out;
    for (long j = a; j <= b; ++j) out.push_back(j);
    return out;
}

}  // namespace detail

/// Exact tails next to every applicable estimate, one row per cardinality.
inline Table cmd_tail(const RunConfig& cfg) {
    const BoundModel& m = detail::need_model(cfg);
    const int n = static_cast<int>(m.dimension());
    const double pf = m.prefactor();
    for (double e : cfg.eps) detail::require(std::isfinite(e) && e > 0.0, "eps values must be positive");
    for (double p : cfg.p) detail::require(std::isfinite(p) && p > 0.0 && p < 1.0, "p values must lie in (0,1)");
    detail::require(cfg.xi > 0.0 && cfg.xi <= xi_max, "xi must lie in (0, (e-1)/e]");

    EnumerationOptions eo;
    eo.threads = cfg.threads;
    TailOptions to;
    to.tol = cfg.tol;
    to.enumeration = eo;

    std::vector<std::optional<std::int64_t>> level_of_row;
    std::vector<std::size_t> Ms;
    if (!cfg.Ms.empty()) {
        Ms = cfg.Ms;
        level_of_row.assign(Ms.size(), std::nullopt);
    } else {
        const auto levels = detail::level_range(cfg, 0, 30);
        Ms = level_cardinalities(m, levels, eo);
        for (auto j : levels) level_of_row.emplace_back(j);
    }
    for (auto M : Ms) detail::require(M >= 1, "M must be at least 1");

    const auto geo = detail::geometry(m, cfg);
    const bool iso = detail::isotropic(m);
    const bool linear = m.family() == Family::WeightedLinear;

    std::optional<double> sigma, max_pre;
    std::string pre_reason;
    if (detail::homogeneous(m)) {
        sigma = static_cast<double>(count_superlevel(m, 1.0, eo));
        max_pre = static_cast<double>(count_superlevel(m, static_cast<double>(n), eo));
    } else {
        pre_reason = "needs a homogeneous model";
    }

    std::vector<std::string> cols{"J", "M", "exact", "exact_abs_error"};
    for (double e : cfg.eps) cols.push_back(detail::tag("upper_eps", e));
    cols.push_back("lower");
    for (double p : cfg.p) cols.push_back(detail::tag("stechkin_p", p));
    cols.push_back(detail::tag("optim_xi", cfg.xi));
    cols.push_back("preasym");
    if (iso) {
        for (double p : cfg.p) cols.push_back(detail::tag("iso_stechkin_p", p));
        cols.push_back("iso_optim");
        cols.push_back("complex");
    }
    cols.push_back("reason");
    Table table(cols);

    const auto tails = exact_tails(m, Ms, to);
    for (std::size_t r = 0; r < Ms.size(); ++r) {
        const double M = static_cast<double>(Ms[r]);
        detail::Reasons why;
        std::vector<Cell> row;
        row.push_back(level_of_row[r] ? Cell{*level_of_row[r]} : Cell{});
        row.push_back(static_cast<std::uint64_t>(Ms[r]));
        row.push_back(tails[r].tail);
        row.push_back(tails[r].abs_error_bound);
        for (double e : cfg.eps) {
            const auto col = detail::tag("upper_eps", e);
            if (!geo.volume) {
                why.add(col, geo.volume_reason);
                row.emplace_back();
                continue;
            }
            row.push_back(detail::estimate_cell(col, why, [&] { return pf * upper_asymptotic(M, n, *geo.volume, e); }));
        }
        if (geo.volume && geo.q) row.push_back(detail::estimate_cell("lower", why, [&] { return pf * lower_asymptotic(M, n, *geo.volume, *geo.q); }));
        else {
            why.add("lower", geo.q ? geo.volume_reason : geo.q_reason);
            row.emplace_back();
        }
        for (double p : cfg.p) {
            const auto col = detail::tag("stechkin_p", p);
            if (!linear) {
                why.add(col, "needs WeightedLinear");
                row.emplace_back();
                continue;
            }
            row.push_back(detail::estimate_cell(col, why, [&] { return pf * stechkin(M, m.lambda(), p); }));
        }
        {
            const auto col = detail::tag("optim_xi", cfg.xi);
            if (linear) row.push_back(detail::estimate_cell(col, why, [&] { return pf * stechkin_optimized(M, m.lambda(), cfg.xi); }));
            else {
                why.add(col, "needs WeightedLinear");
                row.emplace_back();
            }
        }
        if (sigma) row.push_back(detail::estimate_cell("preasym", why, [&] { return pf * pre_asymptotic_tail_bound(M, n, *sigma, *max_pre); }));
        else {
            why.add("preasym", pre_reason);
            row.emplace_back();
        }
        if (iso) {
            const double lam = m.lambda()[0];
            for (double p : cfg.p)
                row.push_back(detail::estimate_cell(detail::tag("iso_stechkin_p", p), why, [&] { return pf * iso_stechkin(M, n, lam, p); }));
            row.push_back(detail::estimate_cell("iso_optim", why, [&] { return pf * iso_optimized(M, n, lam); }));
            row.push_back(detail::estimate_cell("complex", why, [&] { return pf * complex_bound(M, n, lam); }));
        }
        row.push_back(why.cell());
        table.add(std::move(row));
    }
    return table;
}

/// Delta_eps, J_eps, M_eps, J'_eps, M'_eps per epsilon.
inline Table cmd_mincard(const RunConfig& cfg) {
    const BoundModel& m = detail::need_model(cfg);
    EhrhartOptions eo;
    eo.inject_period = cfg.inject_period;
    eo.max_verify = cfg.max_verify;
    const auto qp = ehrhart_fit(m, eo);
    Table table({"eps", "Delta_eps", "J_eps", "M_eps", "Jp_eps", "Mp_eps", "rate_factor"});
    for (double e : cfg.eps) {
        const auto mc = min_cardinality(m, e, qp);
        table.add({e, mc.delta, mc.J_eps, mc.M_eps, mc.Jp_eps, mc.Mp_eps, mc.rate_factor});
    }
    return table;
}

/// sum_{j>=J} j^N e^{-j} against the L = N+1 bound and the pre-asymptotic bound.
inline Table cmd_sumjn(const RunConfig& cfg) {
    const int n = cfg.dim ? *cfg.dim : cfg.model ? static_cast<int>(cfg.model->dimension()) : 20;
    detail::require(n >= 1, "--dim must be at least 1");
    const auto levels = detail::level_range(cfg, 1, 40);
    Table table({"J", "exact", "asym_bound", "preasym_bound", "reason"});
    for (auto J : levels) {
        detail::Reasons why;
        std::vector<Cell> row{J, sum_jN_exact(J, n)};
        row.push_back(detail::estimate_cell("asym_bound", why, [&] { return sum_jN_bound(static_cast<double>(J), n, n + 1.0); }));
        row.push_back(detail::estimate_cell("preasym_bound", why, [&] { return pre_asymptotic_sum_bound(J, n); }));
        row.push_back(why.cell());
        table.add(std::move(row));
    }
    return table;
}

inline nlohmann::json cmd_ehrhart(const RunConfig& cfg) {
    const BoundModel& m = detail::need_model(cfg);
    EhrhartOptions eo;
    eo.inject_period = cfg.inject_period;
    eo.max_verify = cfg.max_verify;
    return ehrhart_fit(m, eo).to_json();
}

inline Table ehrhart_table(const nlohmann::json& doc) {
    const int n = doc["N"].get<int>();
    std::vector<std::string> cols{"residue"};
    for (int i = 0; i <= n; ++i) cols.push_back("c_" + std::to_string(i));
    Table t(cols);
    std::int64_t r = 0;
    for (const auto& row : doc["rows_exact"]) {
        std::vector<Cell> cells{r++};
        for (const auto& c : row) cells.emplace_back(c.get<std::string>());
        t.add(std::move(cells));
    }
    return t;
}

inline Table cmd_volume(const RunConfig& cfg) {
    const BoundModel& m = detail::need_model(cfg);
    VolumeMethod method;
    if (!cfg.volume_method.empty()) method = volume_method_from_string(cfg.volume_method);
    else method = (m.family() == Family::WeightedLinear || m.family() == Family::LegendreSqrt)
                      ? VolumeMethod::analytic_simplex
                      : VolumeMethod::lattice_scaling;
    VolumeOptions vo;
    vo.threads = cfg.threads;
    if (cfg.tol != 1e-12) vo.tol = cfg.tol;
    const auto ls = volume(m, method, vo);
    Table t({"method", "volume", "tau_used", "error_estimate"});
    t.add({std::string(to_string(ls.method)), ls.volume, ls.tau_used, ls.error_estimate});
    return t;
}

namespace detail {

struct BoxTails {
    int edge = 0;
    std::vector<double> tails;
};

/// Tails from a brute-force sum over [0, edge]^N for a WeightedLinear model. The default
/// edge leaves less than 1e-14 of the total outside the box.
inline BoxTails box_tails(const BoundModel& m, const std::vector<std::size_t>& Ms, std::optional<int> edge) {
    const std::size_t n = m.dimension();
    const auto lam = m.lambda();
    BoxTails out;
    if (edge) {
        require(*edge >= 0, "oracle box edge must be nonnegative");
        out.edge = *edge;
    } else {
        double log_total = 0.0;
        for (double l : lam) log_total -= std::log(-std::expm1(-l));
        for (double l : lam)
            out.edge = std::max(out.edge, static_cast<int>(std::ceil((log_total - std::log(1e-14 * -std::expm1(-l) / n)) / l)));
    }
    std::vector<Member> terms;
    std::vector<MultiIndex::value_type> nu(n, 0);
    for (;;) {
        MultiIndex idx(std::vector<MultiIndex::value_type>(nu.begin(), nu.end()));
        terms.push_back(make_member(idx, eval_b(m, idx.as_real())));
        std::size_t d = 0;
        while (d < n && nu[d] == out.edge) nu[d++] = 0;
        if (d == n) break;
        ++nu[d];
    }
    std::sort(terms.begin(), terms.end(), key_less);
    CompensatedSum total;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) total += std::exp(-it->b);
    for (auto M : Ms) {
        CompensatedSum head;
        for (std::size_t i = std::min(M, terms.size()); i-- > 0;) head += std::exp(-terms[i].b);
        out.tails.push_back(m.prefactor() * (total.value() - head.value()));
    }
    return out;
}

/// Invariant checks for one model; throws ConsistencyError on the first violation.
inline nlohmann::json check_model(const std::string& name, const BoundModel& m, const RunConfig& cfg) {
    nlohmann::json rep;
    rep["model"] = name;
    const auto assumptions = check_assumptions(m, 8, {1.0, 2.0, 4.0, 8.0, 16.0}, {cfg.seed});
    rep["assumptions"] = assumptions.to_json();
    if (!m.rational_homogeneous()) return rep;

    EhrhartOptions eo;
    eo.inject_period = cfg.inject_period;
    eo.max_verify = cfg.max_verify;
    const auto qp = ehrhart_fit(m, eo);
    rep["q"] = qp.q();
    rep["volume"] = qp.volume();
    rep["vertex_count"] = qp.vertex_count();

    const auto poly = m.scaled_polytope();
    LatticeCounter counter(poly.rows);
    const double sigma = count_to_double(counter.count(poly.denom));
    const int n = qp.N();
    for (std::int64_t j = 0; j <= (n + 1) * qp.q(); ++j) {
        const double c = count_to_double(counter.count(j * poly.denom));
        const double jn = std::pow(static_cast<double>(j), n);
        if (c < qp.volume() * jn * (1.0 - 1e-12))
            throw ConsistencyError(name + ": count below |P| j^N at j=" + std::to_string(j));
        if (j >= 1 && c > sigma * jn * (1.0 + 1e-12))
            throw ConsistencyError(name + ": count above sigma j^N at j=" + std::to_string(j));
    }
    if (m.family() == Family::WeightedLinear) {
        const double analytic = volume(m, VolumeMethod::analytic_simplex).volume;
        if (std::abs(analytic - qp.volume()) > 1e-9 * analytic)
            throw ConsistencyError(name + ": Ehrhart leading coefficient differs from the analytic volume");
        if (m.dimension() <= 4) {
            const std::vector<std::size_t> Ms{1, 5, 20, 60};
            TailOptions to;
            to.tol = cfg.tol;
            const auto counted = exact_tails(m, Ms, to);
            // Same weights without the rational form, summed by enumeration.
            const auto real = BoundModel::weighted_linear(std::vector<double>(m.lambda().begin(), m.lambda().end()));
            const auto enumerated = exact_tails(real, Ms, to);
            const auto box = box_tails(m, Ms, cfg.oracle_box);
            for (std::size_t i = 0; i < Ms.size(); ++i) {
                const double slack = cfg.oracle_tol + counted[i].abs_error_bound;
                if (std::abs(counted[i].tail - enumerated[i].tail) > slack + enumerated[i].abs_error_bound)
                    throw ConsistencyError(name + ": counted and enumerated tails differ at M=" + std::to_string(Ms[i]));
                if (std::abs(counted[i].tail - box.tails[i]) > slack)
                    throw ConsistencyError(name + ": box oracle (edge " + std::to_string(box.edge) +
                                           ") differs from the tail at M=" + std::to_string(Ms[i]));
            }
            rep["tail_oracle"] = {{"M", Ms}, {"box_edge", box.edge}};
        }
    }
    rep["status"] = "ok";
    return rep;
}

}  // namespace detail

/// Runs the invariant checks on --model, or on every preset when none is given.
inline nlohmann::json cmd_check(const RunConfig& cfg) {
    nlohmann::json doc;
    auto models = nlohmann::json::array();
    if (cfg.model) models.push_back(detail::check_model(cfg.model_spec, *cfg.model, cfg));
    else
        for (const auto& p : presets) models.push_back(detail::check_model(std::string(p.name), preset_model(p.name), cfg));
    doc["models"] = std::move(models);
    doc["status"] = "ok";
    return doc;
}

}  // namespace qopt
