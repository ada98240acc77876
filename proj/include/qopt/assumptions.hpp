#pragma once

// Empirical check of linear growth of b and of the monotonicity of H_nu(tau) = b(tau nu)/tau.

#include "qopt/bound_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qopt {

enum class Trend { increasing, decreasing, constant, mixed };

inline std::string_view to_string(Trend t) {
    switch (t) {
        case Trend::increasing: return "increasing";
        case Trend::decreasing: return "decreasing";
        case Trend::constant: return "constant";
        case Trend::mixed: return "mixed";
    }
    return "?";
}

struct DirectionTrend {
    std::vector<double> direction;
    Trend trend = Trend::constant;
};

struct AssumptionReport {
    double b_at_zero = 0.0;
    double zero_deviation = 0.0;
    double c_est = 0.0;
    double C_est = 0.0;
    std::size_t shell_points = 0;
    bool shell_sampled = false;
    std::vector<DirectionTrend> directions;
    Trend classification = Trend::constant;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json doc;
        doc["b_at_zero"] = b_at_zero;
        doc["zero_deviation"] = zero_deviation;
        doc["c_est"] = c_est;
        doc["C_est"] = C_est;
        doc["shell_points"] = shell_points;
        doc["shell_sampled"] = shell_sampled;
        doc["H_classification"] = std::string(to_string(classification));
        auto dirs = nlohmann::json::array();
        for (const auto& d : directions)
            dirs.push_back({{"direction", d.direction}, {"trend", std::string(to_string(d.trend))}});
        doc["directions"] = std::move(dirs);
        return doc;
    }
};

struct AssumptionOptions {
    std::uint32_t seed = 12345;
    int random_directions = 16;
    std::size_t max_shell_points = 1'000'000;
    std::size_t shell_samples = 100'000;
};

namespace detail {

inline Trend classify(const std::vector<double>& h) {
    bool up = false, down = false;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double scale = std::max({1.0, std::abs(h[i]), std::abs(h[i - 1])});
        const double d = h[i] - h[i - 1];
        if (d > 1e-12 * scale) up = true;
        else if (d < -1e-12 * scale) down = true;
    }
    if (up && down) return Trend::mixed;
    if (up) return Trend::increasing;
    if (down) return Trend::decreasing;
    return Trend::constant;
}

inline Trend combine(Trend a, Trend b) {
    if (a == b) return a;
    if (a == Trend::constant) return b;
    if (b == Trend::constant) return a;
    return Trend::mixed;
}

inline double binomial_estimate(std::int64_t n, std::int64_t k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace detail

inline AssumptionReport check_assumptions(const BoundModel& model, int box_radius, const std::vector<double>& tau_grid,
                                          const AssumptionOptions& opts = {}) {
    detail::require(box_radius >= 2, "box_radius must be at least 2");
    detail::require(tau_grid.size() >= 2, "tau_grid needs at least two values");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        detail::require(std::isfinite(tau_grid[i]) && tau_grid[i] > 0.0, "tau_grid values must be positive");
        detail::require(i == 0 || tau_grid[i] > tau_grid[i - 1], "tau_grid must be strictly increasing");
    }
    const std::size_t n = model.dimension();
    AssumptionReport rep;
    const std::vector<double> zero(n, 0.0);
    rep.b_at_zero = eval_b(model, zero);
    rep.zero_deviation = std::abs(rep.b_at_zero);

    std::mt19937 rng(opts.seed);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<double> nu(n, 0.0);
    auto visit = [&] {
        const double r = detail::b_unchecked(model, nu) / box_radius;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++rep.shell_points;
    };
    const double shell_size = detail::binomial_estimate(box_radius + static_cast<std::int64_t>(n) - 1,
                                                        static_cast<std::int64_t>(n) - 1);
    if (shell_size <= static_cast<double>(opts.max_shell_points)) {
        auto rec = [&](auto&& self, std::size_t d, int left) -> void {
            if (d + 1 == n) {
                nu[d] = left;
                visit();
                return;
            }
            for (int x = 0; x <= left; ++x) {
                nu[d] = x;
                self(self, d + 1, left - x);
            }
        };
        rec(rec, 0, box_radius);
    } else {
        // Uniform compositions via stars and bars.
        rep.shell_sampled = true;
        std::uniform_int_distribution<int> pos(0, box_radius + static_cast<int>(n) - 2);
        for (std::size_t s = 0; s < opts.shell_samples; ++s) {
            std::vector<int> cut;
            while (cut.size() < n - 1) {
                const int p = pos(rng);
                if (std::find(cut.begin(), cut.end(), p) == cut.end()) cut.push_back(p);
            }
            std::sort(cut.begin(), cut.end());
            int prev = -1;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                nu[i] = cut[i] - prev - 1;
                prev = cut[i];
            }
            nu[n - 1] = box_radius + static_cast<int>(n) - 2 - prev;
            visit();
        }
    }
    rep.c_est = lo;
    rep.C_est = hi;

    std::vector<std::vector<double>> dirs;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        dirs.push_back(std::move(e));
    }
    dirs.emplace_back(n, 1.0);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int k = 0; k < opts.random_directions; ++k) {
        std::vector<double> d(n);
        for (auto& x : d) x = unit(rng);
        dirs.push_back(std::move(d));
    }
    bool first = true;
    std::vector<double> scaled(n);
    for (auto& d : dirs) {
        std::vector<double> h;
        for (double t : tau_grid) {
            for (std::size_t i = 0; i < n; ++i) scaled[i] = t * d[i];
            h.push_back(detail::b_unchecked(model, scaled) / t);
        }
        const Trend tr = detail::classify(h);
        rep.classification = first ? tr : detail::combine(rep.classification, tr);
        first = false;
        rep.directions.push_back({std::move(d), tr});
    }
    return rep;
}

}  // namespace qopt
