#pragma once

// Ehrhart quasi-polynomials E*(j) = #(jP cap Z^N) fitted from exact lattice counts.

#include "qopt/lattice_count.hpp"
#include "qopt/polytope.hpp"
#include "qopt/rational.hpp"

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qopt {

class EhrhartQP {
public:
    EhrhartQP() = default;
    EhrhartQP(int N, int q, std::vector<std::vector<BigRational>> rows, std::size_t vertex_count)
        : N_(N), q_(q), rows_(std::move(rows)), vertex_count_(vertex_count) {}

    [[nodiscard]] int N() const noexcept { return N_; }
    [[nodiscard]] int q() const noexcept { return q_; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertex_count_; }

    /// rows()[r][i] = c*_i(r), the coefficient of j^i for j = r mod q.
    [[nodiscard]] const std::vector<std::vector<BigRational>>& rows() const noexcept { return rows_; }

    [[nodiscard]] const BigRational& leading_exact() const { return rows_.front().back(); }
    [[nodiscard]] double volume() const { return static_cast<double>(leading_exact()); }

    [[nodiscard]] BigRational evaluate_exact(std::int64_t j) const {
        detail::require(j >= 0, "Ehrhart argument must be nonnegative");
        const auto& row = rows_[static_cast<std::size_t>(j % q_)];
        BigRational acc = 0;
        for (std::size_t i = row.size(); i-- > 0;) acc = acc * j + row[i];
        return acc;
    }

    /// E*(j) as an integer; a non-integral value is a consistency failure.
    [[nodiscard]] BigInt evaluate(std::int64_t j) const {
        const auto v = evaluate_exact(j);
        if (denominator(v) != 1) throw ConsistencyError("Ehrhart value at j=" + std::to_string(j) + " is not integral");
        return numerator(v);
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json doc;
        doc["N"] = N_;
        doc["q"] = q_;
        auto rows = nlohmann::json::array();
        auto exact = nlohmann::json::array();
        for (const auto& row : rows_) {
            auto r = nlohmann::json::array();
            auto e = nlohmann::json::array();
            for (const auto& c : row) {
                r.push_back(static_cast<double>(c));
                std::ostringstream ss;
                ss << c;
                e.push_back(ss.str());
            }
            rows.push_back(std::move(r));
            exact.push_back(std::move(e));
        }
        doc["rows"] = std::move(rows);
        doc["rows_exact"] = std::move(exact);
        doc["volume"] = volume();
        std::ostringstream ss;
        ss << leading_exact();
        doc["volume_exact"] = ss.str();
        doc["vertex_count"] = vertex_count_;
        return doc;
    }

private:
    int N_ = 0;
    int q_ = 1;
    std::vector<std::vector<BigRational>> rows_;
    std::size_t vertex_count_ = 0;
};

struct EhrhartOptions {
    /// Held-out verification points; at least 2q are always used.
    int max_verify = 16;
    /// Fixed period; disables doubling on verification failure.
    std::optional<int> inject_period;
    int period_cap = 64;
};

namespace detail {

inline BigInt to_big(Count c) {
    BigInt out = static_cast<std::uint64_t>(c >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(c);
    return out;
}

/// Monomial coefficients of the degree-n interpolant through (x_k, y_k).
inline std::vector<BigRational> interpolate(const std::vector<BigRational>& x, const std::vector<BigRational>& y) {
    const std::size_t n = x.size();
    std::vector<BigRational> dd = y;
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t k = n - 1; k >= level; --k) {
            dd[k] = (dd[k] - dd[k - 1]) / (x[k] - x[k - level]);
            if (k == level) break;
        }
    // Horner expansion of the Newton form.
    std::vector<BigRational> coeff(n, BigRational(0));
    for (std::size_t k = n; k-- > 0;) {
        // coeff <- coeff * (t - x_k) + dd[k]
        std::vector<BigRational> next(n, BigRational(0));
        for (std::size_t i = 0; i < n; ++i) {
            if (coeff[i] == 0) continue;
            if (i + 1 < n) next[i + 1] += coeff[i];
            next[i] -= coeff[i] * x[k];
        }
        next[0] += dd[k];
        coeff = std::move(next);
    }
    return coeff;
}

}  // namespace detail

/// Fits E*(j) per residue class from exact counts at j = r, r+q, ..., r+Nq and checks
/// it against further counts. On a mismatch the period is doubled up to the cap.
inline EhrhartQP ehrhart_fit(const BoundModel& model, const EhrhartOptions& opts = {}) {
    if (!model.rational_homogeneous())
        throw DomainError("Ehrhart fitting needs a homogeneous model with rational weights");
    detail::require(opts.max_verify >= 0, "max_verify must be nonnegative");
    const auto vertices = polytope_vertices(model);
    const auto poly = model.scaled_polytope();
    LatticeCounter counter(poly.rows);
    const int n = static_cast<int>(model.dimension());
    auto count_at = [&](std::int64_t j) { return detail::to_big(counter.count(j * poly.denom)); };

    std::int64_t q = opts.inject_period ? *opts.inject_period : vertex_denominator_lcm(vertices);
    detail::require(q >= 1, "period must be positive");
    for (;;) {
        std::vector<std::vector<BigRational>> rows;
        for (std::int64_t r = 0; r < q; ++r) {
            std::vector<BigRational> xs, ys;
            for (int k = 0; k <= n; ++k) {
                const std::int64_t j = r + k * q;
                xs.emplace_back(j);
                ys.emplace_back(count_at(j));
            }
            rows.push_back(detail::interpolate(xs, ys));
        }
        EhrhartQP qp(n, static_cast<int>(q), std::move(rows), vertices.size());

        std::string failure;
        for (const auto& row : qp.rows())
            if (row.back() != qp.leading_exact()) failure = "leading coefficients differ across residues";
        const std::int64_t verify = std::max<std::int64_t>(opts.max_verify, 2 * q);
        const std::int64_t start = (n + 1) * q;
        for (std::int64_t t = 0; t < verify && failure.empty(); ++t) {
            const std::int64_t j = start + t;
            if (qp.evaluate_exact(j) != BigRational(count_at(j))) failure = "count mismatch at j=" + std::to_string(j);
        }
        if (failure.empty()) return qp;
        if (opts.inject_period)
            throw ConsistencyError("Ehrhart verification failed with period " + std::to_string(q) + ": " + failure);
        q *= 2;
        if (q > opts.period_cap)
            throw ConsistencyError("Ehrhart verification failed up to the period cap " +
                                   std::to_string(opts.period_cap) + ": " + failure);
    }
}

}  // namespace qopt
