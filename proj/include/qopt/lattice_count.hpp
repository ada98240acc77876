#pragma once

// Exact counting of { nu in N^d : A nu <= c } for a nonnegative integer matrix A.

#include "qopt/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace qopt {

using Count = unsigned __int128;

inline std::string count_to_string(Count c) {
    if (c == 0) return "0";
    std::string s;
    while (c > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
        c /= 10;
    }
    return {s.rbegin(), s.rend()};
}

inline double count_to_double(Count c) { return static_cast<double>(c); }

inline std::uint64_t count_to_u64(Count c) {
    if (c > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("lattice count exceeds 64 bits");
    return static_cast<std::uint64_t>(c);
}

/// Memoized counter. Rows sharing the same remaining weights are merged by their
/// smallest residual, so the state space stays small for the polytopes in use here.
/// The memo does not depend on the right-hand side and is reused across calls.
/// Not thread-safe; use one instance per thread.
class LatticeCounter {
public:
    explicit LatticeCounter(std::vector<std::vector<std::int64_t>> rows) : rows_(std::move(rows)) {
        detail::require(!rows_.empty(), "lattice counter needs at least one row");
        dim_ = rows_.front().size();
        detail::require(dim_ >= 1, "lattice counter needs a positive dimension");
        for (const auto& r : rows_) {
            detail::require(r.size() == dim_, "lattice counter rows differ in length");
            for (auto a : r) detail::require(a >= 0, "lattice counter weights must be nonnegative");
        }
        for (std::size_t i = 0; i < dim_; ++i) {
            const bool bounded = std::any_of(rows_.begin(), rows_.end(), [&](const auto& r) { return r[i] > 0; });
            detail::require(bounded, "coordinate " + std::to_string(i) + " is unbounded");
        }
        build_groups();
        memo_.resize(dim_);
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }

    /// #{ nu : every row . nu <= capacity }.
    Count count(std::int64_t capacity) {
        if (capacity < 0) return 0;
        std::vector<std::int64_t> caps(rows_.size(), capacity);
        return count(caps);
    }

    /// #{ nu : row_k . nu <= caps[k] for every k }.
    Count count(std::span<const std::int64_t> caps) {
        detail::require(caps.size() == rows_.size(), "capacity vector has wrong length");
        for (auto c : caps)
            if (c < 0) return 0;
        std::vector<std::int64_t> state(groups_[0].size(), std::numeric_limits<std::int64_t>::max());
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const int g = row_group_[k];
            if (g >= 0) state[static_cast<std::size_t>(g)] = std::min(state[static_cast<std::size_t>(g)], caps[k]);
        }
        return recurse(0, state);
    }

    [[nodiscard]] std::size_t memo_size() const noexcept {
        std::size_t s = 0;
        for (const auto& m : memo_) s += m.size();
        return s;
    }

private:
    struct Group {
        std::vector<std::int64_t> suffix;  // weights on coordinates d..dim-1
        int next = -1;                     // group index at depth d+1, or -1 when the suffix beyond d is zero
    };

    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
            std::uint64_t h = 1469598103934665603ull;
            for (auto x : v) {
                h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    void build_groups() {
        groups_.assign(dim_, {});
        row_group_.assign(rows_.size(), -1);
        auto group_of = [&](std::size_t d, const std::vector<std::int64_t>& suffix) -> int {
            if (std::all_of(suffix.begin(), suffix.end(), [](auto a) { return a == 0; })) return -1;
            auto& gs = groups_[d];
            for (std::size_t g = 0; g < gs.size(); ++g)
                if (gs[g].suffix == suffix) return static_cast<int>(g);
            gs.push_back({suffix, -1});
            return static_cast<int>(gs.size() - 1);
        };
        std::vector<int> current(rows_.size());
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            current[k] = group_of(0, rows_[k]);
            row_group_[k] = current[k];
        }
        for (std::size_t d = 0; d + 1 < dim_; ++d) {
            for (std::size_t k = 0; k < rows_.size(); ++k) {
                if (current[k] < 0) continue;
                std::vector<std::int64_t> suffix(rows_[k].begin() + static_cast<std::ptrdiff_t>(d + 1), rows_[k].end());
                const int nxt = group_of(d + 1, suffix);
                groups_[d][static_cast<std::size_t>(current[k])].next = nxt;
                current[k] = nxt;
            }
        }
    }

    static Count add_checked(Count a, Count b) {
        Count out;
        if (__builtin_add_overflow(a, b, &out)) throw ResourceError("lattice count overflows 128 bits");
        return out;
    }

    Count recurse(std::size_t d, const std::vector<std::int64_t>& state) {
        const auto& gs = groups_[d];
        std::int64_t xmax = std::numeric_limits<std::int64_t>::max();
        for (std::size_t g = 0; g < gs.size(); ++g) {
            const auto a = gs[g].suffix.front();
            if (a > 0) xmax = std::min(xmax, state[g] / a);
        }
        if (d + 1 == dim_) return static_cast<Count>(xmax) + 1;

        auto& memo = memo_[d];
        if (auto it = memo.find(state); it != memo.end()) return it->second;

        const auto& next_groups = groups_[d + 1];
        std::vector<std::int64_t> child(next_groups.size());
        Count total = 0;
        for (std::int64_t x = 0; x <= xmax; ++x) {
            std::fill(child.begin(), child.end(), std::numeric_limits<std::int64_t>::max());
            for (std::size_t g = 0; g < gs.size(); ++g) {
                const int n = gs[g].next;
                if (n < 0) continue;
                const auto r = state[g] - gs[g].suffix.front() * x;
                auto& slot = child[static_cast<std::size_t>(n)];
                slot = std::min(slot, r);
            }
            total = add_checked(total, recurse(d + 1, child));
        }
        memo.emplace(state, total);
        return total;
    }

    std::vector<std::vector<std::int64_t>> rows_;
    std::size_t dim_ = 0;
    std::vector<std::vector<Group>> groups_;
    std::vector<int> row_group_;
    std::vector<std::unordered_map<std::vector<std::int64_t>, Count, KeyHash>> memo_;
};

}  // namespace qopt
