#pragma once

#include "qopt/errors.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace qopt {

/// A point of the nonnegative integer lattice.
class MultiIndex {
public:
    using value_type = std::int32_t;

    MultiIndex() = default;

    explicit MultiIndex(std::size_t dimension) : entries_(dimension, 0) {}

    MultiIndex(std::initializer_list<value_type> entries) : entries_(entries) { validate(); }

    explicit MultiIndex(std::vector<value_type> entries) : entries_(std::move(entries)) { validate(); }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

    [[nodiscard]] value_type operator[](std::size_t i) const { return entries_[i]; }

    void set(std::size_t i, value_type v) {
        detail::require(v >= 0, "multi-index entries must be nonnegative");
        entries_[i] = v;
    }

    void increment(std::size_t i) { ++entries_[i]; }

    [[nodiscard]] std::span<const value_type> entries() const noexcept { return entries_; }

    /// |nu|, the sum of entries.
    [[nodiscard]] std::int64_t order() const noexcept {
        return std::accumulate(entries_.begin(), entries_.end(), std::int64_t{0});
    }

    /// log(nu!) = sum log(nu_i!).
    [[nodiscard]] double log_factorial() const {
        double s = 0.0;
        for (auto v : entries_) s += std::lgamma(static_cast<double>(v) + 1.0);
        return s;
    }

    /// Componentwise nu <= other.
    [[nodiscard]] bool dominated_by(const MultiIndex& other) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i] > other.entries_[i]) return false;
        return true;
    }

    [[nodiscard]] std::vector<double> as_real() const { return {entries_.begin(), entries_.end()}; }

    [[nodiscard]] std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(entries_[i]);
        }
        return s + ")";
    }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.entries_ <=> b.entries_; }

private:
    void validate() const {
        for (auto v : entries_) detail::require(v >= 0, "multi-index entries must be nonnegative");
    }

    std::vector<value_type> entries_;
};

}  // namespace qopt
