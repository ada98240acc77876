#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace qopt {

enum class ErrorKind { argument, domain, resource, consistency };

/// Base of every error thrown by the library. The kind maps onto the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

    [[nodiscard]] int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::argument: return 2;
            case ErrorKind::domain: return 3;
            case ErrorKind::resource: return 4;
            case ErrorKind::consistency: return 5;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

/// A call outside the regime where a formula or construction is valid.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

/// A configured ceiling was hit. May carry the best estimate reached so far.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what, std::optional<double> best = std::nullopt)
        : Error(ErrorKind::resource, what), best_estimate_(best) {}

    [[nodiscard]] std::optional<double> best_estimate() const noexcept { return best_estimate_; }

private:
    std::optional<double> best_estimate_;
};

class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& what) : Error(ErrorKind::consistency, what) {}
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ArgumentError(msg);
}

}  // namespace detail

}  // namespace qopt
