#pragma once

#include <stdexcept>
#include <string>

namespace curvres {

/// Base class of every error raised by the library.  `category()` maps onto
/// the CLI exit codes: configuration/input problems exit with 2, numerical
/// failures with 3.
class Error : public std::runtime_error {
public:
    enum class Category { config, numerical };

    Error(Category cat, const std::string& what) : std::runtime_error(what), category_(cat) {}
    Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Malformed input data: non-finite samples, bad expressions, bad tables.
struct InputError : Error {
    explicit InputError(const std::string& w) : Error(Category::config, w) {}
};

/// Invalid experiment or model configuration (e.g. epsilon too large).
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(Category::config, w) {}
};

/// A documented precondition of an operation was violated by the caller.
struct ContractError : Error {
    explicit ContractError(const std::string& w) : Error(Category::config, w) {}
};

/// Geometric failure: self-intersection, tangled elements, point outside the
/// tubular neighbourhood when it was required to be inside.
struct GeometryError : Error {
    explicit GeometryError(const std::string& w) : Error(Category::config, w) {}
};

/// The requested limit model is not one the library can realize (theta = 0).
struct UnsupportedModelError : Error {
    explicit UnsupportedModelError(const std::string& w) : Error(Category::config, w) {}
};

/// ODE step failure, singular factorization, non-convergence.
struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(Category::numerical, w) {}
};

/// The first-order layer problem has no solution because the supplied limit
/// pair violates the derivative transmission condition.
struct SolvabilityError : Error {
    explicit SolvabilityError(const std::string& w) : Error(Category::numerical, w) {}
};

}  // namespace curvres
