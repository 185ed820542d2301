#ifndef SKEWSIM_ERRORS_HPP
#define SKEWSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace skewsim {

// Bad user input: non-monotone radii, nonpositive weights, malformed config.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structural assumptions of the model are violated (divergent weight
// increments, nonpositive density where positivity is required).
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical evaluation failed: quadrature on a non-integrable integrand,
// step size too large for the drift, path escaped the admissible domain.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Wrong invocation of an operation (missing precondition that the caller
// controls, unsupported flag combination).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace skewsim

#endif
