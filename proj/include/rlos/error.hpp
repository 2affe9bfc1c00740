#pragma once

#include <stdexcept>
#include <string>

namespace rlos {

/// Input violates a precondition (bad configuration, invalid geometry).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical evaluation cannot proceed (zero distance, singular system, undefined dB).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace rlos
