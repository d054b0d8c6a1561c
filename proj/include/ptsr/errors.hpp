#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptsr {

/// Argument outside the mathematical domain of a function (y <= 0, phi <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * @brief A computed quantity left its admissible range.
 *
 * Raised by the filter and the simulator when a conditional mean leaves
 * (0, inf) or overflows. `index()` is the 0-based time index at which it
 * happened, or npos when the failure is not tied to a time point.
 */
class RangeError : public std::range_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit RangeError(const std::string& what, std::size_t index = npos)
        : std::range_error(what), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Inconsistent vector/matrix shapes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linear system that must be solved is (numerically) singular.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ptsr
