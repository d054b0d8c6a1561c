#pragma once

#include <string>
#include <string_view>

namespace ptsr {

enum class LinkKind { Log, Identity, Sqrt };

/**
 * @brief Link function on (0, inf).
 *
 * Used both as the mean link g1 (eval, deriv, inverse) and as the transform
 * g2 applied to lagged responses inside the autoregressive sum (eval only).
 * All three kinds are strictly increasing with nonzero derivative on (0, inf).
 */
class Link {
public:
    constexpr Link() = default;
    constexpr explicit Link(LinkKind kind) : kind_(kind) {}

    [[nodiscard]] constexpr LinkKind kind() const noexcept { return kind_; }

    /// g(x). Throws DomainError unless x is finite and > 0.
    [[nodiscard]] double eval(double x) const;
    /// g'(x). Throws DomainError unless x is finite and > 0.
    [[nodiscard]] double deriv(double x) const;
    /// g^{-1}(eta). Throws RangeError if the result is not a finite positive number.
    [[nodiscard]] double inverse(double eta) const;

    /// Config name: "log", "identity" or "sqrt".
    [[nodiscard]] std::string_view name() const noexcept;

    friend constexpr bool operator==(Link, Link) = default;

private:
    LinkKind kind_ = LinkKind::Log;
};

/// Case-insensitive lookup of a config name. Throws std::invalid_argument.
Link parse_link(std::string_view name);

}  // namespace ptsr
