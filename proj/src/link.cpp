#include "ptsr/link.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ptsr/errors.hpp"

namespace ptsr {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite and > 0");
    }
}

}  // namespace

double Link::eval(double x) const {
    require_positive(x, "Link::eval");
    switch (kind_) {
        case LinkKind::Log: return std::log(x);
        case LinkKind::Identity: return x;
        case LinkKind::Sqrt: return std::sqrt(x);
    }
    return x;
}

double Link::deriv(double x) const {
    require_positive(x, "Link::deriv");
    switch (kind_) {
        case LinkKind::Log: return 1.0 / x;
        case LinkKind::Identity: return 1.0;
        case LinkKind::Sqrt: return 0.5 / std::sqrt(x);
    }
    return 1.0;
}

double Link::inverse(double eta) const {
    double mu = 0.0;
    switch (kind_) {
        case LinkKind::Log: mu = std::exp(eta); break;
        case LinkKind::Identity: mu = eta; break;
        // sqrt is only invertible on its range (0, inf)
        case LinkKind::Sqrt: mu = eta > 0.0 ? eta * eta : 0.0; break;
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw RangeError("Link::inverse: mean outside (0, inf) for eta = " + std::to_string(eta));
    }
    return mu;
}

std::string_view Link::name() const noexcept {
    switch (kind_) {
        case LinkKind::Log: return "log";
        case LinkKind::Identity: return "identity";
        case LinkKind::Sqrt: return "sqrt";
    }
    return "log";
}

Link parse_link(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "log") return Link(LinkKind::Log);
    if (lower == "identity") return Link(LinkKind::Identity);
    if (lower == "sqrt") return Link(LinkKind::Sqrt);
    throw std::invalid_argument("unknown link '" + std::string(name) + "' (expected log, identity or sqrt)");
}

}  // namespace ptsr
