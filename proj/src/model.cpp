#include "ptsr/model.hpp"

#include <cmath>

#include "ptsr/errors.hpp"

namespace ptsr {

std::vector<std::string> ModelSpec::parameter_names() const {
    std::vector<std::string> names;
    names.reserve(parameter_count());
    names.emplace_back("alpha");
    for (std::size_t i = 1; i <= s; ++i) names.push_back("beta" + std::to_string(i));
    for (std::size_t i = 1; i <= p; ++i) names.push_back("ar" + std::to_string(i));
    for (std::size_t i = 1; i <= q; ++i) names.push_back("ma" + std::to_string(i));
    names.emplace_back("dispersion");
    return names;
}

ParameterVector ParameterVector::zeros(const ModelSpec& spec) {
    ParameterVector g;
    g.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.s));
    g.ar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.p));
    g.ma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.q));
    return g;
}

ParameterVector ParameterVector::from_flat(const ModelSpec& spec, const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != spec.parameter_count()) {
        throw DimensionError("ParameterVector::from_flat: expected " +
                             std::to_string(spec.parameter_count()) + " values, got " +
                             std::to_string(flat.size()));
    }
    const auto s = static_cast<Eigen::Index>(spec.s);
    const auto p = static_cast<Eigen::Index>(spec.p);
    const auto q = static_cast<Eigen::Index>(spec.q);
    ParameterVector g;
    g.alpha = flat[0];
    g.beta = flat.segment(1, s);
    g.ar = flat.segment(1 + s, p);
    g.ma = flat.segment(1 + s + p, q);
    g.dispersion = flat[1 + s + p + q];
    return g;
}

Eigen::VectorXd ParameterVector::flat() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    Eigen::Index k = 0;
    v[k++] = alpha;
    for (double b : beta) v[k++] = b;
    for (double a : ar) v[k++] = a;
    for (double m : ma) v[k++] = m;
    v[k] = dispersion;
    return v;
}

void ParameterVector::check(const ModelSpec& spec) const {
    if (static_cast<std::size_t>(beta.size()) != spec.s || static_cast<std::size_t>(ar.size()) != spec.p ||
        static_cast<std::size_t>(ma.size()) != spec.q) {
        throw DimensionError("ParameterVector does not match the model orders");
    }
    if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw DomainError("dispersion must be finite and > 0");
    }
}

}  // namespace ptsr
