#include "ptsr/inference.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ptsr/errors.hpp"
#include "ptsr/special.hpp"

namespace ptsr {

namespace {

const Eigen::MatrixXd& require_vcov(const FitResult& fit) {
    if (!fit.vcov) {
        throw SingularMatrixError("covariance matrix unavailable: information matrix is not positive definite");
    }
    return *fit.vcov;
}

void check_index(const FitResult& fit, std::size_t index) {
    if (index >= fit.estimate.size()) {
        throw std::out_of_range("coefficient index " + std::to_string(index) + " out of range");
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, std::string_view context) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("restriction '" + std::string(context) + "': bad number '" +
                                    std::string(s) + "'");
    }
    return v;
}

}  // namespace

Interval confidence_interval(const FitResult& fit, std::size_t index, double level) {
    check_index(fit, index);
    if (!(level > 0.5 && level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0.5, 1)");
    }
    const Eigen::MatrixXd& v = require_vcov(fit);
    const auto i = static_cast<Eigen::Index>(index);
    const double z = special::normal_quantile(0.5 * (1.0 + level));
    const double half = z * std::sqrt(v(i, i));
    const double center = fit.estimate.flat()[i];
    return {center - half, center + half};
}

ZTest z_statistic(const FitResult& fit, std::size_t index, double value) {
    check_index(fit, index);
    const Eigen::MatrixXd& v = require_vcov(fit);
    const auto i = static_cast<Eigen::Index>(index);
    const double z = (fit.estimate.flat()[i] - value) / std::sqrt(v(i, i));
    return {z, 2.0 * special::normal_cdf(-std::abs(z))};
}

WaldTest wald_test(const FitResult& fit, const LinearRestriction& r) {
    const Eigen::MatrixXd& v = require_vcov(fit);
    const Eigen::Index dim = v.rows();
    const Eigen::Index k = r.a.rows();
    if (r.a.cols() != dim || r.b.size() != k || k < 1 || k >= dim) {
        throw DimensionError("wald_test: restriction must be k x " + std::to_string(dim) + " with 1 <= k < " +
                             std::to_string(dim));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(r.a.transpose());
    if (qr.rank() < k) {
        throw SingularMatrixError("wald_test: restriction matrix is not of full row rank");
    }
    const Eigen::VectorXd t = r.a * fit.estimate.flat() - r.b;
    // I^{-1} estimated by n * vcov, so the n factors cancel.
    const double n = static_cast<double>(fit.n);
    const Eigen::MatrixXd middle = r.a * (n * v) * r.a.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(middle);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        throw SingularMatrixError("wald_test: A vcov A' is singular");
    }
    const double w = std::max(0.0, n * t.dot(ldlt.solve(t)));
    return {w, static_cast<std::size_t>(k), special::chi_square_upper_tail(w, static_cast<double>(k))};
}

LinearRestriction parse_restriction(std::string_view text, const std::vector<std::string>& names) {
    std::vector<std::pair<Eigen::VectorXd, double>> rows;
    const auto dim = static_cast<Eigen::Index>(names.size());

    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t end = std::min(text.find_first_of(",;", begin), text.size());
        const std::string_view eq = trim(text.substr(begin, end - begin));
        begin = end + 1;
        if (eq.empty()) {
            throw std::invalid_argument("restriction: empty equation in '" + std::string(text) + "'");
        }
        const std::size_t pos = eq.find('=');
        if (pos == std::string_view::npos || eq.find('=', pos + 1) != std::string_view::npos) {
            throw std::invalid_argument("restriction '" + std::string(eq) + "': expected exactly one '='");
        }
        const double rhs = parse_number(eq.substr(pos + 1), eq);
        std::string_view lhs = trim(eq.substr(0, pos));

        Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
        bool any = false;
        while (!lhs.empty()) {
            double sign = 1.0;
            while (!lhs.empty() && (lhs.front() == '+' || lhs.front() == '-')) {
                if (lhs.front() == '-') sign = -sign;
                lhs = trim(lhs.substr(1));
            }
            std::size_t stop = 0;
            while (stop < lhs.size() && lhs[stop] != '+' && lhs[stop] != '-') ++stop;
            std::string_view term = trim(lhs.substr(0, stop));
            lhs = trim(lhs.substr(stop));

            double coef = sign;
            if (const std::size_t star = term.find('*'); star != std::string_view::npos) {
                coef *= parse_number(term.substr(0, star), eq);
                term = trim(term.substr(star + 1));
            }
            const auto it = std::find(names.begin(), names.end(), term);
            if (it == names.end()) {
                throw std::invalid_argument("restriction '" + std::string(eq) + "': unknown parameter '" +
                                            std::string(term) + "'");
            }
            row[it - names.begin()] += coef;
            any = true;
        }
        if (!any) {
            throw std::invalid_argument("restriction '" + std::string(eq) + "': no parameter on the left side");
        }
        rows.emplace_back(std::move(row), rhs);
        if (end == text.size()) break;
    }

    LinearRestriction r;
    r.a.resize(static_cast<Eigen::Index>(rows.size()), dim);
    r.b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        r.a.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
        r.b[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
    return r;
}

}  // namespace ptsr
