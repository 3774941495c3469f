#include "herit/summary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "herit/accumulate.hpp"

namespace herit {

const char* ld_kind_name(LdKind kind) {
    switch (kind) {
        case LdKind::Raw: return "raw";
        case LdKind::BiasCorrected: return "bias_corrected";
        case LdKind::Truncated: return "truncated";
        case LdKind::Standardized: return "standardized";
    }
    return "?";
}

LdKind ld_kind_from_name(const std::string& name) {
    if (name == "raw") return LdKind::Raw;
    if (name == "bias_corrected") return LdKind::BiasCorrected;
    if (name == "truncated") return LdKind::Truncated;
    if (name == "standardized") return LdKind::Standardized;
    throw std::invalid_argument("unknown LD score kind: " + name);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> standardize_columns(const Eigen::MatrixXd& x,
                                                                StandardizeMode mode) {
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd out = x;
    if (mode == StandardizeMode::CenterScale)
        out.rowwise() -= x.colwise().mean();
    Eigen::VectorXd d2 = out.colwise().squaredNorm() / n;
    for (Eigen::Index j = 0; j < d2.size(); ++j) {
        if (!(d2[j] > 0.0))
            throw std::invalid_argument("column " + std::to_string(j + 1) +
                                        " has zero norm, cannot standardize");
        out.col(j) /= std::sqrt(d2[j]);
    }
    return {std::move(out), std::move(d2)};
}

SummaryStats correlation_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                bool standardized) {
    if (x.rows() != y.size()) throw std::invalid_argument("y length must match rows of x");
    if (x.rows() < 1 || x.cols() < 1) throw std::invalid_argument("x must be nonempty");
    const auto n = static_cast<double>(x.rows());
    SummaryStats s;
    s.n = x.rows();
    s.standardized = standardized;
    s.u = (x.transpose() * y) / std::sqrt(n);
    s.d2 = x.colwise().squaredNorm() / n;
    for (Eigen::Index j = 0; j < s.d2.size(); ++j)
        if (!(s.d2[j] > 0.0))
            throw std::invalid_argument("column " + std::to_string(j + 1) + " has zero norm");
    if (standardized) {
        const double y2 = y.squaredNorm() / n;
        if (!(y2 > 0.0)) throw std::invalid_argument("y has zero norm");
        s.u.array() /= s.d2.array().sqrt() * std::sqrt(y2);
    }
    return s;
}

LdScores ld_scores_reference(const Eigen::MatrixXd& x_ref, bool bias_correct) {
    if (!x_ref.allFinite()) throw std::invalid_argument("reference panel has nonfinite entries");
    const Eigen::Index n = x_ref.rows(), m = x_ref.cols();
    if (n < 1 || m < 1) throw std::invalid_argument("reference panel must be nonempty");
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    Eigen::VectorXd raw(m);
    if (m <= n) {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
        s.selfadjointView<Eigen::Lower>().rankUpdate(x_ref.transpose());
        s = s.selfadjointView<Eigen::Lower>();
        raw = s.rowwise().squaredNorm() / n2;
    } else {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
        b.selfadjointView<Eigen::Lower>().rankUpdate(x_ref);
        Eigen::MatrixXd c = b.selfadjointView<Eigen::Lower>() * x_ref;
        raw = (x_ref.array() * c.array()).colwise().sum().transpose() / n2;
    }
    LdScores ld;
    ld.n_ref = n;
    ld.m = m;
    if (bias_correct) {
        ld.values = raw.array() - static_cast<double>(m) / static_cast<double>(n);
        ld.kind = LdKind::BiasCorrected;
    } else {
        ld.values = std::move(raw);
        ld.kind = LdKind::Raw;
    }
    return ld;
}

LdScores truncate_ld_scores(const LdScores& ld) {
    if (ld.kind != LdKind::BiasCorrected && ld.kind != LdKind::Standardized)
        throw std::invalid_argument("truncation expects bias-corrected LD scores, got kind " +
                                    std::string(ld_kind_name(ld.kind)));
    LdScores out = ld;
    out.values = ld.values.array().max(1.0);
    out.kind = LdKind::Truncated;
    return out;
}

LdScores standardized_ld_scores(const Eigen::MatrixXd& x_ref) {
    auto [xs, d2] = standardize_columns(x_ref, StandardizeMode::ScaleOnly);
    LdScores ld = ld_scores_reference(xs, true);
    ld.kind = LdKind::Standardized;
    return ld;
}

double mu2_hat(const LdScores& ld) {
    if (ld.kind != LdKind::BiasCorrected)
        throw std::invalid_argument("mu2_hat expects bias-corrected LD scores, got kind " +
                                    std::string(ld_kind_name(ld.kind)));
    return mean_of(ld.values);
}

}  // namespace herit
