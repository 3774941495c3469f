#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace herit {

// Per-column correlation scores u_j = x_j' y / sqrt(n) together with the
// squared column scales d_j^2 = |x_j|^2 / n. With standardized = true the
// scores are the self-normalized version u_j / (d_j sqrt(y'y/n)).
struct SummaryStats {
    Eigen::VectorXd u;
    Eigen::VectorXd d2;
    long n = 0;
    bool standardized = false;
};

enum class LdKind { Raw, BiasCorrected, Truncated, Standardized };

struct LdScores {
    Eigen::VectorXd values;
    long n_ref = 0;
    long m = 0;
    LdKind kind = LdKind::Raw;
};

enum class StandardizeMode { ScaleOnly, CenterScale };

const char* ld_kind_name(LdKind kind);
LdKind ld_kind_from_name(const std::string& name);

// Divides each column by d_j = sqrt(x_j'x_j/n); CenterScale subtracts the
// column mean first. Returns the scaled matrix and the d_j^2 used.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> standardize_columns(const Eigen::MatrixXd& x,
                                                                StandardizeMode mode);

SummaryStats correlation_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                bool standardized);

// Sum of squared sample correlations of column j with every column, from a
// reference panel: raw value sum_p (S_R)_{j,p}^2 with S_R = X_R'X_R/n_R;
// bias_correct subtracts m/n_R. Cost O(min(n,m)^2 max(n,m)).
LdScores ld_scores_reference(const Eigen::MatrixXd& x_ref, bool bias_correct);

// max(value, 1) elementwise; the lower bound matches the population value
// l_j >= 1 that the raw estimate can undershoot.
LdScores truncate_ld_scores(const LdScores& ld);

// LD scores of the ScaleOnly-standardized panel (bias corrected).
LdScores standardized_ld_scores(const Eigen::MatrixXd& x_ref);

// Mean of bias-corrected LD scores; estimates tr(Sigma^2)/m.
double mu2_hat(const LdScores& ld);

}  // namespace herit
