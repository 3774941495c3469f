#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

namespace herit {

// Correlation structure of the predictor columns. All variants have unit
// variance per column; "Stratified" wraps a base structure with a two-group
// mean shift f and is handled by the generators (no closed-form LD scores).
struct CorrelationSpec {
    enum class Kind { Identity, Ar1, EquiCorr, MixedAr1, Stratified };

    Kind kind = Kind::Identity;
    double rho = 0.0;         // Ar1, EquiCorr
    double rho_first = 0.0;   // MixedAr1: first half of the columns
    double rho_second = 0.0;  // MixedAr1: second half
    std::shared_ptr<CorrelationSpec> base;  // Stratified: within-group structure
    Eigen::VectorXd f;                      // Stratified: per-column mean shift
    double sigma_xi = 0.0;                  // Stratified: outcome shift scale

    static CorrelationSpec identity();
    static CorrelationSpec ar1(double rho);
    static CorrelationSpec equi(double rho);
    static CorrelationSpec mixed_ar1(double rho_first, double rho_second);
    static CorrelationSpec stratified(const CorrelationSpec& base, Eigen::VectorXd f,
                                      double sigma_xi);

    // Throws std::invalid_argument when parameters are out of range.
    void validate() const;

    bool analytic() const { return kind != Kind::Stratified; }
    std::string name() const;
};

// Exact population LD scores l_j = sum_k Sigma_jk^2 for the analytic variants.
// Stratified is rejected: its marginal covariance depends on f, and callers
// that need it should estimate from a panel instead.
Eigen::VectorXd population_ld_scores(const CorrelationSpec& spec, int m);

// Dense population correlation matrix (analytic variants only). Meant for
// desk-scale diagnostics, builds the full m x m matrix.
Eigen::MatrixXd correlation_matrix(const CorrelationSpec& spec, int m);

}  // namespace herit
