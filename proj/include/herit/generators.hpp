#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "herit/correlation.hpp"
#include "herit/rng.hpp"

namespace herit {

enum class PredictorDist { Gaussian, Binomial };

struct PredictorLaw {
    PredictorDist distribution = PredictorDist::Gaussian;
    double p = 0.5;  // Binomial success probability per latent chain
    CorrelationSpec spec;

    static PredictorLaw gaussian(CorrelationSpec spec);
    static PredictorLaw binomial(double p, CorrelationSpec spec);
    void validate() const;
    std::string name() const;
};

enum class EffectKind { Gaussian, StudentT, Mixture };

struct CoeffLaw {
    EffectKind kind = EffectKind::Gaussian;
    double h2 = 0.0;
    int m = 0;
    double nu = 0.0;     // StudentT degrees of freedom
    double theta = 0.0;  // Mixture: share of variance in the first component
    double p = 0.0;      // Mixture: probability of the first component

    static CoeffLaw gaussian(double h2, int m);
    static CoeffLaw student_t(double h2, int m, double nu);
    static CoeffLaw mixture(double h2, int m, double theta, double p);
    void validate() const;

    // True when the draws only match the nominal sqrt(h2/m) scale because the
    // law has no finite variance (t with nu <= 2).
    bool nominal_scale_only() const { return kind == EffectKind::StudentT && nu <= 2.0; }
    std::string name() const;
};

struct DatasetTruth {
    Eigen::VectorXd beta;
    Eigen::VectorXd epsilon;
    std::optional<Eigen::VectorXd> xi;
    std::optional<Eigen::VectorXd> f;
    double h2 = 0.0;
};

struct Dataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::optional<DatasetTruth> truth;
};

// n x m predictor matrix with population-standardized columns (mean 0,
// variance 1) and the column correlation structure of law.spec.
Eigen::MatrixXd gen_predictors(const PredictorLaw& law, int n, int m, RngStream& rng);

// As gen_predictors for a stratified spec, also reporting each row's
// subpopulation sign (-1 for P1, +1 for P2).
Eigen::MatrixXd gen_stratified_predictors(const CorrelationSpec& spec, int n, int m,
                                          RngStream& rng, Eigen::VectorXd* signs);

Eigen::VectorXd gen_coefficients(const CoeffLaw& law, RngStream& rng);

// y = x beta + epsilon with epsilon iid N(0, 1-h2). Returns (y, epsilon).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_outcome(const Eigen::MatrixXd& x,
                                                        const Eigen::VectorXd& beta, double h2,
                                                        RngStream& rng);

// Full two-subpopulation dataset: y = x beta + xi + epsilon with Gaussian
// beta, xi_i = +-sigma_xi by subpopulation, Var(epsilon) = 1 - h2 - sigma_xi^2.
Dataset gen_stratified_dataset(const CorrelationSpec& spec, double h2, int n, RngStream& rng);

}  // namespace herit
