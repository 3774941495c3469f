#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "herit/correlation.hpp"
#include "herit/generators.hpp"
#include "herit/rng.hpp"
#include "herit/summary.hpp"

namespace herit {

// Moment summaries that decide how well the ratio estimators behave: wd0 and
// wd1_tr4 measure dependence strength, bke measures effect-size kurtosis.
struct ConditionReport {
    double wd0 = 0.0;       // tr(Sigma^2)/m^2
    double mu2 = 0.0;       // tr(Sigma^2)/m
    double mean_lsq = 0.0;  // (1/m) sum l_j^2
    std::optional<double> wd1_tr4;  // tr(Sigma^4)/m^2, analytic specs only
    std::optional<double> bke;      // (Kurt(beta)-3)/m, +inf when undefined
    std::string source;
};

// r(m) = m^exponent; the growth rate of tr(Sigma^2). AR(1)-like structures
// sit at exponent 1, equi-correlated at 2.
struct RateFunction {
    double exponent = 1.0;
    static RateFunction from_exponent(double e);
    double r(double m) const;
};

// Traces and per-column diagonals of the sample covariance S = X'X/n,
// computed through the smaller of the two Gram matrices.
struct SampleCovMoments {
    double tr_s = 0.0;
    double tr_s2 = 0.0;
    double tr_s3 = 0.0;
    double tr_s4 = 0.0;
    Eigen::VectorXd ell_hat_raw;  // diag(S^2), the in-sample uncorrected LD scores
    Eigen::VectorXd s3_diag;      // diag(S^3)
    Eigen::VectorXd d2;           // diag(S)
};

SampleCovMoments sample_cov_moments(const Eigen::MatrixXd& x);

// Conditional variance of the GWASH numerator given X: effect-kurtosis term,
// noise-kurtosis term, and a Frobenius trace term.
double conditional_variance_gwash(const Eigen::MatrixXd& x, double h2, double kurt_beta,
                                  double kurt_eps);

// Excess kurtosis over m of the two-component coefficient mixture.
double mixture_excess_kurtosis(double theta, double p, long m);

// (Kurt(beta)-3)/m for a coefficient law; +inf when the kurtosis diverges.
double coeff_excess_kurtosis_over_m(const CoeffLaw& law);

ConditionReport condition_report(const CorrelationSpec& spec, int m,
                                 const std::optional<CoeffLaw>& coeff_law);
ConditionReport condition_report(const LdScores& panel_scores,
                                 const std::optional<CoeffLaw>& coeff_law);

// Asymptotic bias of every ratio estimator under two-group stratification:
// sigma_xi^2 / C_f with C_f = (1/m) sum f_j^2/(1+f_j^2).
double popstrat_theoretical_bias(const Eigen::VectorXd& f, double sigma_xi);

// Second-order bias approximation for standardized GWASH.
double taylor_bias_gwash(double tr_s2, double tr_s3, double mu2_under, double lambda, double h2,
                         double kurt_beta, long m, const RateFunction& rate);

// Second-order bias approximation for standardized fixed-intercept LDSC.
// ell_under are the expected reference LD scores, s3_diag the diag(S^3).
double taylor_bias_ldsc(const Eigen::VectorXd& ell_under, const Eigen::VectorXd& s3_diag,
                        double tr_s2, double mu2_star_under, double lambda, double h2,
                        double kurt_beta, long m, const RateFunction& rate_tilde);

// Second-order approximation of E(u~_j^2 | X) for each column, from the exact
// conditional moments of numerator and denominator of the standardized score.
Eigen::VectorXd taylor_ej(const Eigen::MatrixXd& x, double h2, double kurt_beta,
                          double kurt_eps);

// Fit of log tr(Sigma^2) against log m over a grid; analytic specs only.
RateFunction fit_rate_exponent(const CorrelationSpec& spec, const std::vector<int>& m_grid);

struct ExpectedLdScores {
    Eigen::VectorXd values;
    std::string provenance;
};

// E(bias-corrected reference LD score): closed form l_j (1 + 1/n_ref) for
// Gaussian panels, Monte Carlo average over panel redraws otherwise.
ExpectedLdScores expected_ref_ld_scores_gaussian(const Eigen::VectorXd& ell, long n_ref);
ExpectedLdScores expected_ref_ld_scores_mc(const PredictorLaw& law, int n_ref, int m,
                                           int panels, RngStream& rng);

// Numeric check of the weight-function smoothness condition
// |dg/da| <= C b^2 and |dg/db| <= C b over a in [0,1], b in [1, b_max].
bool weight_g_condition_holds(const std::function<double(double, double)>& g, double c_bound,
                              double b_max, int grid_points);

}  // namespace herit
