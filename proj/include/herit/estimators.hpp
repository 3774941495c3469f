#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "herit/summary.hpp"

namespace herit {

enum class Family { Gwash, Ldsc };
enum class Intercept { Fixed, Free };

struct EstimatorSpec {
    Family family = Family::Gwash;
    Intercept intercept = Intercept::Fixed;
    bool weighted = false;
    bool standardized_inputs = false;
    bool truncate_denominator = false;

    // Throws std::invalid_argument for unsupported combinations: a free
    // intercept exists only for LDSC, truncation only for GWASH.
    void validate() const;
    std::string label() const;
};

struct EstimateResult {
    double h2_hat = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    std::optional<Eigen::VectorXd> weights;
    std::optional<double> preliminary_h2;
    std::optional<double> intercept_hat;
    EstimatorSpec spec;
};

// Ratio of the average excess chi-square statistic to the average scaled LD
// score: [(1/m) sum (u_j^2 - 1)] / [(1/m) sum (n/m) l_j].
EstimateResult gwash_fixed(const SummaryStats& u, const LdScores& ld);

// Fixed-intercept LD score regression through the origin of u^2 - 1 on
// (n/m) l: [(1/m) sum l_j (u_j^2 - 1)] / [(1/m) sum (n/m) l_j^2].
EstimateResult ldsc_fixed(const SummaryStats& u, const LdScores& ld);

// Free-intercept regression of u^2 on (n/m) l; h2_hat is the OLS slope.
EstimateResult ldsc_free(const SummaryStats& u, const LdScores& ld);

// Heteroscedasticity weights from truncated LD scores and a preliminary
// estimate (clamped to [0,1]): (1 + h2 (n/m) lbar_j)^-2, with an extra
// 1/lbar_j factor for the LDSC family.
Eigen::VectorXd compute_weights(Family family, double h2_prelim, const LdScores& ld_trunc,
                                long n, long m);

// Two-step weighted estimator: a shared preliminary (unweighted fixed-intercept
// GWASH, clamped to [0,1] for the weights), then the weighted ratio. LDSC keeps
// raw l in the sums and truncated l in the weights; GWASH uses truncated l in
// both denominator and weights. The shared preliminary makes the two families
// coincide exactly whenever no LD score is below 1.
EstimateResult weighted_estimate(Family family, const SummaryStats& u, const LdScores& ld,
                                 const LdScores& ld_trunc);

// Weighted free-intercept LDSC: weighted centered regression with the same
// two-step weights. Experimental; no closed-form analysis backs this variant.
EstimateResult ldsc_free_weighted(const SummaryStats& u, const LdScores& ld,
                                  const LdScores& ld_trunc);

// Dispatch over EstimatorSpec. Checks that the summaries match the spec's
// standardization flag and that the LD score kind is compatible.
EstimateResult estimate(const EstimatorSpec& spec, const SummaryStats& u, const LdScores& ld);

}  // namespace herit
