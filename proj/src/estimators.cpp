#include "herit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "herit/accumulate.hpp"

namespace herit {

namespace {

constexpr double kDenominatorFloor = 1e-9;

void check_inputs(const SummaryStats& u, const LdScores& ld, bool allow_truncated) {
    if (ld.values.size() != ld.m)
        throw std::invalid_argument("LD score vector length disagrees with its m");
    if (u.u.size() != ld.m)
        throw std::invalid_argument("summary statistics and LD scores disagree on m");
    if (u.n < 1) throw std::invalid_argument("sample size must be positive");
    switch (ld.kind) {
        case LdKind::BiasCorrected:
        case LdKind::Standardized:
            break;
        case LdKind::Truncated:
            if (allow_truncated) break;
            throw std::invalid_argument("estimator expects untruncated bias-corrected LD scores");
        case LdKind::Raw:
            throw std::invalid_argument("estimator needs bias-corrected LD scores, got raw ones");
    }
}

double checked_ratio(double num, double den) {
    if (std::abs(den) < kDenominatorFloor)
        throw std::runtime_error("estimator denominator is numerically degenerate");
    return num / den;
}

}  // namespace

void EstimatorSpec::validate() const {
    if (intercept == Intercept::Free && family != Family::Ldsc)
        throw std::invalid_argument("free intercept is only defined for the LDSC family");
    if (truncate_denominator && family != Family::Gwash)
        throw std::invalid_argument("denominator truncation is only defined for GWASH");
}

std::string EstimatorSpec::label() const {
    std::string s = family == Family::Gwash ? "gwash" : "ldsc";
    if (intercept == Intercept::Free) s += "_free";
    if (truncate_denominator) s += "_t";
    if (weighted) s += "_w";
    if (standardized_inputs) s += "_std";
    return s;
}

EstimateResult gwash_fixed(const SummaryStats& u, const LdScores& ld) {
    check_inputs(u, ld, true);
    const double m = static_cast<double>(ld.m);
    const double n_over_m = static_cast<double>(u.n) / m;
    EstimateResult r;
    r.numerator = sum_over(u.u, [](double v) { return v * v; }) / m - 1.0;
    r.denominator = n_over_m * (sum_of(ld.values) / m);
    r.h2_hat = checked_ratio(r.numerator, r.denominator);
    return r;
}

EstimateResult ldsc_fixed(const SummaryStats& u, const LdScores& ld) {
    check_inputs(u, ld, true);
    const double m = static_cast<double>(ld.m);
    const double n_over_m = static_cast<double>(u.n) / m;
    KahanSum num, den;
    for (Eigen::Index j = 0; j < ld.m; ++j) {
        const double l = ld.values[j];
        num.add(l * (u.u[j] * u.u[j] - 1.0));
        den.add(l * l);
    }
    EstimateResult r;
    r.numerator = num.value() / m;
    r.denominator = n_over_m * (den.value() / m);
    r.h2_hat = checked_ratio(r.numerator, r.denominator);
    return r;
}

EstimateResult ldsc_free(const SummaryStats& u, const LdScores& ld) {
    check_inputs(u, ld, false);
    const double m = static_cast<double>(ld.m);
    const double n_over_m = static_cast<double>(u.n) / m;
    const double l_bar = sum_of(ld.values) / m;
    const double u2_bar = sum_over(u.u, [](double v) { return v * v; }) / m;
    KahanSum sxx, sxy;
    for (Eigen::Index j = 0; j < ld.m; ++j) {
        const double dl = ld.values[j] - l_bar;
        sxx.add(dl * dl);
        sxy.add(dl * (u.u[j] * u.u[j] - u2_bar));
    }
    if (sxx.value() / m <= 1e-12)
        throw std::runtime_error("LD scores are (nearly) constant, free-intercept slope undefined");
    EstimateResult r;
    r.numerator = sxy.value();
    r.denominator = n_over_m * sxx.value();
    r.h2_hat = r.numerator / r.denominator;
    r.intercept_hat = u2_bar - r.h2_hat * n_over_m * l_bar;
    return r;
}

Eigen::VectorXd compute_weights(Family family, double h2_prelim, const LdScores& ld_trunc,
                                long n, long m) {
    if (ld_trunc.kind != LdKind::Truncated)
        throw std::invalid_argument("weights are defined on truncated LD scores");
    if (ld_trunc.values.size() != m)
        throw std::invalid_argument("LD score length disagrees with m");
    const double a = std::clamp(h2_prelim, 0.0, 1.0);
    const double n_over_m = static_cast<double>(n) / static_cast<double>(m);
    Eigen::VectorXd w(m);
    for (long j = 0; j < m; ++j) {
        const double l = ld_trunc.values[j];
        const double base = 1.0 + a * n_over_m * l;
        w[j] = 1.0 / (base * base);
        if (family == Family::Ldsc) w[j] /= l;
    }
    return w;
}

EstimateResult weighted_estimate(Family family, const SummaryStats& u, const LdScores& ld,
                                 const LdScores& ld_trunc) {
    check_inputs(u, ld, false);
    if (ld_trunc.kind != LdKind::Truncated)
        throw std::invalid_argument("weighted estimators need truncated LD scores for weights");
    if (ld_trunc.values.size() != ld.m)
        throw std::invalid_argument("truncated LD scores disagree on m");

    // Both families share the unweighted GWASH preliminary. With a shared
    // preliminary the two weighted estimators are identical whenever no LD
    // score falls below 1; per-family preliminaries would break that.
    EstimateResult prelim = gwash_fixed(u, ld);
    Eigen::VectorXd w = compute_weights(family, prelim.h2_hat, ld_trunc, u.n, ld.m);

    const double m = static_cast<double>(ld.m);
    const double n_over_m = static_cast<double>(u.n) / m;
    KahanSum num, den;
    for (Eigen::Index j = 0; j < ld.m; ++j) {
        const double u2e = u.u[j] * u.u[j] - 1.0;
        if (family == Family::Gwash) {
            num.add(w[j] * u2e);
            den.add(w[j] * ld_trunc.values[j]);
        } else {
            const double l = ld.values[j];
            num.add(w[j] * l * u2e);
            den.add(w[j] * l * l);
        }
    }
    EstimateResult r;
    r.numerator = num.value() / m;
    r.denominator = n_over_m * (den.value() / m);
    r.h2_hat = checked_ratio(r.numerator, r.denominator);
    r.weights = std::move(w);
    r.preliminary_h2 = prelim.h2_hat;
    return r;
}

EstimateResult ldsc_free_weighted(const SummaryStats& u, const LdScores& ld,
                                  const LdScores& ld_trunc) {
    check_inputs(u, ld, false);
    if (ld_trunc.kind != LdKind::Truncated)
        throw std::invalid_argument("weighted estimators need truncated LD scores for weights");
    EstimateResult prelim = gwash_fixed(u, ld);
    Eigen::VectorXd w = compute_weights(Family::Ldsc, prelim.h2_hat, ld_trunc, u.n, ld.m);

    const double m = static_cast<double>(ld.m);
    const double n_over_m = static_cast<double>(u.n) / m;
    const double w_sum = sum_of(w);
    KahanSum swl, swu;
    for (Eigen::Index j = 0; j < ld.m; ++j) {
        swl.add(w[j] * ld.values[j]);
        swu.add(w[j] * u.u[j] * u.u[j]);
    }
    const double l_bar = swl.value() / w_sum;
    const double u2_bar = swu.value() / w_sum;
    KahanSum sxx, sxy;
    for (Eigen::Index j = 0; j < ld.m; ++j) {
        const double dl = ld.values[j] - l_bar;
        sxx.add(w[j] * dl * dl);
        sxy.add(w[j] * dl * (u.u[j] * u.u[j] - u2_bar));
    }
    if (sxx.value() / m <= 1e-12)
        throw std::runtime_error("LD scores are (nearly) constant, free-intercept slope undefined");
    EstimateResult r;
    r.numerator = sxy.value();
    r.denominator = n_over_m * sxx.value();
    r.h2_hat = r.numerator / r.denominator;
    r.intercept_hat = u2_bar - r.h2_hat * n_over_m * l_bar;
    r.weights = std::move(w);
    r.preliminary_h2 = prelim.h2_hat;
    return r;
}

EstimateResult estimate(const EstimatorSpec& spec, const SummaryStats& u, const LdScores& ld) {
    spec.validate();
    if (u.standardized != spec.standardized_inputs)
        throw std::invalid_argument(
            "summary statistics standardization does not match the estimator spec");
    const bool ld_standardized = ld.kind == LdKind::Standardized;
    if (ld_standardized != spec.standardized_inputs)
        throw std::invalid_argument("LD score kind does not match the estimator spec");

    EstimateResult r;
    if (spec.weighted) {
        const LdScores ld_trunc = truncate_ld_scores(ld);
        if (spec.intercept == Intercept::Free)
            r = ldsc_free_weighted(u, ld, ld_trunc);
        else
            r = weighted_estimate(spec.family, u, ld, ld_trunc);
    } else if (spec.intercept == Intercept::Free) {
        r = ldsc_free(u, ld);
    } else if (spec.family == Family::Gwash && spec.truncate_denominator) {
        r = gwash_fixed(u, truncate_ld_scores(ld));
    } else if (spec.family == Family::Gwash) {
        r = gwash_fixed(u, ld);
    } else {
        r = ldsc_fixed(u, ld);
    }
    r.spec = spec;
    return r;
}

}  // namespace herit
