#include "herit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "herit/accumulate.hpp"

namespace herit {

RateFunction RateFunction::from_exponent(double e) {
    if (!(e >= 1.0 && e <= 2.0))
        throw std::invalid_argument("rate exponent must lie in [1, 2]");
    return RateFunction{e};
}

double RateFunction::r(double m) const { return std::pow(m, exponent); }

SampleCovMoments sample_cov_moments(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows(), m = x.cols();
    if (n < 1 || m < 1) throw std::invalid_argument("matrix must be nonempty");
    const double nd = static_cast<double>(n);
    SampleCovMoments mom;
    mom.d2 = x.colwise().squaredNorm() / nd;
    Eigen::VectorXd eig;
    if (n < m) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
        b.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / nd);
        b = b.selfadjointView<Eigen::Lower>();
        Eigen::MatrixXd c = b * x;
        mom.ell_hat_raw = (x.array() * c.array()).colwise().sum().transpose() / nd;
        mom.s3_diag = c.colwise().squaredNorm().transpose() / nd;
        eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b, Eigen::EigenvaluesOnly)
                  .eigenvalues();
    } else {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
        s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / nd);
        s = s.selfadjointView<Eigen::Lower>();
        mom.ell_hat_raw = s.rowwise().squaredNorm();
        Eigen::MatrixXd t = s * s;
        mom.s3_diag = (s.array() * t.array()).rowwise().sum();
        eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly)
                  .eigenvalues();
    }
    mom.tr_s = eig.sum();
    mom.tr_s2 = eig.array().square().sum();
    mom.tr_s3 = eig.array().cube().sum();
    mom.tr_s4 = eig.array().square().square().sum();
    return mom;
}

double conditional_variance_gwash(const Eigen::MatrixXd& x, double h2, double kurt_beta,
                                  double kurt_eps) {
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    if (kurt_beta < 1.0 || kurt_eps < 1.0)
        throw std::invalid_argument("kurtosis is bounded below by 1");
    const double n = static_cast<double>(x.rows());
    const double m = static_cast<double>(x.cols());
    const SampleCovMoments mom = sample_cov_moments(x);
    const double h4 = h2 * h2;
    const double e2 = (1.0 - h2) * (1.0 - h2);

    const double mean_lsq = mom.ell_hat_raw.array().square().mean();
    const double term_beta = (kurt_beta - 3.0) / m * (h4 * n * n / (m * m)) * mean_lsq;

    const double mean_row4 = (x.rowwise().squaredNorm().array() / m).square().mean();
    const double term_eps = (kurt_eps - 3.0) * (e2 / n) * mean_row4;

    const double a = h2 * n / m, b = 1.0 - h2;
    const double tr = a * a * mom.tr_s4 + 2.0 * a * b * mom.tr_s3 + b * b * mom.tr_s2;
    return term_beta + term_eps + 2.0 / (m * m) * tr;
}

double mixture_excess_kurtosis(double theta, double p, long m) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("mixture p must lie in (0, 1)");
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta must lie in [0, 1]");
    if (m < 1) throw std::invalid_argument("m must be positive");
    return 3.0 / static_cast<double>(m) *
           (theta * theta / p + (1.0 - theta) * (1.0 - theta) / (1.0 - p) - 1.0);
}

double coeff_excess_kurtosis_over_m(const CoeffLaw& law) {
    law.validate();
    switch (law.kind) {
        case EffectKind::Gaussian:
            return 0.0;
        case EffectKind::StudentT:
            if (law.nu > 4.0) return 6.0 / (law.nu - 4.0) / static_cast<double>(law.m);
            return std::numeric_limits<double>::infinity();
        case EffectKind::Mixture:
            return mixture_excess_kurtosis(law.theta, law.p, law.m);
    }
    throw std::logic_error("unknown coefficient law");
}

namespace {

double population_tr4(const CorrelationSpec& spec, int m) {
    using Kind = CorrelationSpec::Kind;
    switch (spec.kind) {
        case Kind::Identity:
            return static_cast<double>(m);
        case Kind::EquiCorr: {
            const double top = 1.0 + (m - 1) * spec.rho;
            const double rest = 1.0 - spec.rho;
            return std::pow(top, 4) + (m - 1) * std::pow(rest, 4);
        }
        default: {
            Eigen::MatrixXd sigma = correlation_matrix(spec, m);
            Eigen::MatrixXd sq = sigma * sigma;
            return sq.squaredNorm();
        }
    }
}

}  // namespace

ConditionReport condition_report(const CorrelationSpec& spec, int m,
                                 const std::optional<CoeffLaw>& coeff_law) {
    if (!spec.analytic())
        throw std::invalid_argument("condition report needs an analytic correlation structure");
    ConditionReport rep;
    const Eigen::VectorXd ell = population_ld_scores(spec, m);
    const double tr2 = sum_of(ell);
    const double md = static_cast<double>(m);
    rep.mu2 = tr2 / md;
    rep.wd0 = rep.mu2 / md;
    rep.mean_lsq = sum_over(ell, [](double v) { return v * v; }) / md;
    rep.wd1_tr4 = population_tr4(spec, m) / (md * md);
    if (coeff_law) rep.bke = coeff_excess_kurtosis_over_m(*coeff_law);
    rep.source = "population_spec";
    return rep;
}

ConditionReport condition_report(const LdScores& panel_scores,
                                 const std::optional<CoeffLaw>& coeff_law) {
    if (panel_scores.kind != LdKind::BiasCorrected)
        throw std::invalid_argument("condition report needs bias-corrected panel LD scores");
    ConditionReport rep;
    const double md = static_cast<double>(panel_scores.m);
    rep.mu2 = mu2_hat(panel_scores);
    rep.wd0 = rep.mu2 / md;
    rep.mean_lsq = sum_over(panel_scores.values, [](double v) { return v * v; }) / md;
    if (coeff_law) rep.bke = coeff_excess_kurtosis_over_m(*coeff_law);
    rep.source = "reference_panel";
    return rep;
}

double popstrat_theoretical_bias(const Eigen::VectorXd& f, double sigma_xi) {
    if (sigma_xi < 0.0) throw std::invalid_argument("sigma_xi must be nonnegative");
    if (f.size() == 0) throw std::invalid_argument("f must be nonempty");
    const double cf = (f.array().square() / (1.0 + f.array().square())).mean();
    if (!(cf > 0.0))
        throw std::runtime_error("C_f is zero (no stratification signal), bias diverges");
    return sigma_xi * sigma_xi / cf;
}

double taylor_bias_gwash(double tr_s2, double tr_s3, double mu2_under, double lambda, double h2,
                         double kurt_beta, long m, const RateFunction& rate) {
    if (!(mu2_under > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("mu2 and lambda must be positive");
    const double md = static_cast<double>(m);
    const double n = md / lambda;
    const double h4 = h2 * h2;
    const double r = rate.r(md);
    const double term1 = (kurt_beta - 3.0) / md * h4 * (h2 - 1.0);
    const double bracket = (h2 * mu2_under / lambda + md / r) * tr_s2 - n / r * tr_s3;
    const double term2 = 2.0 * h4 / (md * md * mu2_under / lambda) * bracket;
    return term1 + term2;
}

double taylor_bias_ldsc(const Eigen::VectorXd& ell_under, const Eigen::VectorXd& s3_diag,
                        double tr_s2, double mu2_star_under, double lambda, double h2,
                        double kurt_beta, long m, const RateFunction& rate_tilde) {
    if (!(mu2_star_under > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("mu2 and lambda must be positive");
    if (ell_under.size() != m || s3_diag.size() != m)
        throw std::invalid_argument("per-column vectors must have length m");
    const double md = static_cast<double>(m);
    const double n = md / lambda;
    const double h4 = h2 * h2;
    const double r = rate_tilde.r(md);
    const double term1 = (kurt_beta - 3.0) / md * h4 * (h2 - 1.0);
    KahanSum s;
    for (long j = 0; j < m; ++j) {
        const double lu = ell_under[j];
        s.add(lu * (tr_s2 * (h2 / lambda * lu + 1.0) - n * s3_diag[j]));
    }
    const double term2 = 2.0 * h4 / (md * md * mu2_star_under / lambda) * (s.value() / r);
    return term1 + term2;
}

Eigen::VectorXd taylor_ej(const Eigen::MatrixXd& x, double h2, double kurt_beta,
                          double kurt_eps) {
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    if (kurt_beta < 1.0 || kurt_eps < 1.0)
        throw std::invalid_argument("kurtosis is bounded below by 1");
    const Eigen::Index n = x.rows(), m = x.cols();
    const double nd = static_cast<double>(n), md = static_cast<double>(m);
    const SampleCovMoments mom = sample_cov_moments(x);
    const double h4 = h2 * h2;
    const double e2 = (1.0 - h2) * (1.0 - h2);
    const double kb4 = (kurt_beta - 3.0) * h4 / (md * md);  // E(beta^4) - 3 h^4/m^2
    const double ke4 = (kurt_eps - 3.0) * e2;               // E(eps^4) - 3 (1-h^2)^2

    // t_j = sum_k S_kj^2 d_k^2, via the n x n weighted Gram X D^2 X' / n^2.
    Eigen::MatrixXd w = x * mom.d2.asDiagonal() * x.transpose() / (nd * nd);
    Eigen::MatrixXd wx = w * x;
    Eigen::VectorXd t = (x.array() * wx.array()).colwise().sum().transpose();

    const double sum_d4 = mom.d2.array().square().sum();
    const double var_d_base = sum_d4 * kb4 + 2.0 * mom.tr_s2 * h4 / (md * md) + ke4 / nd +
                              2.0 / nd * e2 +
                              4.0 * (1.0 - h2) * h2 / (nd * md) * mom.tr_s;
    const double ed_base = 1.0 - h2 + h2 * mom.tr_s / md;

    Eigen::VectorXd ej(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double d2j = mom.d2[j];
        const double lj = mom.ell_hat_raw[j];
        const double en = h2 * (nd / md * lj - d2j) + d2j;
        const double ed = d2j * ed_base;
        const double cov = d2j * (nd * t[j] * kb4 + 2.0 * nd * mom.s3_diag[j] * h4 / (md * md) +
                                  d2j / nd * ke4 + 2.0 / (nd * nd) * d2j * e2 +
                                  4.0 * (1.0 - h2) * h2 * lj / md);
        const double var_d = d2j * d2j * var_d_base;
        ej[j] = en / ed - cov / (ed * ed) + var_d * en / (ed * ed * ed);
    }
    return ej;
}

RateFunction fit_rate_exponent(const CorrelationSpec& spec, const std::vector<int>& m_grid) {
    if (!spec.analytic())
        throw std::invalid_argument("rate fitting needs an analytic correlation structure");
    if (m_grid.size() < 2) throw std::invalid_argument("need at least two grid points");
    const auto k = static_cast<double>(m_grid.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int m : m_grid) {
        if (m < 2) throw std::invalid_argument("grid entries must be at least 2");
        const double tr2 = sum_of(population_ld_scores(spec, m));
        const double lx = std::log(static_cast<double>(m)), ly = std::log(tr2);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    if (slope < 0.9 || slope > 2.1)
        throw std::runtime_error("fitted rate exponent far outside [1, 2], structure unsupported");
    return RateFunction{std::clamp(slope, 1.0, 2.0)};
}

ExpectedLdScores expected_ref_ld_scores_gaussian(const Eigen::VectorXd& ell, long n_ref) {
    if (n_ref < 1) throw std::invalid_argument("n_ref must be positive");
    ExpectedLdScores out;
    out.values = ell * (1.0 + 1.0 / static_cast<double>(n_ref));
    out.provenance = "gaussian_closed_form";
    return out;
}

ExpectedLdScores expected_ref_ld_scores_mc(const PredictorLaw& law, int n_ref, int m,
                                           int panels, RngStream& rng) {
    if (panels < 1) throw std::invalid_argument("need at least one panel");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < panels; ++k) {
        const Eigen::MatrixXd x = gen_predictors(law, n_ref, m, rng);
        acc += ld_scores_reference(x, true).values;
    }
    ExpectedLdScores out;
    out.values = acc / static_cast<double>(panels);
    out.provenance = "mc_oracle(panels=" + std::to_string(panels) + ")";
    return out;
}

bool weight_g_condition_holds(const std::function<double(double, double)>& g, double c_bound,
                              double b_max, int grid_points) {
    if (grid_points < 2 || !(b_max >= 1.0)) throw std::invalid_argument("bad grid");
    const double ha = 1e-6, hb = 1e-6;
    for (int i = 0; i < grid_points; ++i) {
        const double a = static_cast<double>(i) / (grid_points - 1);
        for (int k = 0; k < grid_points; ++k) {
            const double b = 1.0 + (b_max - 1.0) * static_cast<double>(k) / (grid_points - 1);
            const double al = std::max(0.0, a - ha), ar = std::min(1.0, a + ha);
            const double dga = (g(ar, b) - g(al, b)) / (ar - al);
            const double bl = std::max(1.0, b - hb), br = b + hb;
            const double dgb = (g(a, br) - g(a, bl)) / (br - bl);
            if (std::abs(dga) > c_bound * b * b || std::abs(dgb) > c_bound * b) return false;
        }
    }
    return true;
}

}  // namespace herit
