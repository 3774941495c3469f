#include "herit/generators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace herit {

PredictorLaw PredictorLaw::gaussian(CorrelationSpec spec) {
    PredictorLaw law;
    law.distribution = PredictorDist::Gaussian;
    law.spec = std::move(spec);
    law.validate();
    return law;
}

PredictorLaw PredictorLaw::binomial(double p, CorrelationSpec spec) {
    PredictorLaw law;
    law.distribution = PredictorDist::Binomial;
    law.p = p;
    law.spec = std::move(spec);
    law.validate();
    return law;
}

void PredictorLaw::validate() const {
    spec.validate();
    if (distribution == PredictorDist::Binomial) {
        if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("binomial p must lie in (0, 1)");
        using Kind = CorrelationSpec::Kind;
        switch (spec.kind) {
            case Kind::Identity:
                break;
            case Kind::Ar1:
            case Kind::MixedAr1: {
                auto ok = [this](double rho) { return rho >= -p / (1.0 - p) && rho < 1.0; };
                const bool valid = spec.kind == Kind::Ar1
                                       ? ok(spec.rho)
                                       : ok(spec.rho_first) && ok(spec.rho_second);
                if (!valid)
                    throw std::invalid_argument(
                        "binomial chain needs rho in [-p/(1-p), 1) for a valid transition");
                break;
            }
            case Kind::EquiCorr:
                if (p != 0.5)
                    throw std::invalid_argument(
                        "equi-correlated binomial uses thresholded Gaussians and needs p = 0.5");
                break;
            case Kind::Stratified:
                throw std::invalid_argument("stratified binomial predictors are not supported");
        }
    }
}

std::string PredictorLaw::name() const {
    return (distribution == PredictorDist::Gaussian ? "gaussian_" : "binomial_") + spec.name();
}

CoeffLaw CoeffLaw::gaussian(double h2, int m) {
    CoeffLaw law;
    law.kind = EffectKind::Gaussian;
    law.h2 = h2;
    law.m = m;
    law.validate();
    return law;
}

CoeffLaw CoeffLaw::student_t(double h2, int m, double nu) {
    CoeffLaw law;
    law.kind = EffectKind::StudentT;
    law.h2 = h2;
    law.m = m;
    law.nu = nu;
    law.validate();
    return law;
}

CoeffLaw CoeffLaw::mixture(double h2, int m, double theta, double p) {
    CoeffLaw law;
    law.kind = EffectKind::Mixture;
    law.h2 = h2;
    law.m = m;
    law.theta = theta;
    law.p = p;
    law.validate();
    return law;
}

void CoeffLaw::validate() const {
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (kind == EffectKind::StudentT && !(nu > 0.0))
        throw std::invalid_argument("student t dof must be positive");
    if (kind == EffectKind::Mixture) {
        if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("mixture theta must lie in [0, 1]");
        if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("mixture p must lie in (0, 1)");
    }
}

std::string CoeffLaw::name() const {
    switch (kind) {
        case EffectKind::Gaussian: return "gaussian";
        case EffectKind::StudentT: return "student_t";
        case EffectKind::Mixture: return "mixture";
    }
    return "?";
}

namespace {

// One row of a standardized Gaussian process with the requested structure.
void fill_gaussian_row(Eigen::MatrixXd& x, int i, const CorrelationSpec& spec, RngStream& rng) {
    using Kind = CorrelationSpec::Kind;
    const int m = static_cast<int>(x.cols());
    switch (spec.kind) {
        case Kind::Identity:
            for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
            break;
        case Kind::Ar1: {
            const double a = spec.rho, b = std::sqrt(1.0 - a * a);
            double prev = rng.normal();
            x(i, 0) = prev;
            for (int j = 1; j < m; ++j) {
                prev = a * prev + b * rng.normal();
                x(i, j) = prev;
            }
            break;
        }
        case Kind::EquiCorr: {
            const double a = std::sqrt(spec.rho), b = std::sqrt(1.0 - spec.rho);
            const double shared = rng.normal();
            for (int j = 0; j < m; ++j) x(i, j) = a * shared + b * rng.normal();
            break;
        }
        case Kind::MixedAr1: {
            const int m1 = m / 2;
            auto chain = [&](int lo, int hi, double rho) {
                const double b = std::sqrt(1.0 - rho * rho);
                double prev = rng.normal();
                x(i, lo) = prev;
                for (int j = lo + 1; j < hi; ++j) {
                    prev = rho * prev + b * rng.normal();
                    x(i, j) = prev;
                }
            };
            chain(0, m1, spec.rho_first);
            if (m1 < m) chain(m1, m, spec.rho_second);
            break;
        }
        case Kind::Stratified:
            throw std::logic_error("stratified rows are produced by gen_stratified_predictors");
    }
}

// Stationary two-state chain from the binomial AR(1) construction: stay
// probability p1 = p + rho(1-p) from 1, entry probability p(1-rho) from 0.
void fill_binomial_chain(Eigen::VectorXi& v, int lo, int hi, double p, double rho,
                         RngStream& rng) {
    const double p1 = p + rho * (1.0 - p);
    const double p0 = p * (1.0 - rho);
    int prev = rng.bernoulli(p) ? 1 : 0;
    v[lo] = prev;
    for (int j = lo + 1; j < hi; ++j) {
        prev = rng.bernoulli(prev ? p1 : p0) ? 1 : 0;
        v[j] = prev;
    }
}

void fill_binomial_row(Eigen::MatrixXd& x, int i, const PredictorLaw& law, RngStream& rng) {
    using Kind = CorrelationSpec::Kind;
    const int m = static_cast<int>(x.cols());
    const double p = law.p;
    const double scale = 1.0 / std::sqrt(2.0 * p * (1.0 - p));
    Eigen::VectorXi sum(m);
    switch (law.spec.kind) {
        case Kind::Identity:
        case Kind::Ar1: {
            const double rho = law.spec.kind == Kind::Ar1 ? law.spec.rho : 0.0;
            Eigen::VectorXi a(m), b(m);
            fill_binomial_chain(a, 0, m, p, rho, rng);
            fill_binomial_chain(b, 0, m, p, rho, rng);
            sum = a + b;
            break;
        }
        case Kind::MixedAr1: {
            const int m1 = m / 2;
            Eigen::VectorXi a(m), b(m);
            fill_binomial_chain(a, 0, m1, p, law.spec.rho_first, rng);
            if (m1 < m) fill_binomial_chain(a, m1, m, p, law.spec.rho_second, rng);
            fill_binomial_chain(b, 0, m1, p, law.spec.rho_first, rng);
            if (m1 < m) fill_binomial_chain(b, m1, m, p, law.spec.rho_second, rng);
            sum = a + b;
            break;
        }
        case Kind::EquiCorr: {
            // Threshold two equi-correlated Gaussian rows at 0. Latent
            // correlation sin(pi rho / 2) yields indicator correlation rho.
            const double rho_g = std::sin(std::numbers::pi * law.spec.rho / 2.0);
            const double a = std::sqrt(rho_g), b = std::sqrt(1.0 - rho_g);
            for (int pass = 0; pass < 2; ++pass) {
                const double shared = rng.normal();
                for (int j = 0; j < m; ++j) {
                    const int bit = a * shared + b * rng.normal() > 0.0 ? 1 : 0;
                    if (pass == 0)
                        sum[j] = bit;
                    else
                        sum[j] += bit;
                }
            }
            break;
        }
        case Kind::Stratified:
            throw std::logic_error("stratified binomial rows are rejected by validate()");
    }
    for (int j = 0; j < m; ++j) x(i, j) = (sum[j] - 2.0 * p) * scale;
}

}  // namespace

Eigen::MatrixXd gen_predictors(const PredictorLaw& law, int n, int m, RngStream& rng) {
    law.validate();
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be positive");
    if (law.spec.kind == CorrelationSpec::Kind::Stratified)
        return gen_stratified_predictors(law.spec, n, m, rng, nullptr);
    Eigen::MatrixXd x(n, m);
    for (int i = 0; i < n; ++i) {
        if (law.distribution == PredictorDist::Gaussian)
            fill_gaussian_row(x, i, law.spec, rng);
        else
            fill_binomial_row(x, i, law, rng);
    }
    return x;
}

Eigen::MatrixXd gen_stratified_predictors(const CorrelationSpec& spec, int n, int m,
                                          RngStream& rng, Eigen::VectorXd* signs) {
    spec.validate();
    if (spec.kind != CorrelationSpec::Kind::Stratified)
        throw std::invalid_argument("spec must be stratified");
    if (spec.f.size() != m)
        throw std::invalid_argument("shift vector length must equal m");
    if (!spec.f.allFinite()) throw std::invalid_argument("shift vector must be finite");
    Eigen::MatrixXd x(n, m);
    const Eigen::ArrayXd col_scale = (1.0 + spec.f.array().square()).sqrt().inverse();
    if (signs) signs->resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = rng.bernoulli(0.5) ? 1.0 : -1.0;
        if (signs) (*signs)[i] = s;
        fill_gaussian_row(x, i, *spec.base, rng);
        x.row(i) = (x.row(i).transpose().array() + s * spec.f.array()) * col_scale;
    }
    return x;
}

Eigen::VectorXd gen_coefficients(const CoeffLaw& law, RngStream& rng) {
    law.validate();
    Eigen::VectorXd beta(law.m);
    const double base = std::sqrt(law.h2 / law.m);
    switch (law.kind) {
        case EffectKind::Gaussian:
            for (int j = 0; j < law.m; ++j) beta[j] = base * rng.normal();
            break;
        case EffectKind::StudentT: {
            const double scale =
                law.nu > 2.0 ? base * std::sqrt((law.nu - 2.0) / law.nu) : base;
            for (int j = 0; j < law.m; ++j) beta[j] = scale * rng.student_t(law.nu);
            break;
        }
        case EffectKind::Mixture: {
            const double sd_big = base * std::sqrt(law.theta / law.p);
            const double sd_small = base * std::sqrt((1.0 - law.theta) / (1.0 - law.p));
            for (int j = 0; j < law.m; ++j)
                beta[j] = (rng.bernoulli(law.p) ? sd_big : sd_small) * rng.normal();
            break;
        }
    }
    return beta;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_outcome(const Eigen::MatrixXd& x,
                                                        const Eigen::VectorXd& beta, double h2,
                                                        RngStream& rng) {
    if (x.cols() != beta.size()) throw std::invalid_argument("beta length must match columns of x");
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    const double sd = std::sqrt(1.0 - h2);
    Eigen::VectorXd eps(x.rows());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = sd * rng.normal();
    Eigen::VectorXd y = x * beta + eps;
    return {std::move(y), std::move(eps)};
}

Dataset gen_stratified_dataset(const CorrelationSpec& spec, double h2, int n, RngStream& rng) {
    spec.validate();
    if (spec.kind != CorrelationSpec::Kind::Stratified)
        throw std::invalid_argument("spec must be stratified");
    const double sigma_xi = spec.sigma_xi;
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    if (!(sigma_xi * sigma_xi + h2 < 1.0))
        throw std::invalid_argument("need sigma_xi^2 + h2 < 1 for a nonnegative noise variance");
    const int m = static_cast<int>(spec.f.size());

    Eigen::VectorXd signs;
    Dataset d;
    d.x = gen_stratified_predictors(spec, n, m, rng, &signs);
    Eigen::VectorXd beta = gen_coefficients(CoeffLaw::gaussian(h2, m), rng);
    Eigen::VectorXd xi = sigma_xi * signs;
    const double sd = std::sqrt(1.0 - h2 - sigma_xi * sigma_xi);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = sd * rng.normal();
    d.y = d.x * beta + xi + eps;
    d.truth = DatasetTruth{std::move(beta), std::move(eps), std::move(xi), spec.f, h2};
    return d;
}

}  // namespace herit
