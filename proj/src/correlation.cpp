#include "herit/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace herit {

CorrelationSpec CorrelationSpec::identity() {
    return CorrelationSpec{};
}

CorrelationSpec CorrelationSpec::ar1(double rho) {
    CorrelationSpec s;
    s.kind = Kind::Ar1;
    s.rho = rho;
    s.validate();
    return s;
}

CorrelationSpec CorrelationSpec::equi(double rho) {
    CorrelationSpec s;
    s.kind = Kind::EquiCorr;
    s.rho = rho;
    s.validate();
    return s;
}

CorrelationSpec CorrelationSpec::mixed_ar1(double rho_first, double rho_second) {
    CorrelationSpec s;
    s.kind = Kind::MixedAr1;
    s.rho_first = rho_first;
    s.rho_second = rho_second;
    s.validate();
    return s;
}

CorrelationSpec CorrelationSpec::stratified(const CorrelationSpec& base, Eigen::VectorXd f,
                                            double sigma_xi) {
    if (!base.analytic())
        throw std::invalid_argument("stratified base structure must not itself be stratified");
    CorrelationSpec s;
    s.kind = Kind::Stratified;
    s.base = std::make_shared<CorrelationSpec>(base);
    s.f = std::move(f);
    s.sigma_xi = sigma_xi;
    s.validate();
    return s;
}

void CorrelationSpec::validate() const {
    auto in_open = [](double r) { return r > -1.0 && r < 1.0; };
    switch (kind) {
        case Kind::Identity:
            break;
        case Kind::Ar1:
            if (!in_open(rho)) throw std::invalid_argument("ar1 rho must lie in (-1, 1)");
            break;
        case Kind::EquiCorr:
            if (rho < 0.0 || rho >= 1.0)
                throw std::invalid_argument("equi-correlation rho must lie in [0, 1)");
            break;
        case Kind::MixedAr1:
            if (!in_open(rho_first) || !in_open(rho_second))
                throw std::invalid_argument("mixed ar1 correlations must lie in (-1, 1)");
            break;
        case Kind::Stratified:
            if (!base) throw std::invalid_argument("stratified spec needs a base structure");
            base->validate();
            if (f.size() == 0) throw std::invalid_argument("stratified spec needs a shift vector");
            if (!f.allFinite()) throw std::invalid_argument("shift vector must be finite");
            if (sigma_xi < 0.0) throw std::invalid_argument("sigma_xi must be nonnegative");
            break;
    }
}

std::string CorrelationSpec::name() const {
    switch (kind) {
        case Kind::Identity: return "identity";
        case Kind::Ar1: return "ar1";
        case Kind::EquiCorr: return "equicorr";
        case Kind::MixedAr1: return "mixed_ar1";
        case Kind::Stratified: return "stratified";
    }
    return "?";
}

namespace {

// l_j for a length-m AR(1) block: 1 + sum of rho^(2d) toward each edge.
Eigen::VectorXd ar1_block_ld(double rho, int m) {
    const double r = rho * rho;
    Eigen::VectorXd out(m);
    if (r == 0.0) {
        out.setOnes();
        return out;
    }
    const double c = r / (1.0 - r);
    for (int j = 0; j < m; ++j) {
        const int left = j;
        const int right = m - 1 - j;
        out[j] = 1.0 + c * (1.0 - std::pow(r, left)) + c * (1.0 - std::pow(r, right));
    }
    return out;
}

}  // namespace

Eigen::VectorXd population_ld_scores(const CorrelationSpec& spec, int m) {
    spec.validate();
    if (m <= 0) throw std::invalid_argument("m must be positive");
    using Kind = CorrelationSpec::Kind;
    switch (spec.kind) {
        case Kind::Identity:
            return Eigen::VectorXd::Ones(m);
        case Kind::Ar1:
            return ar1_block_ld(spec.rho, m);
        case Kind::EquiCorr:
            return Eigen::VectorXd::Constant(m, 1.0 + (m - 1) * spec.rho * spec.rho);
        case Kind::MixedAr1: {
            const int m1 = m / 2;
            Eigen::VectorXd out(m);
            out.head(m1) = ar1_block_ld(spec.rho_first, m1);
            out.tail(m - m1) = ar1_block_ld(spec.rho_second, m - m1);
            return out;
        }
        case Kind::Stratified:
            throw std::invalid_argument(
                "population LD scores are not defined analytically for stratified structures");
    }
    throw std::invalid_argument("unknown correlation kind");
}

Eigen::MatrixXd correlation_matrix(const CorrelationSpec& spec, int m) {
    spec.validate();
    if (m <= 0) throw std::invalid_argument("m must be positive");
    using Kind = CorrelationSpec::Kind;
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m, m);
    switch (spec.kind) {
        case Kind::Identity:
            return s;
        case Kind::Ar1:
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < j; ++k) s(j, k) = s(k, j) = std::pow(spec.rho, j - k);
            return s;
        case Kind::EquiCorr:
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < j; ++k) s(j, k) = s(k, j) = spec.rho;
            return s;
        case Kind::MixedAr1: {
            const int m1 = m / 2;
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < j; ++k) {
                    const bool same = (j < m1) == (k < m1);
                    if (!same) continue;
                    const double rho = j < m1 ? spec.rho_first : spec.rho_second;
                    s(j, k) = s(k, j) = std::pow(rho, j - k);
                }
            return s;
        }
        case Kind::Stratified:
            throw std::invalid_argument(
                "correlation matrix is not defined analytically for stratified structures");
    }
    throw std::invalid_argument("unknown correlation kind");
}

}  // namespace herit
