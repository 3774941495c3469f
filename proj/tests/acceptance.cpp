// Acceptance checks, one per command-line argument 1..11. Each prints a
// single PASS/FAIL line with the measured quantities and exits nonzero on
// failure.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "herit/accumulate.hpp"
#include "herit/correlation.hpp"
#include "herit/diagnostics.hpp"
#include "herit/estimators.hpp"
#include "herit/experiments.hpp"
#include "herit/generators.hpp"
#include "herit/io.hpp"
#include "herit/rng.hpp"
#include "herit/summary.hpp"

namespace {

struct Outcome {
    bool pass = false;
    std::string details;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

herit::ExperimentConfig weak_config(const std::string& structure, double rho,
                                    std::vector<int> n_grid, int reps, std::uint64_t seed) {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::WeakVsStrong;
    cfg.structure = structure;
    cfg.rho = rho;
    cfg.h2 = 0.2;
    cfg.n_grid = std::move(n_grid);
    cfg.m_rule = {herit::MRule::Kind::TwiceN, 0};
    cfg.replicates = reps;
    cfg.seed = seed;
    herit::EstimatorSpec gwash;
    herit::EstimatorSpec ldsc;
    ldsc.family = herit::Family::Ldsc;
    cfg.estimators = {gwash, ldsc};
    return cfg;
}

const herit::AggregateRow& cell(const std::vector<herit::AggregateRow>& agg,
                                const std::string& estimator, int n) {
    for (const auto& a : agg)
        if (a.estimator == estimator && a.n == n) return a;
    throw std::runtime_error("missing aggregate cell " + estimator + "/" + std::to_string(n));
}

// 1. Mean recovery under weak dependence for both basic estimators.
Outcome criterion1() {
    auto table = herit::run_experiment(weak_config("ar1", 0.3, {250, 500}, 300, 101));
    double worst = 0.0;
    std::string cells;
    for (const auto& a : table.aggregates) {
        worst = std::max(worst, std::abs(a.mean - 0.2));
        cells += fmt("%s%s n=%d mean %.4f (mc se %.4f)", cells.empty() ? "" : ", ",
                     a.estimator.c_str(), a.n, a.mean, a.mc_se);
    }
    return {worst <= 0.02,
            fmt("max |mean - 0.2| = %.4f (tol 0.02): %s", worst, cells.c_str())};
}

// 2. SE shrinks with n under weak dependence, stays flat under equicorrelation.
Outcome criterion2() {
    auto ar1 = herit::run_experiment(weak_config("ar1", 0.3, {250, 1000}, 300, 102));
    auto equi = herit::run_experiment(weak_config("equicorr", 0.2, {250, 1000}, 300, 103));
    bool pass = true;
    std::string details;
    for (const std::string est : {"gwash", "ldsc"}) {
        const double r_ar1 =
            cell(ar1.aggregates, est, 1000).se / cell(ar1.aggregates, est, 250).se;
        const double r_equi =
            cell(equi.aggregates, est, 1000).se / cell(equi.aggregates, est, 250).se;
        pass = pass && r_ar1 <= 0.65 && r_equi >= 0.7;
        details += fmt("%s%s: ar1 ratio %.3f (need <= 0.65), equicorr ratio %.3f (need >= 0.7)",
                       details.empty() ? "" : "; ", est.c_str(), r_ar1, r_equi);
    }
    return {pass, details};
}

// 3. Conditional variance formula against brute-force coefficient redraws.
Outcome criterion3() {
    const int n = 50, m = 100, redraws = 20000;
    const double h2 = 0.2;
    herit::RngStream rx(104, {1});
    auto x = herit::gen_predictors(
        herit::PredictorLaw::gaussian(herit::CorrelationSpec::ar1(0.5)), n, m, rx);
    const double formula = herit::conditional_variance_gwash(x, h2, 3.0, 3.0);

    herit::RngStream rng(104, {2});
    auto claw = herit::CoeffLaw::gaussian(h2, m);
    herit::KahanSum sum, sumsq;
    for (int k = 0; k < redraws; ++k) {
        auto beta = herit::gen_coefficients(claw, rng);
        auto y = herit::gen_outcome(x, beta, h2, rng).first;
        auto u = herit::correlation_scores(x, y, false);
        const double big_n = u.u.squaredNorm() / m - 1.0;
        sum.add(big_n);
        sumsq.add(big_n * big_n);
    }
    const double mean = sum.value() / redraws;
    const double var = sumsq.value() / redraws - mean * mean;
    const double rel = std::abs(var / formula - 1.0);
    return {rel <= 0.05,
            fmt("empirical var %.6g vs formula %.6g, rel err %.3f (tol 0.05)", var, formula, rel)};
}

// 4. Mean estimated reference LD score per column.
Outcome criterion4() {
    const int n_ref = 200, m = 100, panels = 2000;
    Eigen::VectorXd target =
        herit::population_ld_scores(herit::CorrelationSpec::ar1(0.5), m) * (1.0 + 1.0 / n_ref);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    auto law = herit::PredictorLaw::gaussian(herit::CorrelationSpec::ar1(0.5));
    for (int p = 0; p < panels; ++p) {
        herit::RngStream rng(105, {static_cast<std::uint64_t>(p)});
        auto x = herit::gen_predictors(law, n_ref, m, rng);
        acc += herit::ld_scores_reference(x, true).values;
    }
    acc /= panels;
    double worst = 0.0;
    for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(acc[j] / target[j] - 1.0));
    return {worst <= 0.02, fmt("max per-column rel err %.4f over %d panels (tol 0.02)", worst,
                               panels)};
}

// 5. Exact algebraic identities between estimator forms.
Outcome criterion5() {
    const int n = 300, m = 150, n_ref = 2000;
    herit::RngStream rng(106, {1});
    auto law = herit::PredictorLaw::gaussian(herit::CorrelationSpec::ar1(0.5));
    auto x = herit::gen_predictors(law, n, m, rng);
    auto beta = herit::gen_coefficients(herit::CoeffLaw::gaussian(0.2, m), rng);
    auto y = herit::gen_outcome(x, beta, 0.2, rng).first;
    auto u = herit::correlation_scores(x, y, false);
    auto x_ref = herit::gen_predictors(law, n_ref, m, rng);
    auto ld = herit::ld_scores_reference(x_ref, true);

    const double ratio = herit::gwash_fixed(u, ld).h2_hat;
    const double s2 = u.u.squaredNorm() / m;
    const double moment = static_cast<double>(m) / (n * herit::mu2_hat(ld)) * (s2 - 1.0);
    const double rel_a = std::abs(moment / ratio - 1.0);

    if (ld.values.minCoeff() < 1.0)
        return {false, fmt("precondition failed: min ld score %.3f < 1", ld.values.minCoeff())};
    auto ld_trunc = herit::truncate_ld_scores(ld);
    const double wg = herit::weighted_estimate(herit::Family::Gwash, u, ld, ld_trunc).h2_hat;
    const double wl = herit::weighted_estimate(herit::Family::Ldsc, u, ld, ld_trunc).h2_hat;
    const double rel_b = std::abs(wl / wg - 1.0);

    herit::LdScores flat;
    flat.values = Eigen::VectorXd::Constant(m, 1.7);
    flat.n_ref = n_ref;
    flat.m = m;
    flat.kind = herit::LdKind::BiasCorrected;
    const double rel_c =
        std::abs(herit::ldsc_fixed(u, flat).h2_hat / herit::gwash_fixed(u, flat).h2_hat - 1.0);

    const bool pass = rel_a <= 1e-12 && rel_b <= 1e-12 && rel_c <= 1e-12;
    return {pass, fmt("rel diffs: moment form %.2e, weighted families %.2e, constant-ld %.2e "
                      "(tol 1e-12)",
                      rel_a, rel_b, rel_c)};
}

// 6. Mean squared fluctuation of the realized heritability in m.
Outcome criterion6() {
    const int draws = 40000;
    const double h2 = 0.2, s_eps = 1.0 - h2;
    auto mse = [&](const herit::CoeffLaw& law, std::uint64_t seed) {
        herit::RngStream rng(107, {seed});
        herit::KahanSum acc;
        for (int k = 0; k < draws; ++k) {
            const double t = herit::gen_coefficients(law, rng).squaredNorm();
            const double h2b = t / (t + s_eps);
            acc.add((h2b - h2) * (h2b - h2));
        }
        return acc.value() / draws;
    };
    const double g_ratio = mse(herit::CoeffLaw::gaussian(h2, 100), 1) /
                           mse(herit::CoeffLaw::gaussian(h2, 1000), 2);
    const double c100 = mse(herit::CoeffLaw::mixture(h2, 100, 0.5, 1.0 / 100), 3);
    const double c1000 = mse(herit::CoeffLaw::mixture(h2, 1000, 0.5, 1.0 / 1000), 4);
    const double c_ratio = c100 / c1000;
    const bool pass = g_ratio >= 7.0 && g_ratio <= 13.0 && c_ratio <= 2.0;
    return {pass, fmt("gaussian mse ratio m=100/m=1000 = %.2f (need [7, 13]); concentrated "
                      "mixture ratio = %.2f (need <= 2)",
                      g_ratio, c_ratio)};
}

// 7. Stratification bias matches the theoretical shift for all estimators.
Outcome criterion7() {
    bool pass = true;
    std::string details;
    std::uint64_t seed = 108;
    for (double var_f : {0.2, 0.3, 0.5}) {
        herit::ExperimentConfig cfg;
        cfg.scenario = herit::Scenario::PopStrat;
        cfg.rho = 0.3;
        cfg.h2 = 0.2;
        cfg.sigma_xi = 0.3;
        cfg.var_f = var_f;
        cfg.n_grid = {400};
        cfg.m_rule = {herit::MRule::Kind::Fixed, 800};
        cfg.replicates = 200;
        cfg.seed = seed++;
        herit::EstimatorSpec gwash;
        herit::EstimatorSpec ldsc;
        ldsc.family = herit::Family::Ldsc;
        herit::EstimatorSpec free_i;
        free_i.family = herit::Family::Ldsc;
        free_i.intercept = herit::Intercept::Free;
        cfg.estimators = {gwash, ldsc, free_i};
        auto table = herit::run_experiment(cfg);

        // Theoretical shift from the realized shift vectors, replayed from the
        // per-replicate stream.
        herit::KahanSum theo;
        const double sd = std::sqrt(var_f);
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            herit::RngStream s_f(cfg.seed, {0, static_cast<std::uint64_t>(rep),
                                            herit::stream_tag::shift_vector});
            Eigen::VectorXd f(800);
            for (int j = 0; j < 800; ++j) f[j] = sd * s_f.normal();
            theo.add(herit::popstrat_theoretical_bias(f, cfg.sigma_xi));
        }
        const double shift = theo.value() / cfg.replicates;

        std::vector<double> means;
        for (const char* est : {"gwash", "ldsc", "ldsc_free"}) {
            const auto& a = cell(table.aggregates, est, 400);
            means.push_back(a.mean);
            const double gap = std::abs((a.mean - cfg.h2) - shift);
            if (gap > 0.15) pass = false;
            details += fmt("%svar_f=%.1f %s bias %.3f vs theory %.3f", details.empty() ? "" : "; ",
                           var_f, est, a.mean - cfg.h2, shift);
        }
        for (std::size_t i = 0; i < means.size(); ++i)
            for (std::size_t j = i + 1; j < means.size(); ++j)
                if (std::abs(means[i] - means[j]) > 0.1) pass = false;
    }
    return {pass, details};
}

// 8. Standardization bias direction under heavy-tailed effects.
Outcome criterion8() {
    herit::ExperimentConfig heavy;
    heavy.scenario = herit::Scenario::NonGaussBeta;
    heavy.rho = 0.3;
    heavy.nu = 2.0;
    heavy.h2 = 0.2;
    heavy.n_grid = {500};
    heavy.m_rule = {herit::MRule::Kind::TwiceN, 0};
    heavy.replicates = 300;
    heavy.seed = 109;
    herit::EstimatorSpec gwash_std;
    gwash_std.standardized_inputs = true;
    heavy.estimators = {gwash_std};
    auto heavy_table = herit::run_experiment(heavy);
    const double heavy_mean = cell(heavy_table.aggregates, "gwash_std", 500).mean;

    auto base = weak_config("ar1", 0.3, {500}, 300, 1090);
    base.estimators = {gwash_std};
    auto base_table = herit::run_experiment(base);
    const double base_mean = cell(base_table.aggregates, "gwash_std", 500).mean;

    const bool pass = heavy_mean <= 0.18 && std::abs(base_mean - 0.2) <= 0.02;
    return {pass, fmt("t(2) effects mean %.4f (need <= 0.18); gaussian effects mean %.4f "
                      "(need within 0.02 of 0.2)",
                      heavy_mean, base_mean)};
}

// 9. Weighting reduces the standard error for both families.
Outcome criterion9() {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::Weighting;
    cfg.rho_first = 0.2;
    cfg.rho_second = 0.9;
    cfg.h2 = 0.2;
    cfg.n_grid = {500};
    cfg.m_rule = {herit::MRule::Kind::TwiceN, 0};
    cfg.replicates = 300;
    cfg.seed = 110;
    herit::EstimatorSpec g, gw, l, lw;
    g.standardized_inputs = true;
    gw.standardized_inputs = true;
    gw.weighted = true;
    l.family = herit::Family::Ldsc;
    l.standardized_inputs = true;
    lw.family = herit::Family::Ldsc;
    lw.standardized_inputs = true;
    lw.weighted = true;
    cfg.estimators = {g, gw, l, lw};
    auto table = herit::run_experiment(cfg);
    const double se_g = cell(table.aggregates, "gwash_std", 500).se;
    const double se_gw = cell(table.aggregates, "gwash_w_std", 500).se;
    const double se_l = cell(table.aggregates, "ldsc_std", 500).se;
    const double se_lw = cell(table.aggregates, "ldsc_w_std", 500).se;
    const bool pass = se_gw <= se_g && se_lw <= se_l;
    return {pass, fmt("gwash se %.4f -> weighted %.4f; ldsc se %.4f -> weighted %.4f", se_g,
                      se_gw, se_l, se_lw)};
}

// 10. Binomial generator marginals and adjacent correlation.
Outcome criterion10() {
    const int n = 100000;
    bool pass = true;
    std::string details;
    const auto specs = {std::make_pair(std::string("ar1_chain"), herit::CorrelationSpec::ar1(0.3)),
                        std::make_pair(std::string("threshold_equicorr"),
                                       herit::CorrelationSpec::equi(0.3))};
    std::uint64_t seed = 111;
    for (const auto& [name, corr] : specs) {
        herit::RngStream rng(seed++, {1});
        auto x = herit::gen_predictors(herit::PredictorLaw::binomial(0.5, corr), n, 2, rng);
        int mid = 0;
        for (int i = 0; i < n; ++i)
            if (std::abs(x(i, 0)) < 1e-9) ++mid;
        const double p_mid = static_cast<double>(mid) / n;
        Eigen::VectorXd a = x.col(0), b = x.col(1);
        const double corr_hat =
            (a.dot(b) / n - a.mean() * b.mean()) /
            std::sqrt((a.squaredNorm() / n - a.mean() * a.mean()) *
                      (b.squaredNorm() / n - b.mean() * b.mean()));
        if (std::abs(p_mid - 0.5) > 0.01 || std::abs(corr_hat - 0.3) > 0.02) pass = false;
        details += fmt("%s%s: P(value=1) = %.4f (tol 0.01), adjacent corr %.4f (tol 0.02)",
                       details.empty() ? "" : "; ", name.c_str(), p_mid, corr_hat);
    }
    return {pass, details};
}

// 11. Byte-identical CSV output across thread counts.
Outcome criterion11() {
    auto cfg = weak_config("ar1", 0.3, {40, 60}, 10, 112);
    char buf[] = "/tmp/herit_acc_XXXXXX";
    const std::string dir = mkdtemp(buf);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    std::string rows1, agg1, rows5, agg5;
    for (const char* threads : {"1", "5"}) {
        setenv("HERIT_THREADS", threads, 1);
        auto table = herit::run_experiment(cfg);
        const std::string rows_path = dir + "/rows_" + threads + ".csv";
        const std::string agg_path = dir + "/agg_" + threads + ".csv";
        herit::write_result_rows(rows_path, table.rows);
        herit::write_aggregates(agg_path, table.aggregates);
        (std::strcmp(threads, "1") == 0 ? rows1 : rows5) = slurp(rows_path);
        (std::strcmp(threads, "1") == 0 ? agg1 : agg5) = slurp(agg_path);
    }
    unsetenv("HERIT_THREADS");
    std::filesystem::remove_all(dir);
    const bool pass = !rows1.empty() && rows1 == rows5 && agg1 == agg5;
    return {pass, fmt("rows.csv %s (%zu bytes), aggregates.csv %s across HERIT_THREADS 1 vs 5",
                      rows1 == rows5 ? "identical" : "DIFFER", rows1.size(),
                      agg1 == agg5 ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..11>\n", argv[0]);
        return 2;
    }
    const int c = std::atoi(argv[1]);
    if (c < 1 || c > 11) {
        std::fprintf(stderr, "criterion must be 1..11, got '%s'\n", argv[1]);
        return 2;
    }

    Outcome (*checks[])() = {criterion1, criterion2, criterion3, criterion4,
                             criterion5, criterion6, criterion7, criterion8,
                             criterion9, criterion10, criterion11};
    const auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
        result = checks[c - 1]();
    } catch (const std::exception& e) {
        result = {false, std::string("exception: ") + e.what()};
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Explicit runtime budgets.
    if (c == 1 && elapsed > 600.0) {
        result.pass = false;
        result.details += fmt("; runtime %.0f s exceeds 600 s budget", elapsed);
    }
    if (c == 3 && elapsed > 120.0) {
        result.pass = false;
        result.details += fmt("; runtime %.0f s exceeds 120 s budget", elapsed);
    }

    std::printf("criterion %d: %s - %s (%.1f s)\n", c, result.pass ? "PASS" : "FAIL",
                result.details.c_str(), elapsed);
    return result.pass ? 0 : 1;
}
