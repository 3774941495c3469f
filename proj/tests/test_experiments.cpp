#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "herit/experiments.hpp"

namespace {

herit::ExperimentConfig small_config() {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::WeakVsStrong;
    cfg.structure = "ar1";
    cfg.rho = 0.3;
    cfg.h2 = 0.2;
    cfg.n_grid = {40, 60};
    cfg.m_rule = {herit::MRule::Kind::TwiceN, 0};
    cfg.replicates = 6;
    cfg.seed = 11;
    herit::EstimatorSpec gwash;
    herit::EstimatorSpec ldsc_std;
    ldsc_std.family = herit::Family::Ldsc;
    ldsc_std.standardized_inputs = true;
    cfg.estimators = {gwash, ldsc_std};
    return cfg;
}

bool same_rows(const std::vector<herit::ResultRow>& a, const std::vector<herit::ResultRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& r = a[i];
        const auto& s = b[i];
        if (r.scenario != s.scenario || r.estimator != s.estimator || r.n != s.n || r.m != s.m ||
            r.rep != s.rep || r.ok != s.ok)
            return false;
        if (r.ok && r.h2_hat != s.h2_hat) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("experiment runs are deterministic and thread-count independent") {
    auto cfg = small_config();
    setenv("HERIT_THREADS", "1", 1);
    auto serial = herit::run_experiment(cfg);
    auto again = herit::run_experiment(cfg);
    CHECK(same_rows(serial.rows, again.rows));
    setenv("HERIT_THREADS", "3", 1);
    auto parallel = herit::run_experiment(cfg);
    unsetenv("HERIT_THREADS");
    CHECK(same_rows(serial.rows, parallel.rows));
}

TEST_CASE("row layout follows cell, replicate, estimator order") {
    auto cfg = small_config();
    setenv("HERIT_THREADS", "2", 1);
    auto table = herit::run_experiment(cfg);
    unsetenv("HERIT_THREADS");
    REQUIRE(table.rows.size() == 2u * 6u * 2u);
    std::size_t i = 0;
    for (int cell = 0; cell < 2; ++cell)
        for (int rep = 0; rep < 6; ++rep)
            for (const char* est : {"gwash", "ldsc_std"}) {
                const auto& row = table.rows[i++];
                CHECK(row.scenario == "weak_vs_strong_ar1");
                CHECK(row.estimator == est);
                CHECK(row.n == cfg.n_grid[cell]);
                CHECK(row.m == 2 * cfg.n_grid[cell]);
                CHECK(row.rep == rep);
                CHECK(row.ok);
            }
    auto agg = herit::summarize(table.rows, cfg.h2);
    REQUIRE(agg.size() == table.aggregates.size());
    for (std::size_t k = 0; k < agg.size(); ++k) {
        CHECK(agg[k].estimator == table.aggregates[k].estimator);
        CHECK(agg[k].n == table.aggregates[k].n);
        CHECK(agg[k].mean == table.aggregates[k].mean);
        CHECK(agg[k].se == table.aggregates[k].se);
        CHECK(agg[k].n_ok == table.aggregates[k].n_ok);
    }
}

TEST_CASE("summarize computes sample moments and skips failures") {
    std::vector<herit::ResultRow> rows;
    rows.push_back({"s", "e", 10, 20, 0, 0.1, true});
    rows.push_back({"s", "e", 10, 20, 1, 0.3, true});
    auto agg = herit::summarize(rows, 0.2);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].mean == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(agg[0].bias == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(agg[0].se == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    CHECK(agg[0].mc_se == doctest::Approx(std::sqrt(0.01)).epsilon(1e-12));
    CHECK(agg[0].n_ok == 2);

    rows.push_back({"s", "e", 10, 20, 2, std::numeric_limits<double>::quiet_NaN(), false});
    auto agg2 = herit::summarize(rows, 0.2);
    REQUIRE(agg2.size() == 1);
    CHECK(agg2[0].mean == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(agg2[0].n_ok == 2);

    std::vector<herit::ResultRow> dead;
    dead.push_back({"s", "e", 10, 20, 0, 0.0, false});
    dead.push_back({"s", "e", 10, 20, 1, 0.0, false});
    CHECK_THROWS_AS(herit::summarize(dead, 0.2), std::runtime_error);
    CHECK_THROWS_AS(herit::summarize({}, 0.2), std::invalid_argument);
}

TEST_CASE("replicate streams are pairwise distinct across uses and replicates") {
    std::set<std::uint64_t> seen;
    std::size_t count = 0;
    for (int cell : {0, 1})
        for (int rep : {0, 1, 7}) {
            auto ids = herit::replicate_stream_ids(5, cell, rep);
            REQUIRE(ids.size() == 5);
            for (auto id : ids) seen.insert(id);
            count += ids.size();
        }
    CHECK(seen.size() == count);
    CHECK(herit::replicate_stream_ids(5, 0, 0) == herit::replicate_stream_ids(5, 0, 0));
    CHECK(herit::replicate_stream_ids(5, 0, 0) != herit::replicate_stream_ids(6, 0, 0));
}

TEST_CASE("worker count honors the environment override") {
    setenv("HERIT_THREADS", "7", 1);
    CHECK(herit::worker_count() == 7);
    setenv("HERIT_THREADS", "0", 1);
    CHECK(herit::worker_count() >= 1);
    unsetenv("HERIT_THREADS");
    CHECK(herit::worker_count() >= 1);
}

TEST_CASE("config validation rejects broken grids") {
    auto ok = small_config();
    CHECK_NOTHROW(ok.validate());
    auto c1 = ok;
    c1.n_grid.clear();
    CHECK_THROWS_AS(c1.validate(), std::invalid_argument);
    auto c2 = ok;
    c2.n_grid = {1};
    CHECK_THROWS_AS(c2.validate(), std::invalid_argument);
    auto c3 = ok;
    c3.replicates = 1;
    CHECK_THROWS_AS(c3.validate(), std::invalid_argument);
    auto c4 = ok;
    c4.estimators.clear();
    CHECK_THROWS_AS(c4.validate(), std::invalid_argument);
    auto c5 = ok;
    c5.h2 = 1.5;
    CHECK_THROWS_AS(c5.validate(), std::invalid_argument);
    auto c6 = ok;
    c6.m_rule = {herit::MRule::Kind::Fixed, 0};
    CHECK_THROWS_AS(c6.validate(), std::invalid_argument);
    auto c7 = ok;
    c7.scenario = herit::Scenario::PopStrat;
    c7.sigma_xi = 0.95;
    CHECK_THROWS_AS(c7.validate(), std::invalid_argument);
    auto c8 = ok;
    c8.scenario = herit::Scenario::Custom;
    CHECK_THROWS_AS(c8.validate(), std::invalid_argument);
    auto c9 = ok;
    c9.structure = "banded";
    CHECK_THROWS_AS(herit::run_experiment(c9), std::invalid_argument);
}

TEST_CASE("scenario labels") {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::WeakVsStrong;
    cfg.structure = "ar1";
    CHECK(cfg.scenario_label() == "weak_vs_strong_ar1");
    cfg.structure = "equicorr";
    CHECK(cfg.scenario_label() == "weak_vs_strong_equicorr");
    cfg.scenario = herit::Scenario::NonGaussBeta;
    CHECK(cfg.scenario_label() == "nongauss_beta");
    cfg.scenario = herit::Scenario::BinomialPredictors;
    cfg.construction = "threshold_equicorr";
    CHECK(cfg.scenario_label() == "binomial_threshold_equicorr");
    cfg.scenario = herit::Scenario::Weighting;
    CHECK(cfg.scenario_label() == "weighting");
    cfg.scenario = herit::Scenario::PopStrat;
    CHECK(cfg.scenario_label() == "popstrat");
    cfg.scenario = herit::Scenario::Custom;
    CHECK(cfg.scenario_label() == "custom");
    cfg.label = "named";
    CHECK(cfg.scenario_label() == "named");
}

TEST_CASE("a cell that always fails aborts the run") {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::Custom;
    herit::CustomLaws laws;
    laws.corr = herit::CorrelationSpec::identity();
    cfg.custom = laws;
    cfg.n_grid = {4};
    cfg.m_rule = {herit::MRule::Kind::Fixed, 1};  // one predictor: no regression slope
    cfg.replicates = 10;
    herit::EstimatorSpec free_int;
    free_int.family = herit::Family::Ldsc;
    free_int.intercept = herit::Intercept::Free;
    cfg.estimators = {free_int};
    CHECK_THROWS_AS(herit::run_experiment(cfg), std::runtime_error);
}

TEST_CASE("stratified scenario runs end to end and inflates the estimate") {
    herit::ExperimentConfig cfg;
    cfg.scenario = herit::Scenario::PopStrat;
    cfg.rho = 0.3;
    cfg.h2 = 0.2;
    cfg.sigma_xi = 0.3;
    cfg.var_f = 0.3;
    cfg.n_grid = {60};
    cfg.m_rule = {herit::MRule::Kind::Fixed, 40};
    cfg.replicates = 40;
    cfg.seed = 21;
    cfg.estimators = {herit::EstimatorSpec{}};
    auto table = herit::run_experiment(cfg);
    REQUIRE(table.aggregates.size() == 1);
    const auto& agg = table.aggregates[0];
    CHECK(agg.scenario == "popstrat");
    CHECK(agg.n_ok == 40);
    CHECK(std::isfinite(agg.mean));
    CHECK(agg.mean > cfg.h2 + 0.1);
}
