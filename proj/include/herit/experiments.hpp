#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herit/estimators.hpp"
#include "herit/generators.hpp"

namespace herit {

enum class Scenario { WeakVsStrong, NonGaussBeta, BinomialPredictors, Weighting, PopStrat, Custom };

struct MRule {
    enum class Kind { TwiceN, Fixed };
    Kind kind = Kind::TwiceN;
    int fixed_m = 0;
    int m_for(int n) const { return kind == Kind::TwiceN ? 2 * n : fixed_m; }
};

// Custom scenario: explicit predictor structure and effect law (built per
// cell since the coefficient law depends on m).
struct CustomLaws {
    PredictorDist distribution = PredictorDist::Gaussian;
    double binom_p = 0.5;
    CorrelationSpec corr;
    EffectKind effect = EffectKind::Gaussian;
    double nu = 0.0;
    double theta = 0.0;
    double mix_p = 0.0;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::WeakVsStrong;
    std::string label;  // scenario column in output; defaulted when empty
    std::vector<int> n_grid;
    MRule m_rule;
    double h2 = 0.2;

    // Scenario parameters; each scenario reads the ones it needs.
    std::string structure = "ar1";  // WeakVsStrong: ar1 | equicorr
    double rho = 0.3;
    double nu = 2.0;                          // NonGaussBeta
    std::string construction = "ar1_chain";   // Binomial: ar1_chain | threshold_equicorr
    double p = 0.5;                           // Binomial
    double rho_first = 0.2, rho_second = 0.9; // Weighting
    double sigma_xi = 0.3, var_f = 0.3;       // PopStrat
    std::optional<CustomLaws> custom;

    std::vector<EstimatorSpec> estimators;
    int replicates = 1000;
    std::uint64_t seed = 1;

    void validate() const;
    std::string scenario_label() const;
};

struct ResultRow {
    std::string scenario;
    std::string estimator;
    int n = 0;
    int m = 0;
    int rep = 0;
    double h2_hat = 0.0;
    bool ok = false;
};

struct AggregateRow {
    std::string scenario;
    std::string estimator;
    int n = 0;
    int m = 0;
    double mean = 0.0;
    double bias = 0.0;
    double se = 0.0;
    double mc_se = 0.0;
    int n_ok = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;
};

// Worker count: HERIT_THREADS when set, hardware concurrency otherwise.
int worker_count();

// Stream ids a replicate draws from, in a fixed order (predictors,
// coefficients, noise, reference panel, shift vector). Exposed so tests can
// verify the streams are pairwise distinct.
std::vector<std::uint64_t> replicate_stream_ids(std::uint64_t seed, int cell, int rep);

// Runs the full grid x replicate loop. Estimator failures inside a replicate
// become missing rows; more than 1% missing in any cell aborts.
ResultTable run_experiment(const ExperimentConfig& config);

// Per (scenario, estimator, n, m) moments over the successful rows.
std::vector<AggregateRow> summarize(const std::vector<ResultRow>& rows, double h2);

}  // namespace herit
