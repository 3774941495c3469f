#include "herit/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "herit/accumulate.hpp"
#include "herit/summary.hpp"

namespace herit {

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw std::invalid_argument("n_grid must be nonempty");
    for (int n : n_grid)
        if (n < 2) throw std::invalid_argument("grid sample sizes must be at least 2");
    if (m_rule.kind == MRule::Kind::Fixed && m_rule.fixed_m < 1)
        throw std::invalid_argument("fixed m must be positive");
    if (!(h2 >= 0.0 && h2 <= 1.0)) throw std::invalid_argument("h2 must lie in [0, 1]");
    if (replicates < 2) throw std::invalid_argument("need at least 2 replicates");
    if (estimators.empty()) throw std::invalid_argument("need at least one estimator");
    for (const auto& e : estimators) e.validate();
    if (scenario == Scenario::Custom && !custom)
        throw std::invalid_argument("custom scenario needs explicit laws");
    if (scenario == Scenario::PopStrat && !(sigma_xi * sigma_xi + h2 < 1.0))
        throw std::invalid_argument("need sigma_xi^2 + h2 < 1");
}

std::string ExperimentConfig::scenario_label() const {
    if (!label.empty()) return label;
    switch (scenario) {
        case Scenario::WeakVsStrong: return "weak_vs_strong_" + structure;
        case Scenario::NonGaussBeta: return "nongauss_beta";
        case Scenario::BinomialPredictors: return "binomial_" + construction;
        case Scenario::Weighting: return "weighting";
        case Scenario::PopStrat: return "popstrat";
        case Scenario::Custom: return "custom";
    }
    return "?";
}

int worker_count() {
    if (const char* env = std::getenv("HERIT_THREADS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<std::uint64_t> replicate_stream_ids(std::uint64_t seed, int cell, int rep) {
    const auto c = static_cast<std::uint64_t>(cell);
    const auto r = static_cast<std::uint64_t>(rep);
    std::vector<std::uint64_t> ids;
    for (std::uint64_t tag : {stream_tag::predictors, stream_tag::coefficients, stream_tag::noise,
                              stream_tag::reference_panel, stream_tag::shift_vector})
        ids.push_back(RngStream(seed, {c, r, tag}).id());
    return ids;
}

namespace {

struct CellDesign {
    PredictorLaw law;          // non-stratified scenarios
    CoeffLaw coeff;
    bool stratified = false;   // PopStrat draws f per replicate
};

CellDesign cell_design(const ExperimentConfig& cfg, int m) {
    CellDesign d;
    switch (cfg.scenario) {
        case Scenario::WeakVsStrong: {
            const CorrelationSpec corr = cfg.structure == "equicorr"
                                             ? CorrelationSpec::equi(cfg.rho)
                                             : CorrelationSpec::ar1(cfg.rho);
            if (cfg.structure != "equicorr" && cfg.structure != "ar1")
                throw std::invalid_argument("structure must be ar1 or equicorr");
            d.law = PredictorLaw::gaussian(corr);
            d.coeff = CoeffLaw::gaussian(cfg.h2, m);
            break;
        }
        case Scenario::NonGaussBeta:
            d.law = PredictorLaw::gaussian(CorrelationSpec::ar1(cfg.rho));
            d.coeff = CoeffLaw::student_t(cfg.h2, m, cfg.nu);
            break;
        case Scenario::BinomialPredictors: {
            if (cfg.construction == "ar1_chain")
                d.law = PredictorLaw::binomial(cfg.p, CorrelationSpec::ar1(cfg.rho));
            else if (cfg.construction == "threshold_equicorr")
                d.law = PredictorLaw::binomial(cfg.p, CorrelationSpec::equi(cfg.rho));
            else
                throw std::invalid_argument("construction must be ar1_chain or threshold_equicorr");
            d.coeff = CoeffLaw::gaussian(cfg.h2, m);
            break;
        }
        case Scenario::Weighting:
            d.law = PredictorLaw::gaussian(
                CorrelationSpec::mixed_ar1(cfg.rho_first, cfg.rho_second));
            d.coeff = CoeffLaw::gaussian(cfg.h2, m);
            break;
        case Scenario::PopStrat:
            d.stratified = true;
            d.coeff = CoeffLaw::gaussian(cfg.h2, m);
            break;
        case Scenario::Custom: {
            const CustomLaws& c = *cfg.custom;
            d.law = c.distribution == PredictorDist::Gaussian
                        ? PredictorLaw::gaussian(c.corr)
                        : PredictorLaw::binomial(c.binom_p, c.corr);
            switch (c.effect) {
                case EffectKind::Gaussian: d.coeff = CoeffLaw::gaussian(cfg.h2, m); break;
                case EffectKind::StudentT: d.coeff = CoeffLaw::student_t(cfg.h2, m, c.nu); break;
                case EffectKind::Mixture:
                    d.coeff = CoeffLaw::mixture(cfg.h2, m, c.theta, c.mix_p);
                    break;
            }
            break;
        }
    }
    return d;
}

void run_replicate(const ExperimentConfig& cfg, const CellDesign& design, int cell, int n, int m,
                   int rep, ResultRow* out) {
    const auto c = static_cast<std::uint64_t>(cell);
    const auto r = static_cast<std::uint64_t>(rep);

    Eigen::MatrixXd x, x_ref;
    Eigen::VectorXd y;
    if (design.stratified) {
        RngStream s_f(cfg.seed, {c, r, stream_tag::shift_vector});
        Eigen::VectorXd f(m);
        const double sd = std::sqrt(cfg.var_f);
        for (int j = 0; j < m; ++j) f[j] = sd * s_f.normal();
        const CorrelationSpec strat =
            CorrelationSpec::stratified(CorrelationSpec::ar1(cfg.rho), f, cfg.sigma_xi);
        RngStream s_data(cfg.seed, {c, r, stream_tag::predictors});
        Dataset d = gen_stratified_dataset(strat, cfg.h2, n, s_data);
        x = std::move(d.x);
        y = std::move(d.y);
        RngStream s_ref(cfg.seed, {c, r, stream_tag::reference_panel});
        x_ref = gen_stratified_predictors(strat, n, m, s_ref, nullptr);
    } else {
        RngStream s_x(cfg.seed, {c, r, stream_tag::predictors});
        RngStream s_b(cfg.seed, {c, r, stream_tag::coefficients});
        RngStream s_e(cfg.seed, {c, r, stream_tag::noise});
        RngStream s_ref(cfg.seed, {c, r, stream_tag::reference_panel});
        x = gen_predictors(design.law, n, m, s_x);
        const Eigen::VectorXd beta = gen_coefficients(design.coeff, s_b);
        y = gen_outcome(x, beta, cfg.h2, s_e).first;
        x_ref = gen_predictors(design.law, n, m, s_ref);
    }

    bool needs_plain = false, needs_std = false;
    for (const auto& e : cfg.estimators) (e.standardized_inputs ? needs_std : needs_plain) = true;

    SummaryStats u_plain, u_std;
    LdScores ld_plain, ld_std;
    if (needs_plain) {
        u_plain = correlation_scores(x, y, false);
        ld_plain = ld_scores_reference(x_ref, true);
    }
    if (needs_std) {
        u_std = correlation_scores(x, y, true);
        ld_std = standardized_ld_scores(x_ref);
    }

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        const EstimatorSpec& spec = cfg.estimators[e];
        ResultRow& row = out[e];
        row.scenario = cfg.scenario_label();
        row.estimator = spec.label();
        row.n = n;
        row.m = m;
        row.rep = rep;
        try {
            const EstimateResult res = spec.standardized_inputs ? estimate(spec, u_std, ld_std)
                                                                : estimate(spec, u_plain, ld_plain);
            row.h2_hat = res.h2_hat;
            row.ok = true;
        } catch (const std::exception&) {
            row.h2_hat = std::numeric_limits<double>::quiet_NaN();
            row.ok = false;
        }
    }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    const int cells = static_cast<int>(config.n_grid.size());
    const int reps = config.replicates;
    const auto n_est = config.estimators.size();

    std::vector<CellDesign> designs;
    designs.reserve(cells);
    for (int cell = 0; cell < cells; ++cell)
        designs.push_back(cell_design(config, config.m_rule.m_for(config.n_grid[cell])));

    ResultTable table;
    table.rows.resize(static_cast<std::size_t>(cells) * reps * n_est);

    const int total = cells * reps;
    std::atomic<int> next{0};
    const int workers = std::min(worker_count(), total);
    auto work = [&] {
        for (int item = next.fetch_add(1); item < total; item = next.fetch_add(1)) {
            const int cell = item / reps;
            const int rep = item % reps;
            const int n = config.n_grid[cell];
            const int m = config.m_rule.m_for(n);
            ResultRow* out =
                table.rows.data() + (static_cast<std::size_t>(cell) * reps + rep) * n_est;
            run_replicate(config, designs[cell], cell, n, m, rep, out);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Missing-rate policy: a cell where more than 1% of replicates failed for
    // some estimator signals a broken design rather than occasional degeneracy.
    for (int cell = 0; cell < cells; ++cell)
        for (std::size_t e = 0; e < n_est; ++e) {
            int missing = 0;
            for (int rep = 0; rep < reps; ++rep)
                if (!table.rows[(static_cast<std::size_t>(cell) * reps + rep) * n_est + e].ok)
                    ++missing;
            if (missing * 100 > reps)
                throw std::runtime_error("estimator " + config.estimators[e].label() +
                                         " failed on more than 1% of replicates at n = " +
                                         std::to_string(config.n_grid[cell]));
        }

    table.aggregates = summarize(table.rows, config.h2);
    return table;
}

std::vector<AggregateRow> summarize(const std::vector<ResultRow>& rows, double h2) {
    if (rows.empty()) throw std::invalid_argument("no rows to summarize");
    // Key preserves first-seen order so output order matches row order.
    std::map<std::tuple<std::string, std::string, int, int>, std::size_t> index;
    struct Cell {
        AggregateRow agg;
        std::vector<double> values;
    };
    std::vector<Cell> cells;
    for (const auto& row : rows) {
        const auto key = std::make_tuple(row.scenario, row.estimator, row.n, row.m);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, cells.size()).first;
            Cell c;
            c.agg.scenario = row.scenario;
            c.agg.estimator = row.estimator;
            c.agg.n = row.n;
            c.agg.m = row.m;
            cells.push_back(std::move(c));
        }
        if (row.ok) cells[it->second].values.push_back(row.h2_hat);
    }
    std::vector<AggregateRow> out;
    out.reserve(cells.size());
    for (auto& cell : cells) {
        const auto k = cell.values.size();
        if (k == 0) throw std::runtime_error("cell " + cell.agg.scenario + "/" +
                                             cell.agg.estimator + " has no successful replicates");
        const double mean = mean_of(cell.values);
        KahanSum ss;
        for (double v : cell.values) ss.add((v - mean) * (v - mean));
        const double se = k > 1 ? std::sqrt(ss.value() / static_cast<double>(k - 1)) : 0.0;
        cell.agg.mean = mean;
        cell.agg.bias = mean - h2;
        cell.agg.se = se;
        cell.agg.mc_se = se / std::sqrt(static_cast<double>(k));
        cell.agg.n_ok = static_cast<int>(k);
        out.push_back(cell.agg);
    }
    return out;
}

}  // namespace herit
