#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "herit/diagnostics.hpp"
#include "herit/estimators.hpp"
#include "herit/experiments.hpp"
#include "herit/io.hpp"
#include "herit/svg_report.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct EstimateFlags {
    std::string family = "gwash";
    std::string intercept = "fixed";
    bool weighted = false;
    bool standardized = false;
    bool truncate = false;
    bool clip = false;

    herit::EstimatorSpec to_spec() const {
        herit::EstimatorSpec spec;
        spec.family = family == "ldsc" ? herit::Family::Ldsc : herit::Family::Gwash;
        spec.intercept = intercept == "free" ? herit::Intercept::Free : herit::Intercept::Fixed;
        spec.weighted = weighted;
        spec.standardized_inputs = standardized;
        spec.truncate_denominator = truncate;
        spec.validate();
        return spec;
    }
};

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed) {
    herit::ExperimentConfig config = herit::load_experiment_config(config_path);
    if (seed) config.seed = *seed;
    const herit::ResultTable table = herit::run_experiment(config);
    std::filesystem::create_directories(out_dir);
    const auto rows_path = (std::filesystem::path(out_dir) / "rows.csv").string();
    const auto agg_path = (std::filesystem::path(out_dir) / "aggregates.csv").string();
    herit::write_result_rows(rows_path, table.rows);
    herit::write_aggregates(agg_path, table.aggregates);
    std::cout << "wrote " << rows_path << "\n";
    std::cout << "wrote " << agg_path << "\n";
    return 0;
}

int run_estimate(const std::string& sumstats_path, const std::string& ldscore_path,
                 const EstimateFlags& flags) {
    const herit::EstimatorSpec spec = flags.to_spec();
    herit::SummaryStats stats = herit::read_sumstats(sumstats_path);
    stats.standardized = spec.standardized_inputs;  // file format does not record it
    const herit::LdScores ld = herit::read_ld_scores(ldscore_path);
    const herit::EstimateResult res = herit::estimate(spec, stats, ld);

    ordered_json out;
    out["h2_hat"] = flags.clip ? std::clamp(res.h2_hat, 0.0, 1.0) : res.h2_hat;
    out["numerator"] = res.numerator;
    out["denominator"] = res.denominator;
    if (res.intercept_hat) out["intercept"] = *res.intercept_hat;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_diagnose(const std::string& structure, double rho, double rho_first, double rho_second,
                 int m, const std::string& panel_path, const std::string& effect, double h2,
                 double nu, double theta, double mix_p) {
    std::optional<herit::LdScores> panel;
    if (!panel_path.empty()) {
        panel = herit::read_ld_scores(panel_path);
        m = static_cast<int>(panel->m);
    } else if (m < 1) {
        throw std::invalid_argument("--m is required unless --panel is given");
    }

    std::optional<herit::CoeffLaw> coeff;
    if (effect == "gaussian")
        coeff = herit::CoeffLaw::gaussian(h2, m);
    else if (effect == "student_t")
        coeff = herit::CoeffLaw::student_t(h2, m, nu);
    else if (effect == "mixture")
        coeff = herit::CoeffLaw::mixture(h2, m, theta, mix_p);

    herit::ConditionReport report;
    if (panel) {
        report = herit::condition_report(*panel, coeff);
    } else {
        herit::CorrelationSpec spec;
        if (structure == "identity")
            spec = herit::CorrelationSpec::identity();
        else if (structure == "ar1")
            spec = herit::CorrelationSpec::ar1(rho);
        else if (structure == "equicorr")
            spec = herit::CorrelationSpec::equi(rho);
        else
            spec = herit::CorrelationSpec::mixed_ar1(rho_first, rho_second);
        report = herit::condition_report(spec, m, coeff);
    }

    ordered_json out;
    out["wd0"] = report.wd0;
    out["mu2"] = report.mu2;
    out["mean_lsq"] = report.mean_lsq;
    if (report.wd1_tr4) out["wd1_tr4"] = *report.wd1_tr4;
    if (report.bke) {
        if (std::isinf(*report.bke))
            out["bke"] = "inf";
        else
            out["bke"] = *report.bke;
    }
    out["source"] = report.source;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_report(const std::string& aggregates_path, const std::string& out_dir) {
    const auto aggregates = herit::read_aggregates(aggregates_path);
    const auto written = herit::write_report(aggregates, out_dir);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heritability estimation from GWAS summary statistics"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a simulation grid from a JSON config");
    std::string config_path, sim_out;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--config", config_path, "Experiment config JSON")->required();
    sim->add_option("--out", sim_out, "Output directory for rows.csv and aggregates.csv")
        ->required();
    sim->add_option("--seed", sim_seed, "Override the config seed");

    auto* est = app.add_subcommand("estimate", "Estimate h2 from sumstats and LD score files");
    std::string sumstats_path, ldscore_path;
    EstimateFlags flags;
    est->add_option("--sumstats", sumstats_path, "Sumstats TSV (SNP, Z, N)")->required();
    est->add_option("--ldscore", ldscore_path, "LD score TSV (SNP, L2) with JSON sidecar")
        ->required();
    est->add_option("--family", flags.family, "Estimator family")
        ->check(CLI::IsMember({"gwash", "ldsc"}));
    est->add_option("--intercept", flags.intercept, "Intercept handling")
        ->check(CLI::IsMember({"fixed", "free"}));
    est->add_flag("--weighted", flags.weighted, "Two-step heteroscedasticity weighting");
    est->add_flag("--standardized", flags.standardized,
                  "Treat inputs as standardized scores and standardized LD scores");
    est->add_flag("--truncate", flags.truncate, "Truncate LD scores at 1 in the denominator");
    est->add_flag("--clip", flags.clip, "Clip the reported h2_hat into [0, 1]");

    auto* diag = app.add_subcommand("diagnose", "Print dependence and kurtosis diagnostics");
    std::string structure = "ar1", panel_path, effect;
    double rho = 0.3, rho_first = 0.2, rho_second = 0.9;
    double dh2 = 0.2, dnu = 3.0, dtheta = 0.5, dmix_p = 0.5;
    int dm = 0;
    auto* opt_structure = diag->add_option("--structure", structure, "Correlation structure")
                              ->check(CLI::IsMember({"identity", "ar1", "equicorr", "mixed_ar1"}));
    diag->add_option("--rho", rho, "Correlation parameter");
    diag->add_option("--rho-first", rho_first, "First-half parameter for mixed_ar1");
    diag->add_option("--rho-second", rho_second, "Second-half parameter for mixed_ar1");
    diag->add_option("--m", dm, "Number of predictors");
    diag->add_option("--panel", panel_path, "LD score TSV estimated from a reference panel")
        ->excludes(opt_structure);
    diag->add_option("--effect", effect, "Coefficient law for the kurtosis term")
        ->check(CLI::IsMember({"gaussian", "student_t", "mixture"}));
    diag->add_option("--h2", dh2, "Heritability used by the coefficient law");
    diag->add_option("--nu", dnu, "Student t degrees of freedom");
    diag->add_option("--theta", dtheta, "Mixture: variance share of the first component");
    diag->add_option("--mix-p", dmix_p, "Mixture: probability of the first component");

    auto* rep = app.add_subcommand("report", "Render SE and bias charts from aggregates CSV");
    std::string agg_path, rep_out;
    rep->add_option("--aggregates", agg_path, "Aggregates CSV from simulate")->required();
    rep->add_option("--out", rep_out, "Output directory for SVG files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return run_simulate(config_path, sim_out, sim_seed);
        if (*est) return run_estimate(sumstats_path, ldscore_path, flags);
        if (*diag)
            return run_diagnose(structure, rho, rho_first, rho_second, dm, panel_path, effect,
                                dh2, dnu, dtheta, dmix_p);
        if (*rep) return run_report(agg_path, rep_out);
    } catch (const herit::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
