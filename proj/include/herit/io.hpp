#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "herit/experiments.hpp"
#include "herit/summary.hpp"

namespace herit {

// File-level failure: missing file, malformed row, inconsistent sidecar.
// line is 1-based; 0 when no specific line applies.
class io_error : public std::runtime_error {
public:
    io_error(const std::string& path, long line, const std::string& what);
    long line() const { return line_; }

private:
    long line_ = 0;
};

// 17-significant-digit decimal form; round-trips any double exactly.
std::string format_double(double v);

// Summary statistics TSV: header SNP\tZ\tN, one row per predictor, shared N.
// Ids default to snp1..snpm. Reading leaves the standardized flag false (the
// file does not record it) and d2 empty.
void write_sumstats(const std::string& path, const SummaryStats& stats,
                    const std::vector<std::string>* ids = nullptr);
SummaryStats read_sumstats(const std::string& path);

// LD score TSV: header SNP\tL2, sidecar JSON {n_ref, m, kind} at path+".json".
void write_ld_scores(const std::string& path, const LdScores& ld,
                     const std::vector<std::string>* ids = nullptr);
LdScores read_ld_scores(const std::string& path);

// Dataset TSV: header id\ty\tx1..xm, one row per sample; the metadata string
// (JSON) is written verbatim to path + ".json".
void write_dataset(const std::string& path, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::string& metadata_json);
std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_dataset(const std::string& path);

// Experiment config JSON; keys mirror ExperimentConfig. Malformed JSON is an
// io_error; a well-formed config with bad values is std::invalid_argument.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin);
ExperimentConfig load_experiment_config(const std::string& path);

// Result CSVs. Failed replicates serialize h2_hat as NA.
void write_result_rows(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_rows(const std::string& path);
void write_aggregates(const std::string& path, const std::vector<AggregateRow>& aggregates);
std::vector<AggregateRow> read_aggregates(const std::string& path);

}  // namespace herit
