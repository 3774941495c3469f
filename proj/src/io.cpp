#include "herit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace herit {

namespace {

std::string with_line(const std::string& path, long line, const std::string& what) {
    if (line <= 0) return path + ": " + what;
    return path + ":" + std::to_string(line) + ": " + what;
}

}  // namespace

io_error::io_error(const std::string& path, long line, const std::string& what)
    : std::runtime_error(with_line(path, line, what)), line_(line) {}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_double(const std::string& field, const std::string& path, long line) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw io_error(path, line, "expected a number, got '" + field + "'");
    return v;
}

long parse_long(const std::string& field, const std::string& path, long line) {
    long v = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw io_error(path, line, "expected an integer, got '" + field + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// Line-oriented reader; strips \r, skips blank lines, tracks 1-based numbers.
class DelimReader {
public:
    DelimReader(const std::string& path, char delim) : path_(path), delim_(delim), in_(path) {
        if (!in_) throw io_error(path, 0, "cannot open for reading");
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            fields = split(line, delim_);
            return true;
        }
        return false;
    }

    void expect_header(const std::vector<std::string>& want) {
        std::vector<std::string> got;
        if (!next(got)) throw io_error(path_, 0, "empty file");
        if (got != want) {
            std::string w;
            for (std::size_t i = 0; i < want.size(); ++i)
                w += (i ? std::string(1, delim_) : "") + want[i];
            throw io_error(path_, line_no_, "bad header, expected '" + w + "'");
        }
    }

    void expect_width(const std::vector<std::string>& fields, std::size_t want) {
        if (fields.size() != want)
            throw io_error(path_, line_no_,
                           "expected " + std::to_string(want) + " fields, got " +
                               std::to_string(fields.size()));
    }

    long line_no() const { return line_no_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    char delim_;
    std::ifstream in_;
    long line_no_ = 0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path, 0, "cannot open for writing");
    return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw io_error(path, 0, "write failed");
}

std::string default_id(long j) { return "snp" + std::to_string(j + 1); }

}  // namespace

void write_sumstats(const std::string& path, const SummaryStats& stats,
                    const std::vector<std::string>* ids) {
    const long m = stats.u.size();
    if (ids && static_cast<long>(ids->size()) != m)
        throw std::invalid_argument("id list length does not match statistics");
    auto out = open_out(path);
    out << "SNP\tZ\tN\n";
    for (long j = 0; j < m; ++j)
        out << (ids ? (*ids)[j] : default_id(j)) << '\t' << format_double(stats.u[j]) << '\t'
            << stats.n << '\n';
    finish_out(out, path);
}

SummaryStats read_sumstats(const std::string& path) {
    DelimReader rd(path, '\t');
    rd.expect_header({"SNP", "Z", "N"});
    std::vector<double> u;
    long n = -1;
    std::vector<std::string> f;
    while (rd.next(f)) {
        rd.expect_width(f, 3);
        u.push_back(parse_double(f[1], path, rd.line_no()));
        const long nj = parse_long(f[2], path, rd.line_no());
        if (nj < 1) throw io_error(path, rd.line_no(), "N must be positive");
        if (n < 0)
            n = nj;
        else if (nj != n)
            throw io_error(path, rd.line_no(), "N differs between rows");
    }
    if (u.empty()) throw io_error(path, 0, "no data rows");
    SummaryStats stats;
    stats.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<long>(u.size()));
    stats.n = n;
    return stats;
}

void write_ld_scores(const std::string& path, const LdScores& ld,
                     const std::vector<std::string>* ids) {
    const long m = ld.values.size();
    if (ids && static_cast<long>(ids->size()) != m)
        throw std::invalid_argument("id list length does not match scores");
    auto out = open_out(path);
    out << "SNP\tL2\n";
    for (long j = 0; j < m; ++j)
        out << (ids ? (*ids)[j] : default_id(j)) << '\t' << format_double(ld.values[j]) << '\n';
    finish_out(out, path);

    nlohmann::json side;
    side["n_ref"] = ld.n_ref;
    side["m"] = ld.m;
    side["kind"] = ld_kind_name(ld.kind);
    auto sout = open_out(path + ".json");
    sout << side.dump(2) << '\n';
    finish_out(sout, path + ".json");
}

LdScores read_ld_scores(const std::string& path) {
    DelimReader rd(path, '\t');
    rd.expect_header({"SNP", "L2"});
    std::vector<double> values;
    std::vector<std::string> f;
    while (rd.next(f)) {
        rd.expect_width(f, 2);
        values.push_back(parse_double(f[1], path, rd.line_no()));
    }
    if (values.empty()) throw io_error(path, 0, "no data rows");

    const std::string side_path = path + ".json";
    std::ifstream sin(side_path);
    if (!sin) throw io_error(side_path, 0, "cannot open for reading");
    nlohmann::json side;
    try {
        side = nlohmann::json::parse(sin);
    } catch (const nlohmann::json::parse_error& e) {
        throw io_error(side_path, 0, e.what());
    }
    LdScores ld;
    try {
        ld.n_ref = side.at("n_ref").get<long>();
        ld.m = side.at("m").get<long>();
        ld.kind = ld_kind_from_name(side.at("kind").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw io_error(side_path, 0, e.what());
    } catch (const std::invalid_argument& e) {
        throw io_error(side_path, 0, e.what());
    }
    if (ld.m != static_cast<long>(values.size()))
        throw io_error(path, 0,
                       "sidecar m = " + std::to_string(ld.m) + " but file has " +
                           std::to_string(values.size()) + " rows");
    if (ld.n_ref < 1) throw io_error(side_path, 0, "n_ref must be positive");
    ld.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<long>(values.size()));
    return ld;
}

void write_dataset(const std::string& path, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::string& metadata_json) {
    if (x.rows() != y.size()) throw std::invalid_argument("x and y row counts differ");
    auto out = open_out(path);
    out << "id\ty";
    for (long j = 0; j < x.cols(); ++j) out << "\tx" << j + 1;
    out << '\n';
    for (long i = 0; i < x.rows(); ++i) {
        out << i + 1 << '\t' << format_double(y[i]);
        for (long j = 0; j < x.cols(); ++j) out << '\t' << format_double(x(i, j));
        out << '\n';
    }
    finish_out(out, path);

    auto sout = open_out(path + ".json");
    sout << metadata_json << '\n';
    finish_out(sout, path + ".json");
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_dataset(const std::string& path) {
    DelimReader rd(path, '\t');
    std::vector<std::string> header;
    if (!rd.next(header)) throw io_error(path, 0, "empty file");
    if (header.size() < 3 || header[0] != "id" || header[1] != "y")
        throw io_error(path, rd.line_no(), "bad header, expected 'id\ty\tx1...'");
    for (std::size_t j = 2; j < header.size(); ++j)
        if (header[j] != "x" + std::to_string(j - 1))
            throw io_error(path, rd.line_no(), "bad header column '" + header[j] + "'");
    const std::size_t m = header.size() - 2;

    std::vector<double> ys;
    std::vector<double> xs;  // row-major
    std::vector<std::string> f;
    while (rd.next(f)) {
        rd.expect_width(f, m + 2);
        ys.push_back(parse_double(f[1], path, rd.line_no()));
        for (std::size_t j = 0; j < m; ++j)
            xs.push_back(parse_double(f[2 + j], path, rd.line_no()));
    }
    if (ys.empty()) throw io_error(path, 0, "no data rows");
    const long n = static_cast<long>(ys.size());
    Eigen::MatrixXd x(n, static_cast<long>(m));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < static_cast<long>(m); ++j)
            x(i, j) = xs[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)];
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    return {std::move(x), std::move(y)};
}

namespace {

EstimatorSpec parse_estimator_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object()) throw std::invalid_argument(origin + ": estimator must be an object");
    static const std::set<std::string> known = {"family", "intercept", "weighted", "standardized",
                                                "truncate"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw std::invalid_argument(origin + ": unknown estimator key '" + item.key() + "'");
    EstimatorSpec spec;
    const std::string family = j.value("family", "gwash");
    if (family == "gwash")
        spec.family = Family::Gwash;
    else if (family == "ldsc")
        spec.family = Family::Ldsc;
    else
        throw std::invalid_argument(origin + ": family must be gwash or ldsc");
    const std::string intercept = j.value("intercept", "fixed");
    if (intercept == "fixed")
        spec.intercept = Intercept::Fixed;
    else if (intercept == "free")
        spec.intercept = Intercept::Free;
    else
        throw std::invalid_argument(origin + ": intercept must be fixed or free");
    spec.weighted = j.value("weighted", false);
    spec.standardized_inputs = j.value("standardized", false);
    spec.truncate_denominator = j.value("truncate", false);
    spec.validate();
    return spec;
}

Scenario parse_scenario(const std::string& s, const std::string& origin) {
    if (s == "weak_vs_strong") return Scenario::WeakVsStrong;
    if (s == "nongauss_beta") return Scenario::NonGaussBeta;
    if (s == "binomial") return Scenario::BinomialPredictors;
    if (s == "weighting") return Scenario::Weighting;
    if (s == "popstrat") return Scenario::PopStrat;
    if (s == "custom") return Scenario::Custom;
    throw std::invalid_argument(origin + ": unknown scenario '" + s + "'");
}

CorrelationSpec parse_corr(const nlohmann::json& c, const std::string& origin) {
    const std::string kind = c.value("corr_kind", "ar1");
    if (kind == "identity") return CorrelationSpec::identity();
    if (kind == "ar1") return CorrelationSpec::ar1(c.value("rho", 0.0));
    if (kind == "equicorr") return CorrelationSpec::equi(c.value("rho", 0.0));
    if (kind == "mixed_ar1")
        return CorrelationSpec::mixed_ar1(c.value("rho_first", 0.0), c.value("rho_second", 0.0));
    throw std::invalid_argument(origin + ": unknown corr_kind '" + kind + "'");
}

CustomLaws parse_custom(const nlohmann::json& c, const std::string& origin) {
    if (!c.is_object()) throw std::invalid_argument(origin + ": custom must be an object");
    static const std::set<std::string> known = {"distribution", "p",  "corr_kind", "rho",
                                                "rho_first",    "rho_second",      "effect",
                                                "nu",           "theta",           "mix_p"};
    for (const auto& item : c.items())
        if (!known.count(item.key()))
            throw std::invalid_argument(origin + ": unknown custom key '" + item.key() + "'");
    CustomLaws laws;
    const std::string dist = c.value("distribution", "gaussian");
    if (dist == "gaussian")
        laws.distribution = PredictorDist::Gaussian;
    else if (dist == "binomial")
        laws.distribution = PredictorDist::Binomial;
    else
        throw std::invalid_argument(origin + ": distribution must be gaussian or binomial");
    laws.binom_p = c.value("p", 0.5);
    laws.corr = parse_corr(c, origin);
    const std::string effect = c.value("effect", "gaussian");
    if (effect == "gaussian")
        laws.effect = EffectKind::Gaussian;
    else if (effect == "student_t")
        laws.effect = EffectKind::StudentT;
    else if (effect == "mixture")
        laws.effect = EffectKind::Mixture;
    else
        throw std::invalid_argument(origin + ": effect must be gaussian, student_t or mixture");
    laws.nu = c.value("nu", 3.0);
    laws.theta = c.value("theta", 0.5);
    laws.mix_p = c.value("mix_p", 0.5);
    return laws;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw io_error(origin, 0, e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(origin + ": config must be a JSON object");
    static const std::set<std::string> known = {
        "scenario", "label",     "n_grid",       "m_rule",   "h2",       "structure",
        "rho",      "nu",        "construction", "p",        "rho_first", "rho_second",
        "sigma_xi", "var_f",     "custom",       "estimators", "replicates", "seed"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw std::invalid_argument(origin + ": unknown config key '" + item.key() + "'");

    ExperimentConfig cfg;
    try {
        if (j.contains("scenario"))
            cfg.scenario = parse_scenario(j.at("scenario").get<std::string>(), origin);
        cfg.label = j.value("label", "");
        if (!j.contains("n_grid") || !j.at("n_grid").is_array())
            throw std::invalid_argument(origin + ": n_grid must be an array of counts");
        cfg.n_grid.clear();
        for (const auto& v : j.at("n_grid")) cfg.n_grid.push_back(v.get<int>());
        if (j.contains("m_rule")) {
            const auto& r = j.at("m_rule");
            if (r.is_string() && r.get<std::string>() == "twice_n") {
                cfg.m_rule.kind = MRule::Kind::TwiceN;
            } else if (r.is_number_integer()) {
                cfg.m_rule.kind = MRule::Kind::Fixed;
                cfg.m_rule.fixed_m = r.get<int>();
            } else {
                throw std::invalid_argument(origin +
                                            ": m_rule must be \"twice_n\" or a fixed integer");
            }
        }
        cfg.h2 = j.value("h2", cfg.h2);
        cfg.structure = j.value("structure", cfg.structure);
        cfg.rho = j.value("rho", cfg.rho);
        cfg.nu = j.value("nu", cfg.nu);
        cfg.construction = j.value("construction", cfg.construction);
        cfg.p = j.value("p", cfg.p);
        cfg.rho_first = j.value("rho_first", cfg.rho_first);
        cfg.rho_second = j.value("rho_second", cfg.rho_second);
        cfg.sigma_xi = j.value("sigma_xi", cfg.sigma_xi);
        cfg.var_f = j.value("var_f", cfg.var_f);
        if (j.contains("custom")) cfg.custom = parse_custom(j.at("custom"), origin);
        if (!j.contains("estimators") || !j.at("estimators").is_array() ||
            j.at("estimators").empty())
            throw std::invalid_argument(origin + ": estimators must be a nonempty array");
        cfg.estimators.clear();
        for (const auto& e : j.at("estimators"))
            cfg.estimators.push_back(parse_estimator_json(e, origin));
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(origin + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path, 0, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), path);
}

void write_result_rows(const std::string& path, const std::vector<ResultRow>& rows) {
    auto out = open_out(path);
    out << "scenario,estimator,n,m,rep,h2_hat\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.estimator << ',' << r.n << ',' << r.m << ',' << r.rep << ','
            << (r.ok ? format_double(r.h2_hat) : std::string("NA")) << '\n';
    }
    finish_out(out, path);
}

std::vector<ResultRow> read_result_rows(const std::string& path) {
    DelimReader rd(path, ',');
    rd.expect_header({"scenario", "estimator", "n", "m", "rep", "h2_hat"});
    std::vector<ResultRow> rows;
    std::vector<std::string> f;
    while (rd.next(f)) {
        rd.expect_width(f, 6);
        ResultRow r;
        r.scenario = f[0];
        r.estimator = f[1];
        r.n = static_cast<int>(parse_long(f[2], path, rd.line_no()));
        r.m = static_cast<int>(parse_long(f[3], path, rd.line_no()));
        r.rep = static_cast<int>(parse_long(f[4], path, rd.line_no()));
        if (f[5] == "NA") {
            r.ok = false;
            r.h2_hat = std::numeric_limits<double>::quiet_NaN();
        } else {
            r.ok = true;
            r.h2_hat = parse_double(f[5], path, rd.line_no());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_aggregates(const std::string& path, const std::vector<AggregateRow>& aggregates) {
    auto out = open_out(path);
    out << "scenario,estimator,n,m,mean,bias,se,mc_se,n_ok\n";
    for (const auto& a : aggregates) {
        out << a.scenario << ',' << a.estimator << ',' << a.n << ',' << a.m << ','
            << format_double(a.mean) << ',' << format_double(a.bias) << ',' << format_double(a.se)
            << ',' << format_double(a.mc_se) << ',' << a.n_ok << '\n';
    }
    finish_out(out, path);
}

std::vector<AggregateRow> read_aggregates(const std::string& path) {
    DelimReader rd(path, ',');
    rd.expect_header({"scenario", "estimator", "n", "m", "mean", "bias", "se", "mc_se", "n_ok"});
    std::vector<AggregateRow> out;
    std::vector<std::string> f;
    while (rd.next(f)) {
        rd.expect_width(f, 9);
        AggregateRow a;
        a.scenario = f[0];
        a.estimator = f[1];
        a.n = static_cast<int>(parse_long(f[2], path, rd.line_no()));
        a.m = static_cast<int>(parse_long(f[3], path, rd.line_no()));
        a.mean = parse_double(f[4], path, rd.line_no());
        a.bias = parse_double(f[5], path, rd.line_no());
        a.se = parse_double(f[6], path, rd.line_no());
        a.mc_se = parse_double(f[7], path, rd.line_no());
        a.n_ok = static_cast<int>(parse_long(f[8], path, rd.line_no()));
        out.push_back(std::move(a));
    }
    if (out.empty()) throw io_error(path, 0, "no data rows");
    return out;
}

}  // namespace herit
