#include "ebcr/cli_io.hpp"

#include "ebcr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace ebcr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    for (auto& c : cells) {
        const auto first = c.find_first_not_of(" \t\r");
        const auto last = c.find_last_not_of(" \t\r");
        c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
    }
    return cells;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_number(const std::string& cell, const std::string& column, std::size_t row) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw InputError("non-numeric value '" + cell + "' in column " + column + " at row " +
                         std::to_string(row));
    }
    return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("column not found: " + name);
    return static_cast<std::size_t>(it - header.begin());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return in;
}

std::string interval_list(const Region& r) {
    std::string s;
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
        if (i > 0) s += " U ";
        char buf[96];
        std::snprintf(buf, sizeof buf, "[%.4f, %.4f]", r.intervals[i].lo, r.intervals[i].hi);
        s += buf;
    }
    return s;
}

std::string interval_list_exact(const Region& r) {
    std::string s;
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
        if (i > 0) s += ';';
        s += format_double(r.intervals[i].lo) + ":" + format_double(r.intervals[i].hi);
    }
    return s;
}

std::string prior_label(const PriorSpec& p) {
    char buf[128];
    if (p.kind == PriorSpec::Kind::Gaussian) {
        std::snprintf(buf, sizeof buf, "N(%g, %g)", p.mean, p.variance);
    } else {
        std::snprintf(buf, sizeof buf, "0.5 N(-1, %g) + 0.5 N(1, %g)", p.variance, p.variance);
    }
    return buf;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

StudyInput load_dataset(std::istream& in, const DatasetSchema& schema, std::size_t min_rows,
                        std::ostream* log) {
    std::string line;
    if (!read_line(in, line)) throw InputError("empty dataset: missing header row");
    const std::vector<std::string> header = split_csv_line(line);
    const std::size_t id_col = column_index(header, schema.id_column);
    const std::size_t y_col = column_index(header, schema.response_column);
    std::vector<std::size_t> x_cols;
    StudyInput out;
    if (schema.covariate_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != id_col && c != y_col) {
                x_cols.push_back(c);
                out.covariate_names.push_back(header[c]);
            }
        }
    } else {
        for (const auto& name : schema.covariate_columns) {
            x_cols.push_back(column_index(header, name));
            out.covariate_names.push_back(name);
        }
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::vector<double>>> rows;
    std::size_t row = 1;
    while (read_line(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                             " fields, header has " + std::to_string(header.size()));
        }
        std::vector<double> values;
        values.reserve(x_cols.size() + 1);
        values.push_back(parse_number(cells[y_col], header[y_col], row));
        for (std::size_t c : x_cols) values.push_back(parse_number(cells[c], header[c], row));
        const std::string& id = cells[id_col];
        if (id.empty()) throw InputError("empty id at row " + std::to_string(row));
        auto [it, inserted] = rows.try_emplace(id);
        if (inserted) order.push_back(id);
        it->second.push_back(std::move(values));
    }

    const auto p = static_cast<Eigen::Index>(x_cols.size());
    for (const auto& id : order) {
        const auto& r = rows[id];
        if (r.size() < min_rows && id != schema.keep_id) {
            std::string msg = "population '" + id + "' has " + std::to_string(r.size()) +
                              " rows, fewer than " + std::to_string(min_rows) + "; dropped";
            if (log != nullptr) *log << "warning: " << msg << '\n';
            out.warnings.push_back(std::move(msg));
            continue;
        }
        PopulationData pop;
        pop.id = id;
        const auto n = static_cast<Eigen::Index>(r.size());
        pop.X.resize(n, p);
        pop.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& v = r[static_cast<std::size_t>(i)];
            pop.y(i) = v[0];
            for (Eigen::Index j = 0; j < p; ++j) pop.X(i, j) = v[static_cast<std::size_t>(j) + 1];
        }
        out.populations.push_back(std::move(pop));
    }
    if (out.populations.empty()) throw InputError("no usable populations in dataset");
    return out;
}

StudyInput load_dataset(const std::string& path, const DatasetSchema& schema, std::size_t min_rows,
                        std::ostream* log) {
    auto in = open_input(path);
    return load_dataset(in, schema, min_rows, log);
}

void write_dataset(std::ostream& out, std::span<const PopulationData> populations) {
    if (populations.empty()) return;
    const auto p = populations.front().X.cols();
    out << "id,y";
    for (Eigen::Index j = 0; j < p; ++j) out << ",x" << j + 1;
    out << '\n';
    for (const auto& pop : populations) {
        for (Eigen::Index i = 0; i < pop.X.rows(); ++i) {
            out << pop.id << ',' << format_double(pop.y(i));
            for (Eigen::Index j = 0; j < p; ++j) out << ',' << format_double(pop.X(i, j));
            out << '\n';
        }
    }
}

std::vector<EstimateSummary> read_summaries(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw InputError("empty summaries file: missing header row");
    const auto header = split_csv_line(line);
    const std::size_t c_id = column_index(header, "id");
    const std::size_t c_theta = column_index(header, "theta_hat");
    const std::size_t c_sig = column_index(header, "sigma_hat_sq");
    const std::size_t c_n = column_index(header, "n");
    std::vector<EstimateSummary> out;
    std::size_t row = 1;
    while (read_line(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputError("row " + std::to_string(row) + " has the wrong number of fields");
        }
        EstimateSummary s;
        s.id = cells[c_id];
        s.theta_hat = parse_number(cells[c_theta], "theta_hat", row);
        s.sigma_hat_sq = parse_number(cells[c_sig], "sigma_hat_sq", row);
        const double n = parse_number(cells[c_n], "n", row);
        if (!(n >= 0.0) || n != std::floor(n)) {
            throw InputError("n must be a non-negative integer at row " + std::to_string(row));
        }
        s.n = static_cast<std::size_t>(n);
        if (!(s.sigma_hat_sq > 0.0)) {
            throw InputError("sigma_hat_sq must be positive at row " + std::to_string(row));
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw InputError("summaries file has no rows");
    return out;
}

std::vector<EstimateSummary> load_summaries(const std::string& path) {
    auto in = open_input(path);
    return read_summaries(in);
}

void write_summaries(std::ostream& out, std::span<const EstimateSummary> summaries) {
    out << "id,theta_hat,sigma_hat_sq,n\n";
    for (const auto& s : summaries) {
        out << s.id << ',' << format_double(s.theta_hat) << ',' << format_double(s.sigma_hat_sq) << ','
            << s.n << '\n';
    }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    if (!j.contains("schema_version")) throw InputError("config: missing schema_version");
    if (j.at("schema_version") != kConfigSchemaVersion) {
        throw InputError("config: unsupported schema_version (expected " +
                         std::to_string(kConfigSchemaVersion) + ")");
    }
    static const char* const known[] = {"schema_version", "K", "n_k", "n0", "p", "s_beta", "noise_sd",
                                        "prior", "methods", "replications", "alpha", "seed", "regime",
                                        "threads", "mc_draws", "grid_cells", "name"};
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw InputError("config: unknown key '" + item.key() + "'");
        }
    }
    ExperimentConfig c;
    try {
        c.K = j.value("K", c.K);
        c.n_k = j.value("n_k", c.n_k);
        c.n0 = j.value("n0", c.n0);
        c.p = j.value("p", c.p);
        c.s_beta = j.value("s_beta", c.s_beta);
        c.noise_sd = j.value("noise_sd", c.noise_sd);
        c.replications = j.value("replications", c.replications);
        c.alpha = j.value("alpha", c.alpha);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        c.mc_draws = j.value("mc_draws", c.mc_draws);
        c.grid_cells = j.value("grid_cells", c.grid_cells);
        if (j.contains("regime")) c.regime = regime_from_string(j.at("regime").get<std::string>());
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
        }
        if (j.contains("prior")) {
            const auto& pj = j.at("prior");
            const std::string kind = pj.value("kind", std::string("gaussian"));
            if (kind == "gaussian") {
                c.prior.kind = PriorSpec::Kind::Gaussian;
            } else if (kind == "mixture") {
                c.prior.kind = PriorSpec::Kind::Mixture;
            } else {
                throw InputError("config: unknown prior kind '" + kind + "'");
            }
            c.prior.mean = pj.value("mean", c.prior.mean);
            c.prior.variance = pj.value("variance", c.prior.variance);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["K"] = c.K;
    j["n_k"] = c.n_k;
    j["n0"] = c.n0;
    j["p"] = c.p;
    j["s_beta"] = c.s_beta;
    j["noise_sd"] = c.noise_sd;
    j["prior"] = {{"kind", c.prior.kind == PriorSpec::Kind::Gaussian ? "gaussian" : "mixture"},
                  {"mean", c.prior.mean},
                  {"variance", c.prior.variance}};
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : c.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["replications"] = c.replications;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["regime"] = to_string(c.regime);
    j["mc_draws"] = c.mc_draws;
    j["grid_cells"] = c.grid_cells;
    return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config " + path + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

void write_results_markdown(std::ostream& out, const ExperimentConfig& cfg,
                            std::span<const MethodResult> results) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "K = %zu, n_k = %zu, n0 = %zu, p = %zu (%s), prior %s, alpha = %g, "
                  "%zu replications, seed %llu\n\n",
                  cfg.K, cfg.n_k, cfg.n0, cfg.p, to_string(cfg.regime).c_str(),
                  prior_label(cfg.prior).c_str(), cfg.alpha, cfg.replications,
                  static_cast<unsigned long long>(cfg.seed));
    out << buf;
    out << "| Method | Coverage | SE | Lebesgue measure | Replications | Skipped |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "| %s | %.3f | %.4f | %.3f | %zu | %zu |\n",
                      to_string(r.method).c_str(), r.coverage, r.se_coverage, r.mean_measure,
                      r.replications, r.skipped);
        out << buf;
    }
}

void write_results_csv(std::ostream& out, std::span<const MethodResult> results) {
    out << "method,coverage,mean_measure,replications,se_coverage,skipped\n";
    for (const auto& r : results) {
        out << to_string(r.method) << ',' << format_double(r.coverage) << ','
            << format_double(r.mean_measure) << ',' << r.replications << ','
            << format_double(r.se_coverage) << ',' << r.skipped << '\n';
    }
}

std::vector<MethodResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw InputError("empty results file");
    const auto header = split_csv_line(line);
    const std::size_t c_method = column_index(header, "method");
    const std::size_t c_cov = column_index(header, "coverage");
    const std::size_t c_meas = column_index(header, "mean_measure");
    const std::size_t c_reps = column_index(header, "replications");
    const std::size_t c_se = column_index(header, "se_coverage");
    const std::size_t c_skip = column_index(header, "skipped");
    std::vector<MethodResult> out;
    std::size_t row = 1;
    while (read_line(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw InputError("malformed results row " + std::to_string(row));
        MethodResult r;
        r.method = method_from_string(cells[c_method]);
        r.coverage = parse_number(cells[c_cov], "coverage", row);
        r.mean_measure = parse_number(cells[c_meas], "mean_measure", row);
        r.replications = static_cast<std::size_t>(parse_number(cells[c_reps], "replications", row));
        r.se_coverage = parse_number(cells[c_se], "se_coverage", row);
        r.skipped = static_cast<std::size_t>(parse_number(cells[c_skip], "skipped", row));
        out.push_back(r);
    }
    return out;
}

nlohmann::json results_to_json(const ExperimentConfig& cfg, std::span<const MethodResult> results) {
    nlohmann::json j;
    j["config"] = experiment_config_to_json(cfg);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) {
        rows.push_back({{"method", to_string(r.method)},
                        {"coverage", r.coverage},
                        {"mean_measure", r.mean_measure},
                        {"replications", r.replications},
                        {"se_coverage", r.se_coverage},
                        {"skipped", r.skipped}});
    }
    j["results"] = rows;
    return j;
}

void write_records_csv(std::ostream& out, std::span<const ReplicationRecord> records) {
    out << "rep,method,theta0,covered,measure,tau,intervals,error\n";
    for (const auto& r : records) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << r.rep << ',' << to_string(r.method) << ',' << format_double(r.theta0) << ','
            << (r.skipped ? "" : (r.covered ? "1" : "0")) << ','
            << (r.skipped ? "" : format_double(r.region.measure)) << ','
            << (r.skipped ? "" : format_double(r.region.tau)) << ',' << interval_list_exact(r.region)
            << ',' << err << '\n';
    }
}

void write_regions_markdown(std::ostream& out, std::span<const RegionRow> rows) {
    out << "| Target | Coef | Method | Region | Measure | Note |\n";
    out << "|---|---|---|---|---|---|\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.4f", r.region.measure);
        out << "| " << r.target << " | " << r.coef << " | " << r.method << " | "
            << interval_list(r.region) << " | " << buf << " | " << r.note << " |\n";
    }
}

void write_regions_csv(std::ostream& out, std::span<const RegionRow> rows) {
    out << "target,coef,method,measure,tau,intervals,note\n";
    for (const auto& r : rows) {
        out << r.target << ',' << r.coef << ',' << r.method << ',' << format_double(r.region.measure)
            << ',' << format_double(r.region.tau) << ',' << interval_list_exact(r.region) << ','
            << r.note << '\n';
    }
}

nlohmann::json regions_to_json(std::span<const RegionRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json iv = nlohmann::json::array();
        for (const auto& i : r.region.intervals) iv.push_back({i.lo, i.hi});
        arr.push_back({{"target", r.target},
                       {"coef", r.coef},
                       {"method", r.method},
                       {"intervals", iv},
                       {"measure", r.region.measure},
                       {"tau", r.region.tau},
                       {"note", r.note}});
    }
    return nlohmann::json{{"regions", arr}};
}

}  // namespace ebcr
