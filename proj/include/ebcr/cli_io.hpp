#pragma once

#include "ebcr/estimators.hpp"
#include "ebcr/posterior_region.hpp"
#include "ebcr/sim_harness.hpp"

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ebcr {

struct DatasetSchema {
    std::string id_column = "id";
    std::string response_column = "y";
    /// Empty means every remaining column, in file order.
    std::vector<std::string> covariate_columns;
    /// Population kept whatever its size (the target of an analysis).
    std::optional<std::string> keep_id;
};

struct StudyInput {
    std::vector<PopulationData> populations;
    std::optional<std::string> target_id;
    std::size_t target_index = 0;
    double alpha = 0.05;
    std::vector<std::string> covariate_names;
    /// One entry per dropped population.
    std::vector<std::string> warnings;
};

/// Reads a comma-separated file with a header row and groups rows by id,
/// keeping populations in order of first appearance. Populations with fewer
/// than min_rows rows are dropped with a warning written to `log` (if set).
StudyInput load_dataset(std::istream& in, const DatasetSchema& schema, std::size_t min_rows = 50,
                        std::ostream* log = nullptr);
StudyInput load_dataset(const std::string& path, const DatasetSchema& schema,
                        std::size_t min_rows = 50, std::ostream* log = nullptr);

/// Header "id,y,x1..xp"; values printed with %.17g so they read back exactly.
void write_dataset(std::ostream& out, std::span<const PopulationData> populations);

/// CSV with header id,theta_hat,sigma_hat_sq,n.
std::vector<EstimateSummary> read_summaries(std::istream& in);
std::vector<EstimateSummary> load_summaries(const std::string& path);
void write_summaries(std::ostream& out, std::span<const EstimateSummary> summaries);

inline constexpr int kConfigSchemaVersion = 1;

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

/// Shortest round-trip formatting used by every report (%.17g).
std::string format_double(double x);

void write_results_markdown(std::ostream& out, const ExperimentConfig& cfg,
                            std::span<const MethodResult> results);
void write_results_csv(std::ostream& out, std::span<const MethodResult> results);
std::vector<MethodResult> read_results_csv(std::istream& in);
nlohmann::json results_to_json(const ExperimentConfig& cfg, std::span<const MethodResult> results);
void write_records_csv(std::ostream& out, std::span<const ReplicationRecord> records);

/// One region in an `analyze` or `region` report.
struct RegionRow {
    std::string target;
    std::size_t coef = 0;
    std::string method;
    Region region;
    std::string note;
};

void write_regions_markdown(std::ostream& out, std::span<const RegionRow> rows);
void write_regions_csv(std::ostream& out, std::span<const RegionRow> rows);
nlohmann::json regions_to_json(std::span<const RegionRow> rows);

/// Entry point of the `ebcr` executable. Returns 0 on success, 1 on input
/// errors (including bad flags), 2 on numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ebcr
