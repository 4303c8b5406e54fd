#pragma once

#include "ebcr/estimators.hpp"
#include "ebcr/posterior_region.hpp"
#include "ebcr/prior_fit.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ebcr {

enum class Method { EbPa, EbKd, EbDc, Oracle, Classical };

/// "EB-pa", "EB-kd", "EB-dc", "OR", "CL"
std::string to_string(Method m);
Method method_from_string(const std::string& name);

enum class Regime { LowDim, HighDim };
std::string to_string(Regime r);
Regime regime_from_string(const std::string& name);

/// Law of the population parameters: N(mean, variance), or the equal mixture
/// of N(-1, variance) and N(1, variance).
struct PriorSpec {
    enum class Kind { Gaussian, Mixture };
    Kind kind = Kind::Gaussian;
    double mean = 0.0;
    double variance = 0.1;

    /// The true prior as a Prior value (a two-kernel mixture for Kind::Mixture).
    Prior as_prior() const;
};

struct ExperimentConfig {
    std::size_t K = 100;
    std::size_t n_k = 100;
    std::size_t n0 = 0;
    std::size_t p = 5;
    std::size_t s_beta = 3;
    double noise_sd = 1.0;
    PriorSpec prior;
    std::vector<Method> methods{Method::EbPa, Method::Oracle};
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    Regime regime = Regime::LowDim;
    /// 0 = all hardware threads (still capped by EBCR_THREADS).
    int threads = 0;
    std::size_t mc_draws = 4000;
    std::size_t grid_cells = kDefaultGridCells;

    void validate() const;
};

/// One generated study. populations[0] is the target "P0" when n0 > 0,
/// followed by "P1".."PK"; theta[k] is the parameter of population k, with
/// theta[0] the target's even when it has no data.
struct Replication {
    std::vector<PopulationData> populations;
    std::vector<double> theta;
};

Replication generate_replication(const ExperimentConfig& cfg, std::size_t rep_index);

/// Estimate of coefficient target_index: least squares when n > p, debiased
/// lasso otherwise (or always, for the high-dimensional regime).
EstimateSummary estimate_population(const PopulationData& pop, std::size_t target_index,
                                    Regime regime);

/// Region produced by `method` from the source summaries and the optional
/// target estimate. true_prior is only consulted by the oracle.
Region method_region(Method method, std::span<const EstimateSummary> sources,
                     const std::optional<EstimateSummary>& target, double alpha,
                     const TauSolveConfig& tau_cfg, const Prior* true_prior = nullptr);

/// Seeds for the threshold solver of replication rep.
TauSolveConfig replication_tau_config(const ExperimentConfig& cfg, std::size_t rep_index);

struct ReplicationRecord {
    std::size_t rep = 0;
    Method method = Method::Classical;
    double theta0 = 0.0;
    bool skipped = false;
    std::string error;
    bool covered = false;
    Region region;
};

struct MethodResult {
    Method method = Method::Classical;
    double coverage = 0.0;
    double mean_measure = 0.0;
    /// Replications that produced a region.
    std::size_t replications = 0;
    double se_coverage = 0.0;
    std::size_t skipped = 0;
};

struct ExperimentReport {
    std::vector<MethodResult> results;
    /// Replication-major, methods in configuration order.
    std::vector<ReplicationRecord> records;
};

/// Runs every replication and method. Failing (replication, method) pairs
/// are recorded and skipped; more than 1% skipped for any method throws
/// NumericalError.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace ebcr
