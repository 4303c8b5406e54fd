#pragma once

#include "ebcr/estimators.hpp"
#include "ebcr/prior_fit.hpp"
#include "ebcr/stat_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ebcr {

struct GaussianPosterior {
    GaussianParams params;
};

/// sum_k weights[k] * phi(x | means[k], common_variance)
struct MixturePosterior {
    std::vector<double> weights;
    std::vector<double> means;
    double common_variance = 1.0;
};

struct GridPosterior {
    GridDensity grid;
};

using Posterior = std::variant<GaussianPosterior, MixturePosterior, GridPosterior>;

/// Posterior of the target parameter given its estimate. Without an
/// observation the posterior is the prior itself. An observation with n = 0
/// is rejected; pass std::nullopt instead.
Posterior compute_posterior(const Prior& prior, const std::optional<EstimateSummary>& obs);

std::string posterior_kind(const Posterior& post);
double posterior_density(const Posterior& post, double x);
/// Grid used for level-set extraction: mean +- 8 sd (widened to cover every
/// mixture component with non-negligible weight), or the posterior's own grid.
GridSpec default_grid(const Posterior& post, std::size_t n_cells = kDefaultGridCells);
/// Tabulation on spec, not renormalized.
std::vector<double> tabulate_posterior(const Posterior& post, const GridSpec& spec);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    /// Closed interval.
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Union of disjoint closed intervals, sorted.
struct Region {
    std::vector<Interval> intervals;
    double measure = 0.0;
    double tau = 0.0;
    /// Grid step the region was resolved on (0 for closed forms without a grid).
    double resolution = 0.0;

    bool contains(double x) const;
};

Region make_region(std::vector<Interval> intervals, double tau, double resolution);

/// Sampling model of the target estimate: theta_hat | theta ~ N(theta, sigma_hat_sq / n0).
struct NoiseModel {
    double sigma_hat_sq = 1.0;
    std::size_t n0 = 1;

    double variance() const { return sigma_hat_sq / static_cast<double>(n0); }
};

struct TauSolveConfig {
    std::size_t mc_draws = 4000;
    double bisection_tol = 1e-12;
    std::size_t max_iters = 200;
    std::uint64_t seed = 0;
    /// Cells per posterior tabulation.
    std::size_t grid_cells = kDefaultGridCells;
    /// A single density level carrying more mass than this is reported as a plateau.
    double plateau_mass = 1e-2;
    int threads = 1;

    void validate() const;
};

struct TauSolution {
    /// Threshold; the boundary value when a plateau was hit.
    double tau = 0.0;
    /// Threshold to extract regions with. Equals tau except on a plateau,
    /// where it sits just below it so the plateau is included.
    double region_tau = 0.0;
    /// Average posterior mass above region_tau.
    double coverage = 1.0;
    bool plateau = false;
    /// The target level was never reached above zero; the region is the full support.
    bool full_support = false;
};

/// Largest threshold whose average posterior mass above it is at least
/// 1 - alpha. Without noise (or n0 = 0) the average is the prior mass and
/// is computed deterministically; otherwise it is a Monte Carlo average over
/// cfg.mc_draws (theta, theta_hat) pairs drawn from the hierarchy.
TauSolution solve_tau(const Prior& prior, const std::optional<NoiseModel>& noise, double alpha,
                      const TauSolveConfig& cfg);

/// Level set {x : density(x) > tau}. Gaussian posteriors are solved in
/// closed form; otherwise cells of the default grid are marked and the
/// boundaries refined by bisection on the continuous density.
Region extract_region(const Posterior& post, double tau, std::size_t n_cells = kDefaultGridCells);

/// Closed-form empirical Bayes interval under a Gaussian prior.
Region eb_gaussian_interval(const GaussianPrior& prior, const EstimateSummary& obs, double alpha);

/// theta_hat +- z sqrt(sigma_hat_sq / n)
Region classical_interval(const EstimateSummary& obs, double alpha);

struct EbRegion {
    Region region;
    TauSolution tau;
    Posterior posterior;
};

/// Posterior level set at the solved threshold.
EbRegion eb_region(const Prior& prior, const std::optional<EstimateSummary>& obs, double alpha,
                   const TauSolveConfig& cfg);

enum class RegionMethod { EmpiricalBayes, Classical };
std::string to_string(RegionMethod m);

struct HybridResult {
    Region region;
    RegionMethod chosen = RegionMethod::Classical;
    double expected_eb_measure = 0.0;
    double classical_measure = 0.0;
    TauSolution tau;
};

/// Estimates the expected measure of the empirical Bayes region by
/// simulating the fitted hierarchy and keeps it only if that beats the
/// classical width. The simulation uses its own stream derived from cfg.seed.
HybridResult hybrid_select(const Prior& prior, const EstimateSummary& obs, double alpha,
                           const TauSolveConfig& cfg);

/// Variance-component settings for a target population with random
/// intercept theta_0 ~ N(prior.mean, prior.variance):
///   1  separate least squares, sampling law of theta_hat_0
///   2  least squares with slopes pooled over all populations
///   3  posterior of theta_0 under separate least squares
///   4  posterior of theta_0 under pooled least squares
enum class AnovaCase { Separate = 1, Pooled = 2, Posterior = 3, PooledPosterior = 4 };

/// populations[0] is the target (it may have zero rows for the posterior
/// cases, which then return the prior); the rest share its slopes in the
/// pooled cases. Intercepts are added internally. For the sampling cases
/// the returned mean is the point estimate.
GaussianParams anova_case_law(std::span<const PopulationData> populations,
                              const GaussianParams& prior, double sigma_eps_sq, AnovaCase which);

/// The scalar 'information' term (n0 - 1'X0 G^{-1} X0'1) of case 1 or 2.
double anova_information(std::span<const PopulationData> populations, bool pooled);

}  // namespace ebcr
