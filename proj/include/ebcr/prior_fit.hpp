#pragma once

#include "ebcr/estimators.hpp"
#include "ebcr/parallel.hpp"
#include "ebcr/stat_core.hpp"

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ebcr {

struct GaussianPrior {
    GaussianParams params;
};

/// Equal-weight Gaussian kernel mixture: K^{-1} sum_k phi(t | centers[k], bandwidth_sq).
struct KernelMixturePrior {
    std::vector<double> centers;
    double bandwidth_sq = 1.0;
};

struct GridPrior {
    GridDensity grid;
};

/// Estimated random-effects density.
using Prior = std::variant<GaussianPrior, KernelMixturePrior, GridPrior>;

std::string prior_kind(const Prior& prior);
double prior_density(const Prior& prior, double x);
/// Grid over which the prior is tabulated: mean +- 8 sd for the parametric
/// forms (widened to cover every kernel), the prior's own grid otherwise.
GridSpec default_grid(const Prior& prior, std::size_t n_cells = kDefaultGridCells);
/// Normalized tabulation on spec.
GridDensity tabulate_prior(const Prior& prior, const GridSpec& spec);

/// Draws from a prior; builds the inverse CDF for grid priors once.
class PriorSampler {
public:
    explicit PriorSampler(const Prior& prior);
    double operator()(RngStream& rng) const;

private:
    Prior prior_;
    std::vector<double> cdf_;
};

/// Median sampling variance divided by K.
double default_zeta_sq(std::span<const EstimateSummary> summaries);

/// Gaussian maximum likelihood for theta_hat_k ~ N(mu, s + sigma_k^2/n_k),
/// with s clamped below at zeta_sq. Closed form when every n_k agrees,
/// profile likelihood otherwise.
GaussianPrior fit_gaussian_prior(std::span<const EstimateSummary> summaries, double zeta_sq);
/// Profile-likelihood route, always taken regardless of the n_k.
GaussianPrior fit_gaussian_prior_profile(std::span<const EstimateSummary> summaries,
                                         double zeta_sq);

/// Silverman's rule on the estimates, squared.
double silverman_bandwidth_sq(std::span<const EstimateSummary> summaries);
KernelMixturePrior fit_kde_prior(std::span<const EstimateSummary> summaries, double bandwidth_sq);

struct DeconvolutionOptions {
    /// Simpson intervals over [-1/b, 1/b] at the first refinement level.
    std::size_t initial_intervals = 4096;
    double target_error = 1e-7;
    double max_error = 1e-5;
    int max_doublings = 6;
    unsigned threads = 1;
};

/// Sinc-kernel Fourier deconvolution estimate
///   (2 pi K)^{-1} sum_k int_{-1/b}^{1/b} exp(-i x z) exp(i z theta_k) exp(v_k z^2 / 2) dz
/// with v_k = sigma_k^2 / n_k. Values may be negative.
class DeconvolutionEstimator {
public:
    DeconvolutionEstimator(std::span<const EstimateSummary> summaries, double b,
                           DeconvolutionOptions opts = {});

    double bandwidth() const { return b_; }
    double cutoff() const { return 1.0 / b_; }

    /// The integrand's frequency factor K^{-1} sum_k exp(i z theta_k + v_k z^2 / 2).
    std::complex<double> frequency_factor(double z) const;

    /// Unclipped estimate at arbitrary points.
    std::vector<double> evaluate(std::span<const double> xs) const;
    double evaluate(double x) const;
    /// Unclipped estimate at the cell midpoints of spec.
    std::vector<double> tabulate(const GridSpec& spec) const;

    /// Richardson error estimate from the last evaluate() call.
    double last_error_estimate() const { return last_error_; }

private:
    std::vector<double> thetas_;
    std::vector<double> variances_;
    double b_;
    DeconvolutionOptions opts_;
    mutable double last_error_ = 0.0;
};

/// 1/b^2 = log(K) / mean(sigma_k^2/n_k), capped so the exponent at the
/// cutoff stays <= 30. Returns b.
double default_deconv_bandwidth(std::span<const EstimateSummary> summaries);
/// 1 - 1/K
double default_kappa(std::size_t K);
/// mean +- 8 sd of the estimates, 2048 cells.
GridSpec default_deconv_grid(std::span<const EstimateSummary> summaries);

/// kappa * normalized positive part of the deconvolution estimate plus
/// (1 - kappa) * fallback, renormalized on grid.
GridPrior fit_deconv_prior(std::span<const EstimateSummary> summaries, double b, double kappa,
                           const GaussianParams& fallback, const GridSpec& grid,
                           const DeconvolutionOptions& opts = {});

}  // namespace ebcr
