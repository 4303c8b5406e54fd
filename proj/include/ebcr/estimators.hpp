#pragma once

#include "ebcr/parallel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ebcr {

/// One population's regression data: response y and design X (n x p).
struct PopulationData {
    std::string id;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    std::size_t n() const { return static_cast<std::size_t>(y.size()); }
    std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

/// Throws InputError unless n >= 1, X has n rows and every entry is finite.
void validate(const PopulationData& data);

/// Sufficient summary of one population for prior fitting: the estimate,
/// the asymptotic variance of sqrt(n) * (estimate - theta), and n.
struct EstimateSummary {
    std::string id;
    double theta_hat = 0.0;
    double sigma_hat_sq = 1.0;
    std::size_t n = 1;
    bool smoothed = false;
    double varsigma_sq = 0.0;

    /// sigma_hat_sq / n, the sampling variance of theta_hat.
    double sampling_variance() const { return sigma_hat_sq / static_cast<double>(n); }
};

struct OlsFit {
    EstimateSummary summary;
    Eigen::VectorXd coefficients;
    double sigma_eps_sq = 0.0;
};

/// Least squares through column-pivoted QR. sigma_hat_sq is
/// n * RSS/(n-p) * [(X'X)^{-1}]_jj.
OlsFit ols_fit(const PopulationData& data, std::size_t target_index);

struct LassoOptions {
    std::size_t max_sweeps = 10000;
    double kkt_tol = 1e-7;
    /// When set, receives the objective after every sweep.
    std::vector<double>* objective_trace = nullptr;
};

struct LassoFit {
    Eigen::VectorXd coefficients;
    std::size_t sweeps = 0;
    double kkt_residual = 0.0;

    std::size_t support_size() const;
};

/// Coordinate descent for (1/2n)||y - X b||^2 + lambda ||b||_1.
LassoFit lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                  const LassoOptions& opts = {});
LassoFit lasso_cd(const PopulationData& data, double lambda, const LassoOptions& opts = {});

/// Objective value of the lasso problem above.
double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda);

/// Universal threshold sqrt(2 log p / n) scaled by the residual sd of a
/// preliminary lasso fitted at that threshold.
double default_lasso_lambda(const PopulationData& data);

struct DebiasedLassoFit {
    EstimateSummary summary;
    Eigen::VectorXd lasso_coefficients;
    double sigma_eps_sq = 0.0;
    double lambda = 0.0;
    double lambda_node = 0.0;
};

/// One-step debiased lasso for coefficient target_index with a nodewise
/// lasso estimate of the corresponding row of the precision matrix.
DebiasedLassoFit debiased_lasso(const PopulationData& data, std::size_t target_index,
                                double lambda, double lambda_node);
/// Same with lambda = lambda_node = default_lasso_lambda(data).
DebiasedLassoFit debiased_lasso(const PopulationData& data, std::size_t target_index);

/// theta_hat += z * sqrt(varsigma_sq / n), sigma_hat_sq += varsigma_sq.
EstimateSummary smooth_estimate(const EstimateSummary& e, double varsigma_sq, RngStream& rng);

/// Smoothing variance: zero when the noise is known to be absolutely
/// continuous, otherwise sigma_hat_sq / log(n).
double default_smoothing_variance(const EstimateSummary& e, bool continuous_noise);

/// n - 1'X (X'X)^{-1} X'1, the information about an additive intercept left
/// after projecting out the columns of X.
double intercept_information(const Eigen::MatrixXd& X);
/// n0 - 1'X0 G^{-1} X0'1 for a supplied (pooled) Gram matrix G.
double intercept_information(const Eigen::MatrixXd& X0, const Eigen::MatrixXd& gram);

struct VarianceComponents {
    double sigma_eps_sq = 0.0;
    /// May be negative; callers clamp.
    double sigma_pi_sq = 0.0;
    std::vector<double> theta_hat;
    std::vector<double> information;
};

/// Moment estimators for the one-way random intercept model
/// y_k = theta_k 1 + X_k beta_k + eps_k with theta_k ~ N(0, sigma_pi^2).
/// The intercept is added internally; X_k must not contain one.
VarianceComponents anova_variance_components(std::span<const PopulationData> populations);

}  // namespace ebcr
