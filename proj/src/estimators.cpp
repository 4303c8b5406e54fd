#include "ebcr/estimators.hpp"

#include "ebcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ebcr {

namespace {

constexpr double kMaxCondition = 1e12;

struct QrSolve {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    bool full_rank = false;
};

QrSolve factor(const Eigen::MatrixXd& X) {
    QrSolve out{Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X), false};
    const auto p = X.cols();
    if (p == 0) {
        out.full_rank = true;
        return out;
    }
    const auto& R = out.qr.matrixR();
    const double r_max = std::abs(R(0, 0));
    const double r_min = std::abs(R(p - 1, p - 1));
    out.full_rank = r_max > 0.0 && r_min > 0.0 && r_max / r_min < kMaxCondition;
    return out;
}

// [(X'X)^{-1}] from the pivoted QR factor.
Eigen::MatrixXd gram_inverse(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const auto p = qr.cols();
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd inner = Rinv * Rinv.transpose();
    const auto& P = qr.colsPermutation();
    return P * inner * P.transpose();
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

}  // namespace

void validate(const PopulationData& data) {
    if (data.y.size() < 1) throw InputError("population '" + data.id + "' has no observations");
    if (data.X.rows() != data.y.size()) {
        throw InputError("population '" + data.id + "': X and y row counts differ");
    }
    if (!data.X.allFinite() || !data.y.allFinite()) {
        throw InputError("population '" + data.id + "' contains non-finite values");
    }
}

OlsFit ols_fit(const PopulationData& data, std::size_t target_index) {
    validate(data);
    const auto n = data.n();
    const auto p = data.p();
    if (target_index >= p) throw InputError("ols_fit: target index out of range");
    if (n <= p) throw InputError("ols_fit: n <= p in population '" + data.id + "', use debiased_lasso");
    const QrSolve f = factor(data.X);
    if (!f.full_rank) throw InputError("singular design in population '" + data.id + "'");

    OlsFit out;
    out.coefficients = f.qr.solve(data.y);
    const Eigen::VectorXd resid = data.y - data.X * out.coefficients;
    out.sigma_eps_sq = resid.squaredNorm() / static_cast<double>(n - p);
    const Eigen::MatrixXd ginv = gram_inverse(f.qr);
    const auto j = static_cast<Eigen::Index>(target_index);

    out.summary.id = data.id;
    out.summary.theta_hat = out.coefficients(j);
    out.summary.sigma_hat_sq = static_cast<double>(n) * out.sigma_eps_sq * ginv(j, j);
    out.summary.n = n;
    return out;
}

std::size_t LassoFit::support_size() const {
    return static_cast<std::size_t>((coefficients.array() != 0.0).count());
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda) {
    const double n = static_cast<double>(y.size());
    return 0.5 * (y - X * beta).squaredNorm() / n + lambda * beta.lpNorm<1>();
}

LassoFit lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                  const LassoOptions& opts) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lasso_cd: lambda must be >= 0");
    if (X.rows() != y.size()) throw InputError("lasso_cd: X and y row counts differ");
    const auto n = X.rows();
    const auto p = X.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    // Column scales; coordinate updates divide by these so the penalty stays
    // on the original scale.
    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = X.col(j).squaredNorm() * inv_n;

    LassoFit fit;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd& beta = fit.coefficients;
    Eigen::VectorXd resid = y;

    auto update = [&](Eigen::Index j) {
        if (col_sq(j) <= 0.0) return 0.0;
        const double old = beta(j);
        const double rho = X.col(j).dot(resid) * inv_n + col_sq(j) * old;
        const double next = soft_threshold(rho, lambda) / col_sq(j);
        const double delta = next - old;
        if (delta != 0.0) {
            resid.noalias() -= delta * X.col(j);
            beta(j) = next;
        }
        return std::abs(delta) * std::sqrt(col_sq(j));
    };
    auto record = [&] {
        if (opts.objective_trace) {
            opts.objective_trace->push_back(0.5 * resid.squaredNorm() * inv_n +
                                            lambda * beta.lpNorm<1>());
        }
    };
    auto kkt = [&] {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) <= 0.0) continue;
            const double g = X.col(j).dot(resid) * inv_n;
            const double v = beta(j) != 0.0 ? std::abs(g - lambda * (beta(j) > 0 ? 1.0 : -1.0))
                                            : std::max(0.0, std::abs(g) - lambda);
            worst = std::max(worst, v);
        }
        return worst;
    };

    const double y_scale = std::max(1.0, std::sqrt(y.squaredNorm() * inv_n));
    std::vector<Eigen::Index> active;
    while (fit.sweeps < opts.max_sweeps) {
        for (Eigen::Index j = 0; j < p; ++j) update(j);
        ++fit.sweeps;
        record();
        fit.kkt_residual = kkt();
        if (fit.kkt_residual <= opts.kkt_tol) return fit;

        active.clear();
        for (Eigen::Index j = 0; j < p; ++j) {
            if (beta(j) != 0.0) active.push_back(j);
        }
        while (fit.sweeps < opts.max_sweeps) {
            double biggest = 0.0;
            for (Eigen::Index j : active) biggest = std::max(biggest, update(j));
            ++fit.sweeps;
            record();
            if (biggest <= 1e-3 * opts.kkt_tol * y_scale) break;
        }
    }
    throw NumericalError("lasso diverged");
}

LassoFit lasso_cd(const PopulationData& data, double lambda, const LassoOptions& opts) {
    validate(data);
    return lasso_cd(data.X, data.y, lambda, opts);
}

namespace {

double residual_variance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit,
                         const std::string& id) {
    const auto n = static_cast<double>(y.size());
    const auto df = static_cast<double>(fit.support_size());
    if (n - df < 1.0) {
        throw NumericalError("lasso support saturates the sample in population '" + id + "'");
    }
    return (y - X * fit.coefficients).squaredNorm() / (n - df);
}

}  // namespace

double default_lasso_lambda(const PopulationData& data) {
    validate(data);
    const auto n = static_cast<double>(data.n());
    const auto p = static_cast<double>(data.p());
    const double lambda0 = std::sqrt(2.0 * std::log(std::max(p, 1.0)) / n);
    const LassoFit pre = lasso_cd(data.X, data.y, lambda0);
    return lambda0 * std::sqrt(residual_variance(data.X, data.y, pre, data.id));
}

DebiasedLassoFit debiased_lasso(const PopulationData& data, std::size_t target_index,
                                double lambda, double lambda_node) {
    validate(data);
    const auto p = data.p();
    const auto n = data.n();
    if (target_index >= p) throw InputError("debiased_lasso: target index out of range");
    if (!(lambda >= 0.0) || !(lambda_node >= 0.0)) {
        throw InputError("debiased_lasso: penalties must be non-negative");
    }
    const auto j = static_cast<Eigen::Index>(target_index);
    const double nn = static_cast<double>(n);

    DebiasedLassoFit out;
    out.lambda = lambda;
    out.lambda_node = lambda_node;
    const LassoFit main = lasso_cd(data.X, data.y, lambda);
    out.lasso_coefficients = main.coefficients;
    out.sigma_eps_sq = residual_variance(data.X, data.y, main, data.id);

    // Nodewise regression of column j on the remaining columns.
    Eigen::MatrixXd others(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p - 1));
    if (j > 0) others.leftCols(j) = data.X.leftCols(j);
    if (j + 1 < static_cast<Eigen::Index>(p)) {
        others.rightCols(static_cast<Eigen::Index>(p) - j - 1) =
            data.X.rightCols(static_cast<Eigen::Index>(p) - j - 1);
    }
    const Eigen::VectorXd xj = data.X.col(j);
    Eigen::VectorXd z = xj;
    if (p > 1) {
        const LassoFit node = lasso_cd(others, xj, lambda_node);
        z -= others * node.coefficients;
    }
    const double tau_sq = z.dot(xj) / nn;
    if (!(tau_sq > 1e-12 * xj.squaredNorm() / nn)) {
        throw NumericalError("nodewise regression degenerate in population '" + data.id + "'");
    }

    const Eigen::VectorXd resid = data.y - data.X * main.coefficients;
    out.summary.id = data.id;
    out.summary.n = n;
    out.summary.theta_hat = main.coefficients(j) + z.dot(resid) / (nn * tau_sq);
    // Theta_j' Sigma_hat Theta_j = ||z||^2 / (n tau^4)
    out.summary.sigma_hat_sq = out.sigma_eps_sq * z.squaredNorm() / (nn * tau_sq * tau_sq);
    return out;
}

DebiasedLassoFit debiased_lasso(const PopulationData& data, std::size_t target_index) {
    const double lambda = default_lasso_lambda(data);
    return debiased_lasso(data, target_index, lambda, lambda);
}

EstimateSummary smooth_estimate(const EstimateSummary& e, double varsigma_sq, RngStream& rng) {
    if (!(varsigma_sq >= 0.0) || !std::isfinite(varsigma_sq)) {
        throw InputError("smooth_estimate: varsigma_sq must be >= 0");
    }
    EstimateSummary out = e;
    out.smoothed = true;
    out.varsigma_sq = varsigma_sq;
    if (varsigma_sq == 0.0) return out;
    std::normal_distribution<double> z;
    out.theta_hat += z(rng) * std::sqrt(varsigma_sq / static_cast<double>(e.n));
    out.sigma_hat_sq += varsigma_sq;
    return out;
}

double default_smoothing_variance(const EstimateSummary& e, bool continuous_noise) {
    if (continuous_noise) return 0.0;
    if (e.n < 2) throw InputError("default smoothing needs n >= 2");
    return e.sigma_hat_sq / std::log(static_cast<double>(e.n));
}

double intercept_information(const Eigen::MatrixXd& X) {
    const auto n = X.rows();
    if (X.cols() == 0) return static_cast<double>(n);
    const QrSolve f = factor(X);
    if (!f.full_rank) throw InputError("singular design");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd fitted = X * f.qr.solve(ones);
    return static_cast<double>(n) - ones.dot(fitted);
}

double intercept_information(const Eigen::MatrixXd& X0, const Eigen::MatrixXd& gram) {
    const auto n = X0.rows();
    if (X0.cols() == 0) return static_cast<double>(n);
    const Eigen::VectorXd v = X0.transpose() * Eigen::VectorXd::Ones(n);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) throw InputError("singular Gram matrix");
    const Eigen::VectorXd d = ldlt.vectorD();
    if (d.minCoeff() <= d.maxCoeff() / kMaxCondition) throw InputError("singular Gram matrix");
    return static_cast<double>(n) - v.dot(ldlt.solve(v));
}

VarianceComponents anova_variance_components(std::span<const PopulationData> populations) {
    if (populations.empty()) throw InputError("anova_variance_components: no populations");
    const auto p = populations.front().p();
    VarianceComponents out;
    double rss = 0.0;
    double total_n = 0.0;
    for (const auto& pop : populations) {
        validate(pop);
        if (pop.p() != p) throw InputError("populations disagree on the number of covariates");
        if (pop.n() <= p + 1) {
            throw InputError("population '" + pop.id + "' needs more than p + 1 observations");
        }
        const auto n = static_cast<Eigen::Index>(pop.n());
        Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(p + 1));
        Z.col(0).setOnes();
        Z.rightCols(static_cast<Eigen::Index>(p)) = pop.X;
        const QrSolve f = factor(Z);
        if (!f.full_rank) throw InputError("singular design in population '" + pop.id + "'");
        const Eigen::VectorXd coef = f.qr.solve(pop.y);
        rss += (pop.y - Z * coef).squaredNorm();
        total_n += static_cast<double>(pop.n());
        out.theta_hat.push_back(coef(0));
        try {
            out.information.push_back(intercept_information(pop.X));
        } catch (const InputError&) {
            throw InputError("singular design in population '" + pop.id + "'");
        }
    }
    const double K = static_cast<double>(populations.size());
    out.sigma_eps_sq = rss / (total_n - K * static_cast<double>(p));
    double acc = 0.0;
    for (std::size_t k = 0; k < populations.size(); ++k) {
        acc += out.theta_hat[k] * out.theta_hat[k] - out.sigma_eps_sq / out.information[k];
    }
    out.sigma_pi_sq = acc / K;
    return out;
}

}  // namespace ebcr
