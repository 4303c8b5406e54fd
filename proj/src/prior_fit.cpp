#include "ebcr/prior_fit.hpp"

#include "ebcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ebcr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_summaries(std::span<const EstimateSummary> summaries, const char* who) {
    if (summaries.size() < 2) throw InputError(std::string(who) + ": need at least two populations");
    for (const auto& s : summaries) {
        if (!std::isfinite(s.theta_hat) || !std::isfinite(s.sigma_hat_sq) || !(s.sigma_hat_sq > 0.0) ||
            s.n < 1) {
            throw InputError(std::string(who) + ": non-finite or invalid summary '" + s.id + "'");
        }
    }
}

std::vector<double> thetas_of(std::span<const EstimateSummary> summaries) {
    std::vector<double> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) out.push_back(s.theta_hat);
    return out;
}

std::vector<double> sampling_variances(std::span<const EstimateSummary> summaries) {
    std::vector<double> out;
    out.reserve(summaries.size());
    for (const auto& s : summaries) out.push_back(s.sampling_variance());
    return out;
}

struct Profile {
    double mean;
    double loglik;
    double score;
};

Profile profile_at(std::span<const double> theta, std::span<const double> v, double s) {
    double wsum = 0.0;
    double wtheta = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double w = 1.0 / (s + v[k]);
        wsum += w;
        wtheta += w * theta[k];
    }
    const double mu = wtheta / wsum;
    double ll = 0.0;
    double score = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double t = s + v[k];
        const double d = theta[k] - mu;
        ll -= 0.5 * (std::log(t) + d * d / t);
        score += 0.5 * (d * d / (t * t) - 1.0 / t);
    }
    return {mu, ll, score};
}

}  // namespace

std::string prior_kind(const Prior& prior) {
    return std::visit(overloaded{[](const GaussianPrior&) { return std::string("gaussian"); },
                                 [](const KernelMixturePrior&) { return std::string("kernel_mixture"); },
                                 [](const GridPrior&) { return std::string("grid"); }},
                      prior);
}

double prior_density(const Prior& prior, double x) {
    return std::visit(
        overloaded{[x](const GaussianPrior& g) { return normal_pdf(x, g.params); },
                   [x](const KernelMixturePrior& m) {
                       const double sd = std::sqrt(m.bandwidth_sq);
                       double acc = 0.0;
                       for (double c : m.centers) acc += std_normal_pdf((x - c) / sd);
                       return acc / (sd * static_cast<double>(m.centers.size()));
                   },
                   [x](const GridPrior& g) { return g.grid(x); }},
        prior);
}

GridSpec default_grid(const Prior& prior, std::size_t n_cells) {
    return std::visit(
        overloaded{[n_cells](const GaussianPrior& g) {
                       return default_grid(g.params.mean, g.params.sd(), n_cells);
                   },
                   [n_cells](const KernelMixturePrior& m) {
                       const double mean = sample_mean(m.centers);
                       double spread = 0.0;
                       for (double c : m.centers) spread += (c - mean) * (c - mean);
                       spread /= static_cast<double>(m.centers.size());
                       const double sd = std::sqrt(m.bandwidth_sq + spread);
                       const double b = std::sqrt(m.bandwidth_sq);
                       const auto [lo, hi] = std::minmax_element(m.centers.begin(), m.centers.end());
                       const double a = std::min(mean - 8.0 * sd, *lo - 8.0 * b);
                       const double z = std::max(mean + 8.0 * sd, *hi + 8.0 * b);
                       return grid_between(a, z, n_cells);
                   },
                   [](const GridPrior& g) { return g.grid.spec(); }},
        prior);
}

GridDensity tabulate_prior(const Prior& prior, const GridSpec& spec) {
    std::vector<double> values(spec.n_cells, 0.0);
    std::visit(overloaded{[&](const GaussianPrior& g) {
                              accumulate_gaussian(values, spec, g.params.mean, g.params.variance, 1.0);
                          },
                          [&](const KernelMixturePrior& m) {
                              const double w = 1.0 / static_cast<double>(m.centers.size());
                              for (double c : m.centers) accumulate_gaussian(values, spec, c, m.bandwidth_sq, w);
                          },
                          [&](const GridPrior& g) {
                              for (std::size_t i = 0; i < spec.n_cells; ++i) values[i] = g.grid(spec.midpoint(i));
                          }},
               prior);
    return GridDensity(spec, std::move(values)).normalized();
}

PriorSampler::PriorSampler(const Prior& prior) : prior_(prior) {
    if (const auto* g = std::get_if<GridPrior>(&prior_)) {
        const auto vals = g->grid.values();
        cdf_.resize(vals.size());
        std::partial_sum(vals.begin(), vals.end(), cdf_.begin());
        if (!(cdf_.back() > 0.0)) throw NumericalError("degenerate density");
        for (double& c : cdf_) c /= cdf_.back();
    }
}

double PriorSampler::operator()(RngStream& rng) const {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    return std::visit(
        overloaded{[&](const GaussianPrior& g) { return g.params.mean + g.params.sd() * z(rng); },
                   [&](const KernelMixturePrior& m) {
                       std::uniform_int_distribution<std::size_t> pick(0, m.centers.size() - 1);
                       const double c = m.centers[pick(rng)];
                       return c + std::sqrt(m.bandwidth_sq) * z(rng);
                   },
                   [&](const GridPrior& g) {
                       const double r = u(rng);
                       auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
                       if (it == cdf_.end()) --it;
                       const auto i = static_cast<std::size_t>(it - cdf_.begin());
                       return g.grid.start() + (static_cast<double>(i) + u(rng)) * g.grid.step();
                   }},
        prior_);
}

double default_zeta_sq(std::span<const EstimateSummary> summaries) {
    check_summaries(summaries, "default_zeta_sq");
    return median(sampling_variances(summaries)) / static_cast<double>(summaries.size());
}

GaussianPrior fit_gaussian_prior_profile(std::span<const EstimateSummary> summaries,
                                         double zeta_sq) {
    check_summaries(summaries, "fit_gaussian_prior");
    if (!(zeta_sq > 0.0) || !std::isfinite(zeta_sq)) throw InputError("zeta_sq must be positive");
    const auto theta = thetas_of(summaries);
    const auto v = sampling_variances(summaries);

    const double centre = sample_mean(theta);
    double reach = 0.0;
    for (double t : theta) reach = std::max(reach, std::abs(t - centre));
    const double upper = 4.0 * reach * reach;

    double s_hat = 0.0;
    if (upper > 0.0 && profile_at(theta, v, 0.0).score > 0.0) {
        // Coarse scan, then bisection on the score inside the best bracket.
        constexpr int kScan = 400;
        std::vector<double> grid(kScan + 1);
        for (int i = 0; i <= kScan; ++i) {
            const double f = static_cast<double>(i) / kScan;
            grid[static_cast<std::size_t>(i)] = upper * f * f;
        }
        double best_ll = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < kScan; ++i) {
            double lo = grid[static_cast<std::size_t>(i)];
            double hi = grid[static_cast<std::size_t>(i + 1)];
            Profile plo = profile_at(theta, v, lo);
            const Profile phi = profile_at(theta, v, hi);
            if (!(plo.score > 0.0 && phi.score <= 0.0)) continue;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (profile_at(theta, v, mid).score > 0.0) lo = mid; else hi = mid;
            }
            plo = profile_at(theta, v, lo);
            if (plo.loglik > best_ll) {
                best_ll = plo.loglik;
                s_hat = lo;
            }
        }
        if (profile_at(theta, v, upper).loglik > best_ll) s_hat = upper;
    }
    const double mu = profile_at(theta, v, s_hat).mean;
    return GaussianPrior{GaussianParams(mu, std::max(s_hat, zeta_sq))};
}

GaussianPrior fit_gaussian_prior(std::span<const EstimateSummary> summaries, double zeta_sq) {
    check_summaries(summaries, "fit_gaussian_prior");
    if (!(zeta_sq > 0.0) || !std::isfinite(zeta_sq)) throw InputError("zeta_sq must be positive");
    const std::size_t m = summaries.front().n;
    const bool equal_n = std::all_of(summaries.begin(), summaries.end(),
                                     [m](const EstimateSummary& s) { return s.n == m; });
    if (!equal_n) return fit_gaussian_prior_profile(summaries, zeta_sq);

    const auto theta = thetas_of(summaries);
    const double K = static_cast<double>(theta.size());
    const double mu = std::accumulate(theta.begin(), theta.end(), 0.0) / K;
    double spread = 0.0;
    double sigma_sq = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        spread += (theta[k] - mu) * (theta[k] - mu);
        sigma_sq += summaries[k].sigma_hat_sq;
    }
    spread /= K;
    sigma_sq /= K;
    const double var = std::max(spread - sigma_sq / static_cast<double>(m), 0.0);
    return GaussianPrior{GaussianParams(mu, std::max(var, zeta_sq))};
}

double silverman_bandwidth_sq(std::span<const EstimateSummary> summaries) {
    check_summaries(summaries, "silverman_bandwidth_sq");
    const auto theta = thetas_of(summaries);
    const double sd = std::sqrt(sample_variance(theta));
    const double iqr = sample_quantile(theta, 0.75) - sample_quantile(theta, 0.25);
    double scale = std::min(sd, iqr / 1.34);
    if (!(scale > 0.0)) scale = std::max(sd, iqr / 1.34);
    if (!(scale > 0.0)) throw NumericalError("estimates have no spread; bandwidth undefined");
    const double b = 0.9 * scale * std::pow(static_cast<double>(theta.size()), -0.2);
    return b * b;
}

KernelMixturePrior fit_kde_prior(std::span<const EstimateSummary> summaries, double bandwidth_sq) {
    check_summaries(summaries, "fit_kde_prior");
    if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq)) {
        throw InputError("fit_kde_prior: bandwidth_sq must be positive");
    }
    return KernelMixturePrior{thetas_of(summaries), bandwidth_sq};
}

DeconvolutionEstimator::DeconvolutionEstimator(std::span<const EstimateSummary> summaries, double b,
                                               DeconvolutionOptions opts)
    : thetas_(thetas_of(summaries)), variances_(sampling_variances(summaries)), b_(b), opts_(opts) {
    check_summaries(summaries, "deconvolution");
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("deconvolution: b must be positive");
    if (opts_.initial_intervals < 4 || opts_.initial_intervals % 4 != 0) {
        throw InputError("deconvolution: initial_intervals must be a positive multiple of 4");
    }
    const double vmax = *std::max_element(variances_.begin(), variances_.end());
    if (vmax / (2.0 * b * b) > 700.0) throw NumericalError("bandwidth too small");
}

std::complex<double> DeconvolutionEstimator::frequency_factor(double z) const {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < thetas_.size(); ++k) {
        acc += std::polar(std::exp(0.5 * variances_[k] * z * z), z * thetas_[k]);
    }
    return acc / static_cast<double>(thetas_.size());
}

std::vector<double> DeconvolutionEstimator::evaluate(std::span<const double> xs) const {
    // The integrand Re(exp(-ixz) F(z)) is even in z, so integrate over
    // [0, 1/b] with half the intervals and scale by 1/pi.
    const double cutoff = 1.0 / b_;
    std::vector<double> out(xs.size());
    std::size_t half = opts_.initial_intervals / 2;
    for (int level = 0;; ++level) {
        const std::size_t fine = half;  // intervals on [0, cutoff]
        const double h = cutoff / static_cast<double>(fine);
        std::vector<std::complex<double>> factor(fine + 1);
        for (std::size_t j = 0; j <= fine; ++j) factor[j] = frequency_factor(static_cast<double>(j) * h);

        std::vector<double> err(xs.size());
        parallel_for(xs.size(), opts_.threads, [&](std::size_t i) {
            const double x = xs[i];
            const std::complex<double> rot = std::polar(1.0, -x * h);
            std::complex<double> cur{1.0, 0.0};
            double sum_fine = 0.0;
            double sum_coarse = 0.0;
            for (std::size_t j = 0; j <= fine; ++j) {
                const double val = (cur * factor[j]).real();
                const double wf = (j == 0 || j == fine) ? 1.0 : (j % 2 ? 4.0 : 2.0);
                sum_fine += wf * val;
                if (j % 2 == 0) {
                    const std::size_t jc = j / 2;
                    const double wc = (j == 0 || j == fine) ? 1.0 : (jc % 2 ? 4.0 : 2.0);
                    sum_coarse += wc * val;
                }
                cur *= rot;
                if ((j & 255u) == 255u) cur /= std::abs(cur);
            }
            const double fine_val = sum_fine * h / 3.0 / kPi;
            const double coarse_val = sum_coarse * 2.0 * h / 3.0 / kPi;
            out[i] = fine_val;
            err[i] = std::abs(fine_val - coarse_val) / 15.0;
        });
        last_error_ = err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
        if (last_error_ <= opts_.target_error) break;
        if (level >= opts_.max_doublings) {
            if (last_error_ > opts_.max_error) throw NumericalError("refine z-grid");
            break;
        }
        half *= 2;
    }
    return out;
}

double DeconvolutionEstimator::evaluate(double x) const {
    const double xs[1] = {x};
    return evaluate(std::span<const double>(xs, 1)).front();
}

std::vector<double> DeconvolutionEstimator::tabulate(const GridSpec& spec) const {
    std::vector<double> xs(spec.n_cells);
    for (std::size_t i = 0; i < spec.n_cells; ++i) xs[i] = spec.midpoint(i);
    return evaluate(xs);
}

double default_deconv_bandwidth(std::span<const EstimateSummary> summaries) {
    check_summaries(summaries, "default_deconv_bandwidth");
    const auto v = sampling_variances(summaries);
    const double vbar = sample_mean(v);
    double inv_b_sq = std::log(static_cast<double>(summaries.size())) / vbar;
    inv_b_sq = std::min(inv_b_sq, 60.0 / vbar);
    return 1.0 / std::sqrt(inv_b_sq);
}

double default_kappa(std::size_t K) {
    if (K < 1) throw InputError("default_kappa: K must be positive");
    return 1.0 - 1.0 / static_cast<double>(K);
}

GridSpec default_deconv_grid(std::span<const EstimateSummary> summaries) {
    check_summaries(summaries, "default_deconv_grid");
    const auto theta = thetas_of(summaries);
    const double sd = std::sqrt(sample_variance(theta));
    if (!(sd > 0.0)) throw NumericalError("estimates have no spread; grid undefined");
    return default_grid(sample_mean(theta), sd);
}

GridPrior fit_deconv_prior(std::span<const EstimateSummary> summaries, double b, double kappa,
                           const GaussianParams& fallback, const GridSpec& grid,
                           const DeconvolutionOptions& opts) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw InputError("fit_deconv_prior: kappa must lie in [0, 1]");
    std::vector<double> fb(grid.n_cells, 0.0);
    accumulate_gaussian(fb, grid, fallback.mean, fallback.variance, 1.0);
    const GridDensity fallback_grid = GridDensity(grid, std::move(fb)).normalized();
    if (kappa == 0.0) return GridPrior{fallback_grid};

    const DeconvolutionEstimator est(summaries, b, opts);
    std::vector<double> raw = est.tabulate(grid);
    for (double& r : raw) r = std::max(r, 0.0);
    const GridDensity clipped = GridDensity(grid, std::move(raw)).normalized();

    std::vector<double> mixed(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        mixed[i] = kappa * clipped.value(i) + (1.0 - kappa) * fallback_grid.value(i);
    }
    return GridPrior{GridDensity(grid, std::move(mixed)).normalized()};
}

}  // namespace ebcr
