#include "ebcr/posterior_region.hpp"

#include "ebcr/errors.hpp"
#include "ebcr/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
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

constexpr std::uint64_t kTauStreamTag = 0x54415553;     // solve_tau draws
constexpr std::uint64_t kHybridStreamTag = 0x48594252;  // hybrid_select draws
constexpr std::size_t kDrawsPerChunk = 250;

double gaussian_peak(double variance) { return 1.0 / std::sqrt(2.0 * kPi * variance); }

// Half-width of {x : phi(x | 0, v) > tau}; tau must lie in (0, peak).
double gaussian_level_radius(double variance, double tau) {
    return std::sqrt(-2.0 * variance * std::log(tau / gaussian_peak(variance)));
}

// Mass of N(0, v) above density level tau.
double gaussian_mass_above(double variance, double tau) {
    if (tau <= 0.0) return 1.0;
    if (tau >= gaussian_peak(variance)) return 0.0;
    const double r = gaussian_level_radius(variance, tau);
    return std::erf(r / std::sqrt(2.0 * variance));
}

// Cells sorted by decreasing density with cumulative mass; mass above any
// level is a binary search.
class LevelMass {
public:
    LevelMass(std::span<const double> values, double step) {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
        levels_.reserve(values.size());
        cum_.reserve(values.size());
        double acc = 0.0;
        for (std::size_t i : order) {
            levels_.push_back(values[i]);
            acc += values[i] * step;
            cum_.push_back(acc);
        }
        for (double& c : cum_) c /= acc;
    }

    double above(double tau) const {
        const auto it = std::partition_point(levels_.begin(), levels_.end(),
                                             [tau](double v) { return v > tau; });
        const auto idx = static_cast<std::size_t>(it - levels_.begin());
        return idx == 0 ? 0.0 : cum_[idx - 1];
    }
    double max_level() const { return levels_.front(); }

private:
    std::vector<double> levels_;
    std::vector<double> cum_;
};

// Density levels binned by the high bits of their IEEE representation, which
// is monotone for positive doubles: 1024 bins per octave over [2^-160, 2^160].
class LevelHistogram {
public:
    static constexpr int kShift = 42;
    static constexpr std::uint64_t kLoKey = std::bit_cast<std::uint64_t>(0x1p-160) >> kShift;
    static constexpr std::uint64_t kHiKey = std::bit_cast<std::uint64_t>(0x1p160) >> kShift;
    static constexpr std::size_t kBins = kHiKey - kLoKey + 1;
    static constexpr double kQuantum = 0x1p40;

    LevelHistogram() : counts_(kBins, 0) {}

    void add(double level, double mass) {
        const std::uint64_t key = std::bit_cast<std::uint64_t>(level) >> kShift;
        const std::uint64_t clamped = std::clamp(key, kLoKey, kHiKey);
        counts_[clamped - kLoKey] += std::llround(mass * kQuantum);
    }
    void merge(const LevelHistogram& other) {
        for (std::size_t i = 0; i < kBins; ++i) counts_[i] += other.counts_[i];
    }
    static double lower_edge(std::size_t bin) {
        return std::bit_cast<double>((bin + kLoKey) << kShift);
    }
    const std::vector<std::int64_t>& counts() const { return counts_; }

private:
    std::vector<std::int64_t> counts_;
};

double mixture_density(const MixturePosterior& m, double x) {
    const double sd = std::sqrt(m.common_variance);
    double acc = 0.0;
    for (std::size_t k = 0; k < m.means.size(); ++k) {
        if (m.weights[k] != 0.0) acc += m.weights[k] * std_normal_pdf((x - m.means[k]) / sd);
    }
    return acc / sd;
}

double refine_boundary(const std::function<double(double)>& f, double tau, double inside,
                       double outside, double tol) {
    for (int it = 0; it < 200 && std::abs(inside - outside) > tol; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (f(mid) > tau) inside = mid; else outside = mid;
    }
    return 0.5 * (inside + outside);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

void check_obs(const EstimateSummary& obs) {
    if (obs.n == 0) throw InputError("observation has n = 0; use none");
    if (!std::isfinite(obs.theta_hat) || !(obs.sigma_hat_sq > 0.0) || !std::isfinite(obs.sigma_hat_sq)) {
        throw InputError("observation '" + obs.id + "' is not finite or has non-positive variance");
    }
}

}  // namespace

Posterior compute_posterior(const Prior& prior, const std::optional<EstimateSummary>& obs) {
    if (!obs) {
        return std::visit(
            overloaded{[](const GaussianPrior& g) -> Posterior { return GaussianPosterior{g.params}; },
                       [](const KernelMixturePrior& m) -> Posterior {
                           const double w = 1.0 / static_cast<double>(m.centers.size());
                           return MixturePosterior{std::vector<double>(m.centers.size(), w), m.centers,
                                                   m.bandwidth_sq};
                       },
                       [](const GridPrior& g) -> Posterior { return GridPosterior{g.grid}; }},
            prior);
    }
    check_obs(*obs);
    const double n0 = static_cast<double>(obs->n);
    const double sig = obs->sigma_hat_sq;
    const double t0 = obs->theta_hat;
    return std::visit(
        overloaded{
            [&](const GaussianPrior& g) -> Posterior {
                const double s = g.params.variance;
                const double denom = sig + n0 * s;
                return GaussianPosterior{
                    GaussianParams((n0 * s * t0 + sig * g.params.mean) / denom, s * sig / denom)};
            },
            [&](const KernelMixturePrior& m) -> Posterior {
                const double b2 = m.bandwidth_sq;
                const double marg = b2 + sig / n0;
                const std::size_t K = m.centers.size();
                std::vector<double> logw(K);
                for (std::size_t k = 0; k < K; ++k) {
                    const double d = t0 - m.centers[k];
                    logw[k] = -0.5 * d * d / marg;
                }
                const double top = *std::max_element(logw.begin(), logw.end());
                std::vector<double> w(K);
                double total = 0.0;
                for (std::size_t k = 0; k < K; ++k) total += (w[k] = std::exp(logw[k] - top));
                for (double& x : w) x /= total;
                const double denom = n0 * b2 + sig;
                std::vector<double> means(K);
                for (std::size_t k = 0; k < K; ++k) {
                    means[k] = sig / denom * m.centers[k] + n0 * b2 / denom * t0;
                }
                return MixturePosterior{std::move(w), std::move(means), b2 * sig / denom};
            },
            [&](const GridPrior& g) -> Posterior {
                const double v = sig / n0;
                const double sd = std::sqrt(v);
                // A prior grid too coarse to resolve the likelihood is
                // resampled (piecewise constant) on a window around it.
                GridSpec spec = g.grid.spec();
                const double lo = std::max(t0 - 12.0 * sd, spec.start);
                const double hi = std::min(t0 + 12.0 * sd, spec.start + spec.step * double(spec.n_cells));
                const bool resample = spec.step > sd / 8.0 && hi > lo;
                if (resample) spec = grid_between(lo, hi, std::max<std::size_t>(spec.n_cells, kDefaultGridCells));
                const std::size_t n = spec.n_cells;
                std::vector<double> logv(n, -std::numeric_limits<double>::infinity());
                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < n; ++i) {
                    const double gi = resample ? g.grid(spec.midpoint(i)) : g.grid.value(i);
                    if (gi <= 0.0) continue;
                    const double d = t0 - spec.midpoint(i);
                    logv[i] = std::log(gi) - 0.5 * d * d / v;
                    top = std::max(top, logv[i]);
                }
                std::vector<double> vals(n);
                for (std::size_t i = 0; i < n; ++i) vals[i] = std::exp(logv[i] - top);
                return GridPosterior{GridDensity(spec, std::move(vals)).normalized()};
            }},
        prior);
}

std::string posterior_kind(const Posterior& post) {
    return std::visit(overloaded{[](const GaussianPosterior&) { return std::string("gaussian"); },
                                 [](const MixturePosterior&) { return std::string("mixture"); },
                                 [](const GridPosterior&) { return std::string("grid"); }},
                      post);
}

double posterior_density(const Posterior& post, double x) {
    return std::visit(overloaded{[x](const GaussianPosterior& g) { return normal_pdf(x, g.params); },
                                 [x](const MixturePosterior& m) { return mixture_density(m, x); },
                                 [x](const GridPosterior& g) { return g.grid(x); }},
                      post);
}

GridSpec default_grid(const Posterior& post, std::size_t n_cells) {
    return std::visit(
        overloaded{[n_cells](const GaussianPosterior& g) {
                       return default_grid(g.params.mean, g.params.sd(), n_cells);
                   },
                   [n_cells](const MixturePosterior& m) {
                       const double wmax = *std::max_element(m.weights.begin(), m.weights.end());
                       double mean = 0.0;
                       for (std::size_t k = 0; k < m.means.size(); ++k) mean += m.weights[k] * m.means[k];
                       double var = m.common_variance;
                       double lo = std::numeric_limits<double>::infinity();
                       double hi = -lo;
                       for (std::size_t k = 0; k < m.means.size(); ++k) {
                           var += m.weights[k] * (m.means[k] - mean) * (m.means[k] - mean);
                           if (m.weights[k] > 1e-14 * wmax) {
                               lo = std::min(lo, m.means[k]);
                               hi = std::max(hi, m.means[k]);
                           }
                       }
                       const double sd = std::sqrt(var);
                       const double c = std::sqrt(m.common_variance);
                       return grid_between(std::min(mean - 8.0 * sd, lo - 8.0 * c),
                                           std::max(mean + 8.0 * sd, hi + 8.0 * c), n_cells);
                   },
                   [](const GridPosterior& g) { return g.grid.spec(); }},
        post);
}

std::vector<double> tabulate_posterior(const Posterior& post, const GridSpec& spec) {
    std::vector<double> values(spec.n_cells, 0.0);
    std::visit(overloaded{[&](const GaussianPosterior& g) {
                              accumulate_gaussian(values, spec, g.params.mean, g.params.variance, 1.0);
                          },
                          [&](const MixturePosterior& m) {
                              const double wmax = *std::max_element(m.weights.begin(), m.weights.end());
                              for (std::size_t k = 0; k < m.means.size(); ++k) {
                                  if (m.weights[k] > 1e-16 * wmax) {
                                      accumulate_gaussian(values, spec, m.means[k], m.common_variance,
                                                          m.weights[k]);
                                  }
                              }
                          },
                          [&](const GridPosterior& g) {
                              for (std::size_t i = 0; i < spec.n_cells; ++i) values[i] = g.grid(spec.midpoint(i));
                          }},
               post);
    return values;
}

bool Region::contains(double x) const {
    return std::any_of(intervals.begin(), intervals.end(),
                       [x](const Interval& iv) { return iv.contains(x); });
}

Region make_region(std::vector<Interval> intervals, double tau, double resolution) {
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    Region r;
    r.tau = tau;
    r.resolution = resolution;
    for (const auto& iv : intervals) {
        if (!r.intervals.empty() && iv.lo - r.intervals.back().hi <= resolution) {
            r.intervals.back().hi = std::max(r.intervals.back().hi, iv.hi);
        } else {
            r.intervals.push_back(iv);
        }
    }
    for (const auto& iv : r.intervals) r.measure += iv.length();
    return r;
}

void TauSolveConfig::validate() const {
    if (mc_draws < 500) throw InputError("TauSolveConfig: mc_draws must be >= 500");
    if (!(bisection_tol > 0.0)) throw InputError("TauSolveConfig: bisection_tol must be positive");
    if (max_iters < 1) throw InputError("TauSolveConfig: max_iters must be positive");
    if (grid_cells < GridDensity::kMinCells) throw InputError("TauSolveConfig: grid_cells must be >= 16");
    if (!(plateau_mass > 0.0)) throw InputError("TauSolveConfig: plateau_mass must be positive");
}

namespace {

template <class MassAbove>
TauSolution bisect_tau(const MassAbove& mass_above, double max_level, double alpha,
                       const TauSolveConfig& cfg) {
    const double target = 1.0 - alpha;
    double lo = 0.0;
    double hi = max_level;
    for (std::size_t it = 0; it < cfg.max_iters && hi - lo > cfg.bisection_tol * max_level; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass_above(mid) >= target) lo = mid; else hi = mid;
    }
    TauSolution sol;
    sol.coverage = mass_above(lo);
    const double jump = sol.coverage - mass_above(hi);
    sol.full_support = lo == 0.0;
    if (jump > cfg.plateau_mass) {
        sol.plateau = true;
        sol.tau = hi;
    } else {
        sol.tau = lo;
    }
    sol.region_tau = lo;
    return sol;
}

}  // namespace

TauSolution solve_tau(const Prior& prior, const std::optional<NoiseModel>& noise, double alpha,
                      const TauSolveConfig& cfg) {
    check_alpha(alpha);
    cfg.validate();

    if (!noise || noise->n0 == 0) {
        if (const auto* g = std::get_if<GaussianPrior>(&prior)) {
            const double v = g->params.variance;
            return bisect_tau([v](double t) { return gaussian_mass_above(v, t); }, gaussian_peak(v),
                              alpha, cfg);
        }
        const GridDensity tab = tabulate_prior(prior, default_grid(prior, cfg.grid_cells));
        const LevelMass levels(tab.values(), tab.step());
        return bisect_tau([&levels](double t) { return levels.above(t); }, levels.max_level(), alpha,
                          cfg);
    }

    if (!(noise->sigma_hat_sq > 0.0)) throw InputError("solve_tau: noise variance must be positive");
    const PriorSampler sampler(prior);
    const double noise_sd = std::sqrt(noise->variance());
    const std::size_t n_chunks = (cfg.mc_draws + kDrawsPerChunk - 1) / kDrawsPerChunk;
    LevelHistogram total;
    std::mutex merge_mutex;
    parallel_for(n_chunks, resolve_threads(cfg.threads), [&](std::size_t chunk) {
        RngStream rng = make_stream({cfg.seed, kTauStreamTag, chunk});
        std::normal_distribution<double> z;
        LevelHistogram local;
        const std::size_t first = chunk * kDrawsPerChunk;
        const std::size_t last = std::min(cfg.mc_draws, first + kDrawsPerChunk);
        EstimateSummary obs;
        obs.sigma_hat_sq = noise->sigma_hat_sq;
        obs.n = noise->n0;
        for (std::size_t d = first; d < last; ++d) {
            const double theta = sampler(rng);
            obs.theta_hat = theta + noise_sd * z(rng);
            const Posterior post = compute_posterior(prior, obs);
            const GridSpec spec = default_grid(post, cfg.grid_cells);
            const std::vector<double> vals = tabulate_posterior(post, spec);
            const double mass = spec.step * std::accumulate(vals.begin(), vals.end(), 0.0);
            if (!(mass > 0.0)) throw NumericalError("degenerate density");
            const double scale = 1.0 / mass;
            for (double v : vals) {
                if (v > 0.0) local.add(v * scale, v * scale * spec.step);
            }
        }
        std::lock_guard lock(merge_mutex);
        total.merge(local);
    });

    // Integer counts make the merged histogram independent of merge order.
    const auto& counts = total.counts();
    const double all = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    const double need = (1.0 - alpha) * all;
    std::int64_t cum = 0;
    std::size_t bin = 0;
    for (std::size_t b = LevelHistogram::kBins; b-- > 0;) {
        cum += counts[b];
        if (static_cast<double>(cum) >= need) {
            bin = b;
            break;
        }
    }
    TauSolution sol;
    sol.coverage = static_cast<double>(cum) / all;
    sol.full_support = bin == 0;
    sol.region_tau = sol.full_support ? 0.0 : LevelHistogram::lower_edge(bin);
    const double bin_mass = static_cast<double>(counts[bin]) / all;
    if (!sol.full_support && bin_mass > cfg.plateau_mass) {
        sol.plateau = true;
        sol.tau = LevelHistogram::lower_edge(bin + 1);
    } else {
        sol.tau = sol.region_tau;
    }
    return sol;
}

Region extract_region(const Posterior& post, double tau, std::size_t n_cells) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("extract_region: tau must be >= 0");
    const GridSpec spec = default_grid(post, n_cells);

    if (const auto* g = std::get_if<GaussianPosterior>(&post)) {
        if (tau == 0.0) return make_region({{spec.start, spec.end()}}, tau, spec.step);
        if (tau >= gaussian_peak(g->params.variance)) throw NumericalError("tau too large");
        const double r = gaussian_level_radius(g->params.variance, tau);
        return make_region({{g->params.mean - r, g->params.mean + r}}, tau, spec.step);
    }
    if (tau == 0.0 && std::holds_alternative<MixturePosterior>(post)) {
        return make_region({{spec.start, spec.end()}}, tau, spec.step);
    }

    const std::vector<double> values = tabulate_posterior(post, spec);
    std::function<double(double)> f;
    if (const auto* m = std::get_if<MixturePosterior>(&post)) {
        f = [m](double x) { return mixture_density(*m, x); };
    } else {
        const auto& grid = std::get<GridPosterior>(post).grid;
        f = [&grid](double x) { return grid.interpolate(x); };
    }
    const double tol = 1e-8 * spec.width();
    std::vector<Interval> pieces;
    const std::size_t n = spec.n_cells;
    std::size_t i = 0;
    while (i < n) {
        if (!(values[i] > tau)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] > tau) ++j;
        const double lo = i == 0 ? spec.start
                                 : refine_boundary(f, tau, spec.midpoint(i), spec.midpoint(i - 1), tol);
        const double hi = j + 1 == n ? spec.end()
                                     : refine_boundary(f, tau, spec.midpoint(j), spec.midpoint(j + 1), tol);
        pieces.push_back({lo, hi});
        i = j + 1;
    }
    if (pieces.empty()) throw NumericalError("tau too large");
    return make_region(std::move(pieces), tau, spec.step);
}

Region eb_gaussian_interval(const GaussianPrior& prior, const EstimateSummary& obs, double alpha) {
    check_alpha(alpha);
    check_obs(obs);
    const double n0 = static_cast<double>(obs.n);
    const double s = prior.params.variance;
    const double sig = obs.sigma_hat_sq;
    const double denom = sig + n0 * s;
    const double centre = n0 * s / denom * obs.theta_hat + sig / denom * prior.params.mean;
    const double post_var = s * sig / denom;
    const double z = z_critical(alpha);
    const double half = z * std::sqrt(post_var);
    const double step = default_grid(centre, std::sqrt(post_var)).step;
    return make_region({{centre - half, centre + half}}, std_normal_pdf(z) / std::sqrt(post_var), step);
}

Region classical_interval(const EstimateSummary& obs, double alpha) {
    check_alpha(alpha);
    check_obs(obs);
    const double half = z_critical(alpha) * std::sqrt(obs.sampling_variance());
    return make_region({{obs.theta_hat - half, obs.theta_hat + half}}, 0.0, 0.0);
}

EbRegion eb_region(const Prior& prior, const std::optional<EstimateSummary>& obs, double alpha,
                   const TauSolveConfig& cfg) {
    std::optional<NoiseModel> noise;
    if (obs) {
        check_obs(*obs);
        noise = NoiseModel{obs->sigma_hat_sq, obs->n};
    }
    EbRegion out{{}, solve_tau(prior, noise, alpha, cfg), compute_posterior(prior, obs)};
    out.region = extract_region(out.posterior, out.tau.region_tau, cfg.grid_cells);
    out.region.tau = out.tau.tau;
    return out;
}

std::string to_string(RegionMethod m) {
    return m == RegionMethod::EmpiricalBayes ? "empirical_bayes" : "classical";
}

HybridResult hybrid_select(const Prior& prior, const EstimateSummary& obs, double alpha,
                           const TauSolveConfig& cfg) {
    check_alpha(alpha);
    check_obs(obs);
    cfg.validate();
    HybridResult out;
    const NoiseModel noise{obs.sigma_hat_sq, obs.n};
    out.tau = solve_tau(prior, noise, alpha, cfg);
    out.classical_measure = 2.0 * z_critical(alpha) * std::sqrt(noise.variance());

    const PriorSampler sampler(prior);
    const double noise_sd = std::sqrt(noise.variance());
    const std::size_t n_chunks = (cfg.mc_draws + kDrawsPerChunk - 1) / kDrawsPerChunk;
    std::vector<double> chunk_sums(n_chunks, 0.0);
    parallel_for(n_chunks, resolve_threads(cfg.threads), [&](std::size_t chunk) {
        RngStream rng = make_stream({cfg.seed, kHybridStreamTag, chunk});
        std::normal_distribution<double> z;
        EstimateSummary sim = obs;
        const std::size_t first = chunk * kDrawsPerChunk;
        const std::size_t last = std::min(cfg.mc_draws, first + kDrawsPerChunk);
        double acc = 0.0;
        for (std::size_t d = first; d < last; ++d) {
            sim.theta_hat = sampler(rng) + noise_sd * z(rng);
            const Posterior post = compute_posterior(prior, sim);
            try {
                acc += extract_region(post, out.tau.region_tau, cfg.grid_cells).measure;
            } catch (const NumericalError&) {
                // Posterior peak below the threshold: empty region.
            }
        }
        chunk_sums[chunk] = acc;
    });
    double total = 0.0;
    for (double s : chunk_sums) total += s;
    out.expected_eb_measure = total / static_cast<double>(cfg.mc_draws);

    if (out.expected_eb_measure < out.classical_measure) {
        out.chosen = RegionMethod::EmpiricalBayes;
        out.region = extract_region(compute_posterior(prior, obs), out.tau.region_tau, cfg.grid_cells);
        out.region.tau = out.tau.tau;
    } else {
        out.chosen = RegionMethod::Classical;
        out.region = classical_interval(obs, alpha);
    }
    return out;
}

namespace {

const PopulationData& target_of(std::span<const PopulationData> populations) {
    if (populations.empty()) throw InputError("anova: need the target population");
    return populations.front();
}

Eigen::MatrixXd pooled_gram(std::span<const PopulationData> populations) {
    const auto p = static_cast<Eigen::Index>(target_of(populations).X.cols());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    for (const auto& pop : populations) {
        if (pop.X.cols() != p) throw InputError("anova: populations disagree on the number of covariates");
        gram.noalias() += pop.X.transpose() * pop.X;
    }
    return gram;
}

double separate_intercept(const PopulationData& pop) {
    const auto n = pop.X.rows();
    Eigen::MatrixXd Z(n, pop.X.cols() + 1);
    Z.col(0).setOnes();
    Z.rightCols(pop.X.cols()) = pop.X;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    if (qr.rank() < Z.cols()) throw InputError("singular design in population '" + pop.id + "'");
    return qr.solve(pop.y)(0);
}

// Intercept of the target when slopes are shared by every population and each
// population keeps its own intercept.
double pooled_intercept(std::span<const PopulationData> populations) {
    const auto K1 = static_cast<Eigen::Index>(populations.size());
    const auto p = target_of(populations).X.cols();
    Eigen::Index rows = 0;
    for (const auto& pop : populations) rows += pop.X.rows();
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(rows, K1 + p);
    Eigen::VectorXd y(rows);
    Eigen::Index r = 0;
    for (Eigen::Index k = 0; k < K1; ++k) {
        const auto& pop = populations[static_cast<std::size_t>(k)];
        const auto n = pop.X.rows();
        Z.block(r, k, n, 1).setOnes();
        Z.block(r, K1, n, p) = pop.X;
        y.segment(r, n) = pop.y;
        r += n;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    if (qr.rank() < Z.cols()) throw InputError("singular pooled design");
    return qr.solve(y)(0);
}

}  // namespace

double anova_information(std::span<const PopulationData> populations, bool pooled) {
    const auto& target = target_of(populations);
    if (!pooled) return intercept_information(target.X);
    return intercept_information(target.X, pooled_gram(populations));
}

GaussianParams anova_case_law(std::span<const PopulationData> populations,
                              const GaussianParams& prior, double sigma_eps_sq, AnovaCase which) {
    if (!(sigma_eps_sq > 0.0)) throw InputError("anova: sigma_eps_sq must be positive");
    const auto& target = target_of(populations);
    const bool pooled = which == AnovaCase::Pooled || which == AnovaCase::PooledPosterior;
    const bool posterior = which == AnovaCase::Posterior || which == AnovaCase::PooledPosterior;
    if (target.X.rows() == 0) {
        if (posterior) return prior;
        throw InputError("anova: sampling law needs target observations");
    }
    if (target.X.rows() != target.y.size()) throw InputError("anova: X and y row counts differ");
    const double info = anova_information(populations, pooled);
    if (!(info > 0.0)) throw InputError("anova: intercept not identified in the target design");
    const double theta_hat = pooled ? pooled_intercept(populations) : separate_intercept(target);
    if (!posterior) return GaussianParams(theta_hat, sigma_eps_sq / info);
    const double s = prior.variance;
    const double denom = s * info + sigma_eps_sq;
    return GaussianParams(sigma_eps_sq / denom * prior.mean + s * info / denom * theta_hat,
                          s * sigma_eps_sq / denom);
}

}  // namespace ebcr
