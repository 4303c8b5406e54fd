#include "ebcr/sim_harness.hpp"

#include "ebcr/errors.hpp"
#include "ebcr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ebcr {

namespace {

constexpr std::uint64_t kTauSeedTag = 0x7461752d73656564;

struct MethodName {
    Method method;
    const char* name;
};

constexpr MethodName kMethodNames[] = {{Method::EbPa, "EB-pa"},
                                       {Method::EbKd, "EB-kd"},
                                       {Method::EbDc, "EB-dc"},
                                       {Method::Oracle, "OR"},
                                       {Method::Classical, "CL"}};

const EstimateSummary& require_target(const std::optional<EstimateSummary>& target, Method m) {
    if (!target) throw InputError(to_string(m) + " needs target observations (n0 >= 1)");
    return *target;
}

Region level_set_region(const Prior& prior, const std::optional<EstimateSummary>& target,
                        double alpha, const TauSolveConfig& tau_cfg) {
    return eb_region(prior, target, alpha, tau_cfg).region;
}

}  // namespace

std::string to_string(Method m) {
    for (const auto& mn : kMethodNames) {
        if (mn.method == m) return mn.name;
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    for (const auto& mn : kMethodNames) {
        if (name == mn.name) return mn.method;
    }
    throw InputError("unknown method: " + name);
}

std::string to_string(Regime r) { return r == Regime::LowDim ? "low_dim" : "high_dim"; }

Regime regime_from_string(const std::string& name) {
    if (name == "low_dim") return Regime::LowDim;
    if (name == "high_dim") return Regime::HighDim;
    throw InputError("unknown regime: " + name);
}

Prior PriorSpec::as_prior() const {
    if (kind == Kind::Gaussian) return GaussianPrior{GaussianParams(mean, variance)};
    if (!(variance > 0.0)) throw InputError("mixture prior needs a positive variance");
    return KernelMixturePrior{{-1.0, 1.0}, variance};
}

void ExperimentConfig::validate() const {
    if (K < 2) throw InputError("K must be at least 2");
    if (n_k < 2) throw InputError("n_k must be at least 2");
    if (p < 1) throw InputError("p must be at least 1");
    if (s_beta >= p) throw InputError("s_beta must be smaller than p");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InputError("noise_sd must be >= 0");
    if (!(prior.variance >= 0.0) || !std::isfinite(prior.variance) || !std::isfinite(prior.mean)) {
        throw InputError("prior parameters must be finite with variance >= 0");
    }
    if (methods.empty()) throw InputError("no methods configured");
    if (replications < 1) throw InputError("replications must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (regime == Regime::LowDim && n_k <= p) throw InputError("low_dim regime needs n_k > p");
    if (regime == Regime::LowDim && n0 > 0 && n0 <= p) throw InputError("low_dim regime needs n0 > p");
    for (Method m : methods) {
        if (m == Method::Classical && n0 == 0) throw InputError("CL requires n0 >= 1");
    }
    if (mc_draws < 500) throw InputError("mc_draws must be >= 500");
    if (grid_cells < GridDensity::kMinCells) throw InputError("grid_cells must be >= 16");
}

Replication generate_replication(const ExperimentConfig& cfg, std::size_t rep_index) {
    cfg.validate();
    Replication out;
    out.theta.resize(cfg.K + 1);
    {
        RngStream rng = make_stream({cfg.seed, rep_index, 0});
        std::normal_distribution<double> z;
        std::bernoulli_distribution coin(0.5);
        const double sd = std::sqrt(cfg.prior.variance);
        for (double& t : out.theta) {
            if (cfg.prior.kind == PriorSpec::Kind::Gaussian) {
                t = cfg.prior.mean + sd * z(rng);
            } else {
                const double centre = coin(rng) ? 1.0 : -1.0;
                t = centre + sd * z(rng);
            }
        }
    }
    const auto p = static_cast<Eigen::Index>(cfg.p);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (std::size_t j = 1; j <= cfg.s_beta; ++j) beta(static_cast<Eigen::Index>(j)) = 1.0;

    for (std::size_t k = cfg.n0 > 0 ? 0 : 1; k <= cfg.K; ++k) {
        RngStream rng = make_stream({cfg.seed, rep_index, k + 1});
        std::normal_distribution<double> z;
        const auto n = static_cast<Eigen::Index>(k == 0 ? cfg.n0 : cfg.n_k);
        PopulationData pop;
        pop.id = "P" + std::to_string(k);
        pop.X.resize(n, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) pop.X(i, j) = z(rng);
        }
        beta(0) = out.theta[k];
        pop.y = pop.X * beta;
        for (Eigen::Index i = 0; i < n; ++i) pop.y(i) += cfg.noise_sd * z(rng);
        out.populations.push_back(std::move(pop));
    }
    return out;
}

EstimateSummary estimate_population(const PopulationData& pop, std::size_t target_index,
                                    Regime regime) {
    if (regime == Regime::LowDim && pop.n() > pop.p()) return ols_fit(pop, target_index).summary;
    return debiased_lasso(pop, target_index).summary;
}

TauSolveConfig replication_tau_config(const ExperimentConfig& cfg, std::size_t rep_index) {
    TauSolveConfig tc;
    tc.mc_draws = cfg.mc_draws;
    tc.grid_cells = cfg.grid_cells;
    tc.seed = make_stream({cfg.seed, rep_index, kTauSeedTag})();
    tc.threads = 1;
    return tc;
}

Region method_region(Method method, std::span<const EstimateSummary> sources,
                     const std::optional<EstimateSummary>& target, double alpha,
                     const TauSolveConfig& tau_cfg, const Prior* true_prior) {
    switch (method) {
        case Method::Classical:
            return classical_interval(require_target(target, method), alpha);
        case Method::Oracle: {
            if (true_prior == nullptr) throw InputError("OR needs the true prior");
            if (const auto* g = std::get_if<GaussianPrior>(true_prior); g && target) {
                return eb_gaussian_interval(*g, *target, alpha);
            }
            return level_set_region(*true_prior, target, alpha, tau_cfg);
        }
        case Method::EbPa: {
            const GaussianPrior prior = fit_gaussian_prior(sources, default_zeta_sq(sources));
            if (target) return eb_gaussian_interval(prior, *target, alpha);
            return level_set_region(prior, target, alpha, tau_cfg);
        }
        case Method::EbKd: {
            const KernelMixturePrior prior = fit_kde_prior(sources, silverman_bandwidth_sq(sources));
            return level_set_region(prior, target, alpha, tau_cfg);
        }
        case Method::EbDc: {
            const GaussianPrior fallback = fit_gaussian_prior(sources, default_zeta_sq(sources));
            const GridPrior prior =
                fit_deconv_prior(sources, default_deconv_bandwidth(sources), default_kappa(sources.size()),
                                 fallback.params, default_deconv_grid(sources));
            return level_set_region(prior, target, alpha, tau_cfg);
        }
    }
    throw InputError("unknown method");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    std::vector<ReplicationRecord> records(cfg.replications * n_methods);
    const std::optional<Prior> true_prior =
        cfg.prior.variance > 0.0 ? std::optional<Prior>(cfg.prior.as_prior()) : std::nullopt;

    parallel_for(cfg.replications, resolve_threads(cfg.threads), [&](std::size_t rep) {
        ReplicationRecord* slot = &records[rep * n_methods];
        for (std::size_t m = 0; m < n_methods; ++m) {
            slot[m].rep = rep;
            slot[m].method = cfg.methods[m];
        }
        auto skip_all = [&](const std::string& what) {
            for (std::size_t m = 0; m < n_methods; ++m) {
                slot[m].skipped = true;
                slot[m].error = what;
            }
        };
        std::vector<EstimateSummary> sources;
        std::optional<EstimateSummary> target;
        double theta0 = 0.0;
        try {
            const Replication data = generate_replication(cfg, rep);
            theta0 = data.theta[0];
            for (const auto& pop : data.populations) {
                EstimateSummary s = estimate_population(pop, 0, cfg.regime);
                if (pop.id == "P0") target = std::move(s); else sources.push_back(std::move(s));
            }
        } catch (const std::exception& e) {
            skip_all(e.what());
            return;
        }
        const TauSolveConfig tau_cfg = replication_tau_config(cfg, rep);
        for (std::size_t m = 0; m < n_methods; ++m) {
            slot[m].theta0 = theta0;
            try {
                slot[m].region = method_region(cfg.methods[m], sources, target, cfg.alpha, tau_cfg,
                                               true_prior ? &*true_prior : nullptr);
                slot[m].covered = slot[m].region.contains(theta0);
            } catch (const std::exception& e) {
                slot[m].skipped = true;
                slot[m].error = e.what();
            }
        }
    });

    ExperimentReport report;
    for (std::size_t m = 0; m < n_methods; ++m) {
        MethodResult r;
        r.method = cfg.methods[m];
        std::size_t covered = 0;
        double measure = 0.0;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            const auto& rec = records[rep * n_methods + m];
            if (rec.skipped) {
                ++r.skipped;
                continue;
            }
            ++r.replications;
            covered += rec.covered ? 1 : 0;
            measure += rec.region.measure;
        }
        if (static_cast<double>(r.skipped) > 0.01 * static_cast<double>(cfg.replications)) {
            std::string first;
            for (std::size_t rep = 0; rep < cfg.replications && first.empty(); ++rep) {
                first = records[rep * n_methods + m].error;
            }
            throw NumericalError(to_string(r.method) + ": " + std::to_string(r.skipped) + " of " +
                                 std::to_string(cfg.replications) +
                                 " replications failed (first error: " + first + ")");
        }
        if (r.replications > 0) {
            const double used = static_cast<double>(r.replications);
            r.coverage = static_cast<double>(covered) / used;
            r.mean_measure = measure / used;
            r.se_coverage = std::sqrt(r.coverage * (1.0 - r.coverage) / used);
        }
        report.results.push_back(r);
    }
    report.records = std::move(records);
    return report;
}

}  // namespace ebcr
