#include "ebcr/cli_io.hpp"
#include "ebcr/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace ebcr {

namespace {

constexpr std::uint64_t kSmoothingTag = 0x736d6f6f7468;

struct RegionOptions {
    std::string method = "pa";
    std::string hybrid_prior = "dc";
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    std::size_t mc_draws = 4000;
    int threads = 0;
    std::optional<double> dc_bandwidth;
};

Method eb_method(const std::string& name) {
    if (name == "pa") return Method::EbPa;
    if (name == "kd") return Method::EbKd;
    if (name == "dc") return Method::EbDc;
    throw InputError("unknown method: " + name);
}

Prior fitted_prior(Method m, std::span<const EstimateSummary> sources, const RegionOptions& o) {
    const GaussianPrior gauss = fit_gaussian_prior(sources, default_zeta_sq(sources));
    switch (m) {
        case Method::EbPa: return gauss;
        case Method::EbKd: return fit_kde_prior(sources, silverman_bandwidth_sq(sources));
        case Method::EbDc:
            return fit_deconv_prior(sources, o.dc_bandwidth.value_or(default_deconv_bandwidth(sources)),
                                    default_kappa(sources.size()),
                                    gauss.params, default_deconv_grid(sources));
        default: throw InputError("not a prior-fitting method");
    }
}

void require_seed(const RegionOptions& o, const std::string& why) {
    if (!o.seed) throw InputError("--seed is required: " + why);
}

/// EB (or hybrid) row plus the classical row when a target is present.
std::vector<RegionRow> build_regions(std::span<const EstimateSummary> sources,
                                     const std::optional<EstimateSummary>& target,
                                     const std::string& target_label, std::size_t coef,
                                     const RegionOptions& o) {
    if (o.method != "pa" && o.method != "kd" && o.method != "dc" && o.method != "hybrid") {
        throw InputError("--method must be one of pa, kd, dc, hybrid");
    }
    if (target && o.method != "pa") require_seed(o, "method " + o.method + " simulates the threshold");
    TauSolveConfig tc;
    tc.mc_draws = o.mc_draws;
    tc.seed = o.seed.value_or(0);
    tc.threads = o.threads;

    std::vector<RegionRow> rows;
    if (o.method == "hybrid") {
        if (!target) throw InputError("hybrid needs a target population (--target-id)");
        const Prior prior = fitted_prior(eb_method(o.hybrid_prior), sources, o);
        const HybridResult h = hybrid_select(prior, *target, o.alpha, tc);
        char note[160];
        std::snprintf(note, sizeof note, "chose %s; expected EB measure %.4f vs classical %.4f",
                      to_string(h.chosen).c_str(), h.expected_eb_measure, h.classical_measure);
        rows.push_back({target_label, coef, "hybrid-" + o.hybrid_prior, h.region, note});
    } else {
        const Method m = eb_method(o.method);
        std::string note = target ? "" : "prior level set (no target data)";
        const Region r = m == Method::EbDc && o.dc_bandwidth
                             ? eb_region(fitted_prior(m, sources, o), target, o.alpha, tc).region
                             : method_region(m, sources, target, o.alpha, tc);
        rows.push_back({target_label, coef, to_string(m), r, note});
    }
    if (target) {
        rows.push_back({target_label, coef, to_string(Method::Classical), classical_interval(*target, o.alpha), ""});
    }
    return rows;
}

void emit_regions(std::ostream& out, std::span<const RegionRow> rows, const std::string& prefix) {
    write_regions_markdown(out, rows);
    if (prefix.empty()) return;
    std::ofstream csv(prefix + ".csv");
    std::ofstream json(prefix + ".json");
    if (!csv || !json) throw InputError("cannot write report files with prefix " + prefix);
    write_regions_csv(csv, rows);
    json << regions_to_json(rows).dump(2) << '\n';
}

std::optional<EstimateSummary> split_target(std::vector<EstimateSummary>& all,
                                            const std::optional<std::string>& target_id) {
    if (!target_id) return std::nullopt;
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const EstimateSummary& s) { return s.id == *target_id; });
    if (it == all.end()) throw InputError("target id not found: " + *target_id);
    EstimateSummary t = *it;
    all.erase(it);
    if (t.n == 0) return std::nullopt;
    return t;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Empirical Bayes confidence regions pooled across populations", "ebcr"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> sim_seed;
    int sim_threads = -1;
    std::size_t sim_reps = 0;
    std::string out_prefix;
    bool write_records = false;
    auto* simulate = app.add_subcommand("simulate", "Run a simulation experiment from a JSON config");
    simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
    simulate->add_option("--seed", sim_seed, "Master seed (overrides the config)");
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = auto)");
    simulate->add_option("--replications", sim_reps, "Override the replication count");
    simulate->add_option("--out", out_prefix, "Write <prefix>.csv and <prefix>.json");
    simulate->add_flag("--records", write_records, "Also write <prefix>_replications.csv");

    std::size_t gen_rep = 0;
    std::string gen_out;
    std::string gen_theta;
    auto* generate = app.add_subcommand("generate", "Write one simulated replication as a dataset CSV");
    generate->add_option("--config", config_path, "Experiment config (JSON)")->required();
    generate->add_option("--seed", sim_seed, "Master seed (overrides the config)");
    generate->add_option("--rep", gen_rep, "Replication index");
    generate->add_option("--out", gen_out, "Dataset CSV to write")->required();
    generate->add_option("--theta-out", gen_theta, "Also write the true parameters");

    RegionOptions ro;
    std::string data_path;
    std::optional<std::string> target_id;
    std::vector<std::size_t> coefs{1};
    bool continuous_noise = false;
    std::size_t min_rows = 50;
    std::string estimator = "auto";
    DatasetSchema schema;
    auto* analyze = app.add_subcommand("analyze", "Regions for coefficients of a pooled dataset");
    analyze->add_option("--data", data_path, "Dataset CSV")->required();
    analyze->add_option("--target-id", target_id, "Target population id (omit for n0 = 0)");
    analyze->add_option("--coef", coefs, "1-based coefficient index (repeatable)");
    analyze->add_option("--method", ro.method, "pa, kd, dc or hybrid");
    analyze->add_option("--hybrid-prior", ro.hybrid_prior, "Prior used by hybrid: pa, kd or dc");
    analyze->add_option("--alpha", ro.alpha, "Miscoverage level");
    analyze->add_option("--seed", ro.seed, "Seed for simulation and smoothing");
    analyze->add_option("--mc-draws", ro.mc_draws, "Monte Carlo draws for the threshold");
    analyze->add_option("--threads", ro.threads, "Worker threads (0 = auto)");
    analyze->add_option("--dc-bandwidth", ro.dc_bandwidth, "Deconvolution bandwidth b (default: rule of thumb)")
        ->check(CLI::PositiveNumber);
    analyze->add_flag("--continuous-noise", continuous_noise,
                      "Noise is absolutely continuous: skip the smoothing perturbation");
    analyze->add_option("--min-rows", min_rows, "Drop populations with fewer rows");
    analyze->add_option("--estimator", estimator, "auto, ols or lasso");
    analyze->add_option("--id-column", schema.id_column, "Population id column");
    analyze->add_option("--response-column", schema.response_column, "Response column");
    analyze->add_option("--covariates", schema.covariate_columns, "Covariate columns (default: all others)")
        ->delimiter(',');
    analyze->add_option("--out", out_prefix, "Write <prefix>.csv and <prefix>.json");

    std::string summaries_path;
    auto* region = app.add_subcommand("region", "Region from precomputed per-population summaries");
    region->add_option("--summaries", summaries_path, "CSV with id,theta_hat,sigma_hat_sq,n")->required();
    region->add_option("--target-id", target_id, "Target population id (omit for n0 = 0)");
    region->add_option("--method", ro.method, "pa, kd, dc or hybrid");
    region->add_option("--hybrid-prior", ro.hybrid_prior, "Prior used by hybrid: pa, kd or dc");
    region->add_option("--alpha", ro.alpha, "Miscoverage level");
    region->add_option("--seed", ro.seed, "Seed for the threshold simulation");
    region->add_option("--mc-draws", ro.mc_draws, "Monte Carlo draws for the threshold");
    region->add_option("--threads", ro.threads, "Worker threads (0 = auto)");
    region->add_option("--dc-bandwidth", ro.dc_bandwidth, "Deconvolution bandwidth b (default: rule of thumb)")
        ->check(CLI::PositiveNumber);
    region->add_option("--out", out_prefix, "Write <prefix>.csv and <prefix>.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (simulate->parsed() || generate->parsed()) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            std::ifstream raw(config_path);
            const bool config_has_seed = nlohmann::json::parse(raw).contains("seed");
            if (sim_seed) {
                cfg.seed = *sim_seed;
            } else if (!config_has_seed) {
                throw InputError("--seed is required (or set \"seed\" in the config)");
            }
            if (sim_threads >= 0) cfg.threads = sim_threads;
            if (sim_reps > 0) cfg.replications = sim_reps;
            cfg.validate();

            if (generate->parsed()) {
                const Replication rep = generate_replication(cfg, gen_rep);
                std::ofstream f(gen_out);
                if (!f) throw InputError("cannot write " + gen_out);
                write_dataset(f, rep.populations);
                if (!gen_theta.empty()) {
                    std::ofstream t(gen_theta);
                    if (!t) throw InputError("cannot write " + gen_theta);
                    t << "id,theta\n";
                    for (std::size_t k = 0; k < rep.theta.size(); ++k) {
                        t << 'P' << k << ',' << format_double(rep.theta[k]) << '\n';
                    }
                }
                out << "wrote " << rep.populations.size() << " populations to " << gen_out << '\n';
                return 0;
            }

            const ExperimentReport report = run_experiment(cfg);
            write_results_markdown(out, cfg, report.results);
            if (!out_prefix.empty()) {
                std::ofstream csv(out_prefix + ".csv");
                std::ofstream json(out_prefix + ".json");
                if (!csv || !json) throw InputError("cannot write report files with prefix " + out_prefix);
                write_results_csv(csv, report.results);
                json << results_to_json(cfg, report.results).dump(2) << '\n';
                if (write_records) {
                    std::ofstream rec(out_prefix + "_replications.csv");
                    write_records_csv(rec, report.records);
                }
            }
            return 0;
        }

        if (analyze->parsed()) {
            if (estimator != "auto" && estimator != "ols" && estimator != "lasso") {
                throw InputError("--estimator must be auto, ols or lasso");
            }
            schema.keep_id = target_id;
            StudyInput study = load_dataset(data_path, schema, min_rows, &err);
            study.target_id = target_id;
            study.alpha = ro.alpha;
            if (target_id) {
                const bool found = std::any_of(study.populations.begin(), study.populations.end(),
                                               [&](const PopulationData& p) { return p.id == *target_id; });
                if (!found) throw InputError("target id not found: " + *target_id);
            }
            const std::size_t p = study.populations.front().p();
            std::vector<RegionRow> rows;
            for (std::size_t coef : coefs) {
                if (coef < 1 || coef > p) {
                    throw InputError("--coef must lie in 1.." + std::to_string(p));
                }
                std::vector<EstimateSummary> all;
                for (std::size_t k = 0; k < study.populations.size(); ++k) {
                    const auto& pop = study.populations[k];
                    EstimateSummary s = estimator == "ols"   ? ols_fit(pop, coef - 1).summary
                                        : estimator == "lasso" ? debiased_lasso(pop, coef - 1).summary
                                                               : estimate_population(pop, coef - 1, Regime::LowDim);
                    const double varsigma = default_smoothing_variance(s, continuous_noise);
                    if (varsigma > 0.0) {
                        require_seed(ro, "smoothing is randomized (pass --continuous-noise to disable it)");
                        RngStream rng = make_stream({*ro.seed, kSmoothingTag, coef, k});
                        s = smooth_estimate(s, varsigma, rng);
                    }
                    all.push_back(std::move(s));
                }
                const auto target = split_target(all, target_id);
                auto r = build_regions(all, target, target_id.value_or("(none)"), coef, ro);
                rows.insert(rows.end(), r.begin(), r.end());
            }
            emit_regions(out, rows, out_prefix);
            return 0;
        }

        if (region->parsed()) {
            std::vector<EstimateSummary> all = load_summaries(summaries_path);
            const auto target = split_target(all, target_id);
            const auto rows = build_regions(all, target, target_id.value_or("(none)"), 0, ro);
            emit_regions(out, rows, out_prefix);
            return 0;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace ebcr
