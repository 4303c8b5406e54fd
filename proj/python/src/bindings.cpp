#include "ebcr/cli_io.hpp"
#include "ebcr/errors.hpp"
#include "ebcr/estimators.hpp"
#include "ebcr/posterior_region.hpp"
#include "ebcr/prior_fit.hpp"
#include "ebcr/sim_harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ebcr;

namespace {

std::optional<NoiseModel> noise_of(const std::optional<EstimateSummary>& obs) {
    if (!obs) return std::nullopt;
    return NoiseModel{obs->sigma_hat_sq, obs->n};
}

TauSolveConfig tau_config(std::uint64_t seed, std::size_t mc_draws, int threads) {
    TauSolveConfig cfg;
    cfg.seed = seed;
    cfg.mc_draws = mc_draws;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
}

PopulationData population(const std::string& id, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    PopulationData d{id, X, y};
    validate(d);
    return d;
}

}  // namespace

PYBIND11_MODULE(_ebcr, m) {
    m.doc() = "Empirical Bayes confidence regions pooled across populations";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def("normal_pdf", [](double x, double mean, double var) { return normal_pdf(x, {mean, var}); },
          py::arg("x"), py::arg("mean") = 0.0, py::arg("variance") = 1.0);
    m.def("normal_cdf", [](double x, double mean, double var) { return normal_cdf(x, {mean, var}); },
          py::arg("x"), py::arg("mean") = 0.0, py::arg("variance") = 1.0);
    m.def("normal_quantile", &normal_quantile, py::arg("p"));
    m.def("z_critical", &z_critical, py::arg("alpha"));
    m.def("kl_divergence",
          [](double m1, double v1, double m2, double v2) { return tv_upper_bound({m1, v1}, {m2, v2}); },
          py::arg("mean_a"), py::arg("var_a"), py::arg("mean_b"), py::arg("var_b"));

    py::class_<GaussianParams>(m, "GaussianParams")
        .def(py::init<double, double>(), py::arg("mean"), py::arg("variance"))
        .def_readonly("mean", &GaussianParams::mean)
        .def_readonly("variance", &GaussianParams::variance)
        .def("__repr__", [](const GaussianParams& g) {
            return "GaussianParams(mean=" + format_double(g.mean) + ", variance=" + format_double(g.variance) + ")";
        });

    py::class_<GridDensity>(m, "GridDensity")
        .def_property_readonly("start", &GridDensity::start)
        .def_property_readonly("step", &GridDensity::step)
        .def_property_readonly("midpoints", [](const GridDensity& g) {
            std::vector<double> x(g.n_cells());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.midpoint(i);
            return x;
        })
        .def_property_readonly("values", [](const GridDensity& g) {
            return std::vector<double>(g.values().begin(), g.values().end());
        })
        .def("total_mass", &GridDensity::total_mass)
        .def("__call__", &GridDensity::operator(), py::arg("x"));

    py::class_<EstimateSummary>(m, "EstimateSummary")
        .def(py::init([](std::string id, double theta_hat, double sigma_hat_sq, std::size_t n) {
                 return EstimateSummary{std::move(id), theta_hat, sigma_hat_sq, n, false, 0.0};
             }),
             py::arg("id"), py::arg("theta_hat"), py::arg("sigma_hat_sq"), py::arg("n"))
        .def_readwrite("id", &EstimateSummary::id)
        .def_readwrite("theta_hat", &EstimateSummary::theta_hat)
        .def_readwrite("sigma_hat_sq", &EstimateSummary::sigma_hat_sq)
        .def_readwrite("n", &EstimateSummary::n)
        .def_property_readonly("sampling_variance", &EstimateSummary::sampling_variance)
        .def("__repr__", [](const EstimateSummary& e) {
            return "EstimateSummary(id='" + e.id + "', theta_hat=" + format_double(e.theta_hat) +
                   ", sigma_hat_sq=" + format_double(e.sigma_hat_sq) + ", n=" + std::to_string(e.n) + ")";
        });

    m.def(
        "ols_estimate",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t coef, const std::string& id) {
            return ols_fit(population(id, X, y), coef).summary;
        },
        py::arg("X"), py::arg("y"), py::arg("coef") = 0, py::arg("id") = "P");
    m.def(
        "debiased_lasso_estimate",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t coef, const std::string& id) {
            return debiased_lasso(population(id, X, y), coef).summary;
        },
        py::arg("X"), py::arg("y"), py::arg("coef") = 0, py::arg("id") = "P");
    m.def(
        "lasso",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
            return lasso_cd(X, y, lambda).coefficients;
        },
        py::arg("X"), py::arg("y"), py::arg("lam"));

    py::class_<GaussianPrior>(m, "GaussianPrior")
        .def(py::init([](double mean, double var) { return GaussianPrior{GaussianParams(mean, var)}; }),
             py::arg("mean"), py::arg("variance"))
        .def_readonly("params", &GaussianPrior::params);
    py::class_<KernelMixturePrior>(m, "KernelMixturePrior")
        .def(py::init([](std::vector<double> centers, double b2) {
                 if (centers.empty() || !(b2 > 0.0)) throw InputError("kernel mixture needs centers and b^2 > 0");
                 return KernelMixturePrior{std::move(centers), b2};
             }),
             py::arg("centers"), py::arg("bandwidth_sq"))
        .def_readonly("centers", &KernelMixturePrior::centers)
        .def_readonly("bandwidth_sq", &KernelMixturePrior::bandwidth_sq);
    py::class_<GridPrior>(m, "GridPrior")
        .def(py::init([](double start, double step, std::vector<double> values) {
                 return GridPrior{GridDensity(start, step, std::move(values)).normalized()};
             }),
             py::arg("start"), py::arg("step"), py::arg("values"))
        .def_readonly("grid", &GridPrior::grid);

    m.def("prior_kind", &prior_kind, py::arg("prior"));
    m.def("prior_density", &prior_density, py::arg("prior"), py::arg("x"));
    m.def(
        "default_zeta_sq", [](const std::vector<EstimateSummary>& s) { return default_zeta_sq(s); },
        py::arg("summaries"));
    m.def(
        "fit_gaussian_prior", [](const std::vector<EstimateSummary>& s, double z) { return fit_gaussian_prior(s, z); },
        py::arg("summaries"), py::arg("zeta_sq"));
    m.def(
        "silverman_bandwidth_sq", [](const std::vector<EstimateSummary>& s) { return silverman_bandwidth_sq(s); },
        py::arg("summaries"));
    m.def(
        "fit_kde_prior", [](const std::vector<EstimateSummary>& s, double b2) { return fit_kde_prior(s, b2); },
        py::arg("summaries"), py::arg("bandwidth_sq"));
    m.def(
        "default_deconv_bandwidth", [](const std::vector<EstimateSummary>& s) { return default_deconv_bandwidth(s); },
        py::arg("summaries"));
    m.def("default_kappa", &default_kappa, py::arg("K"));
    m.def(
        "fit_deconv_prior",
        [](const std::vector<EstimateSummary>& s, std::optional<double> b, std::optional<double> kappa) {
            const auto g = fit_gaussian_prior(s, default_zeta_sq(s));
            return fit_deconv_prior(s, b.value_or(default_deconv_bandwidth(s)), kappa.value_or(default_kappa(s.size())),
                                    g.params, default_deconv_grid(s));
        },
        py::arg("summaries"), py::arg("b") = py::none(), py::arg("kappa") = py::none());

    py::class_<Interval>(m, "Interval")
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi)
        .def("__repr__", [](const Interval& i) {
            return "[" + format_double(i.lo) + ", " + format_double(i.hi) + "]";
        });
    py::class_<Region>(m, "Region")
        .def_readonly("intervals", &Region::intervals)
        .def_readonly("measure", &Region::measure)
        .def_readonly("tau", &Region::tau)
        .def_readonly("resolution", &Region::resolution)
        .def("contains", &Region::contains, py::arg("x"))
        .def("__contains__", &Region::contains);
    py::class_<TauSolution>(m, "TauSolution")
        .def_readonly("tau", &TauSolution::tau)
        .def_readonly("region_tau", &TauSolution::region_tau)
        .def_readonly("coverage", &TauSolution::coverage)
        .def_readonly("plateau", &TauSolution::plateau)
        .def_readonly("full_support", &TauSolution::full_support);

    m.def(
        "posterior_density",
        [](const Prior& prior, const std::optional<EstimateSummary>& obs, double x) {
            return posterior_density(compute_posterior(prior, obs), x);
        },
        py::arg("prior"), py::arg("target"), py::arg("x"));
    m.def(
        "solve_tau",
        [](const Prior& prior, const std::optional<EstimateSummary>& obs, double alpha, std::uint64_t seed,
           std::size_t mc_draws, int threads) {
            return solve_tau(prior, noise_of(obs), alpha, tau_config(seed, mc_draws, threads));
        },
        py::arg("prior"), py::arg("target") = py::none(), py::arg("alpha") = 0.05, py::arg("seed") = 0,
        py::arg("mc_draws") = 4000, py::arg("threads") = 1);
    m.def(
        "eb_region",
        [](const Prior& prior, const std::optional<EstimateSummary>& obs, double alpha, std::uint64_t seed,
           std::size_t mc_draws, int threads) {
            return eb_region(prior, obs, alpha, tau_config(seed, mc_draws, threads)).region;
        },
        py::arg("prior"), py::arg("target") = py::none(), py::arg("alpha") = 0.05, py::arg("seed") = 0,
        py::arg("mc_draws") = 4000, py::arg("threads") = 1);
    m.def("eb_gaussian_interval", &eb_gaussian_interval, py::arg("prior"), py::arg("target"),
          py::arg("alpha") = 0.05);
    m.def("classical_interval", &classical_interval, py::arg("target"), py::arg("alpha") = 0.05);
    m.def(
        "hybrid_select",
        [](const Prior& prior, const EstimateSummary& obs, double alpha, std::uint64_t seed, std::size_t mc_draws) {
            const auto h = hybrid_select(prior, obs, alpha, tau_config(seed, mc_draws, 1));
            py::dict d;
            d["region"] = h.region;
            d["chosen"] = to_string(h.chosen);
            d["expected_eb_measure"] = h.expected_eb_measure;
            d["classical_measure"] = h.classical_measure;
            return d;
        },
        py::arg("prior"), py::arg("target"), py::arg("alpha") = 0.05, py::arg("seed") = 0,
        py::arg("mc_draws") = 4000);

    m.def(
        "_run_experiment",
        [](const std::string& config_json) {
            const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
            ExperimentReport rep;
            {
                py::gil_scoped_release release;
                rep = run_experiment(cfg);
            }
            std::ostringstream md;
            write_results_markdown(md, cfg, rep.results);
            return py::make_tuple(results_to_json(cfg, rep.results).dump(), md.str());
        },
        py::arg("config_json"));
    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "ebcr");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
