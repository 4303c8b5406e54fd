#include "ebcr/errors.hpp"
#include "ebcr/posterior_region.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ebcr;

namespace {

EstimateSummary obs(double theta_hat, double sigma_sq, std::size_t n) {
    return {"P0", theta_hat, sigma_sq, n, false, 0.0};
}

GridPrior uniform_prior(double lo, double hi, std::size_t cells) {
    return GridPrior{GridDensity(grid_between(lo, hi, cells), std::vector<double>(cells, 1.0)).normalized()};
}

PopulationData random_population(std::mt19937_64& rng, std::string id, int n, int p) {
    std::normal_distribution<double> z;
    PopulationData d;
    d.id = std::move(id);
    d.X.resize(n, p);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) d.X(i, j) = z(rng) + 0.3 * j;
        d.y(i) = 0.5 + d.X.row(i).sum() * 0.2 + z(rng);
    }
    return d;
}

}  // namespace

TEST_CASE("conjugate gaussian posterior") {
    const Prior prior = GaussianPrior{GaussianParams(0.0, 1.0)};
    const auto post = std::get<GaussianPosterior>(compute_posterior(prior, obs(1.0, 1.0, 4)));
    CHECK(post.params.mean == doctest::Approx(0.8));
    CHECK(post.params.variance == doctest::Approx(0.2));
}

TEST_CASE("posterior without data is the prior") {
    const Prior g = GaussianPrior{GaussianParams(0.3, 2.0)};
    const auto pg = std::get<GaussianPosterior>(compute_posterior(g, std::nullopt));
    CHECK(pg.params.mean == 0.3);
    CHECK(pg.params.variance == 2.0);

    const Prior m = KernelMixturePrior{{-1.0, 0.0, 4.0}, 0.5};
    const auto pm = std::get<MixturePosterior>(compute_posterior(m, std::nullopt));
    CHECK(pm.means == std::vector<double>{-1.0, 0.0, 4.0});
    CHECK(pm.common_variance == 0.5);
    for (double w : pm.weights) CHECK(w == doctest::Approx(1.0 / 3.0));

    const GridPrior u = uniform_prior(0.0, 1.0, 64);
    const auto pu = std::get<GridPosterior>(compute_posterior(Prior(u), std::nullopt));
    for (std::size_t i = 0; i < 64; ++i) CHECK(pu.grid.value(i) == u.grid.value(i));

    CHECK_THROWS_WITH_AS(compute_posterior(g, obs(0.0, 1.0, 0)), doctest::Contains("use none"), InputError);
}

TEST_CASE("mixture posterior weights and components") {
    const std::vector<double> centers(std::begin(oracle::kMixPostCenters), std::end(oracle::kMixPostCenters));
    const Prior m = KernelMixturePrior{centers, 0.3};
    const auto post = std::get<MixturePosterior>(compute_posterior(m, obs(0.8, 2.0, 5)));
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(post.weights[k] == doctest::Approx(oracle::kMixPostWeights[k]).epsilon(1e-12));
        CHECK(post.means[k] == doctest::Approx(oracle::kMixPostMeans[k]).epsilon(1e-12));
        total += post.weights[k];
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(post.common_variance == doctest::Approx(oracle::kMixPostVariance).epsilon(1e-12));

    const Prior same = KernelMixturePrior{{2.0, 2.0, 2.0, 2.0}, 0.3};
    const auto ps = std::get<MixturePosterior>(compute_posterior(same, obs(-5.0, 1.0, 3)));
    for (double w : ps.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("grid posterior follows Bayes rule") {
    const GridSpec spec = default_grid(0.0, 1.0, 8192);
    const GridPrior g{GridDensity(spec, tabulate(spec, [](double x) { return normal_pdf(x, {0, 1}); })).normalized()};
    const auto post = std::get<GridPosterior>(compute_posterior(Prior(g), obs(0.8, 2.0, 5)));
    CHECK(std::abs(post.grid.total_mass() - 1.0) <= 1e-6);
    for (std::size_t i = 0; i < std::size(oracle::kGridPostX); ++i) {
        CHECK(post.grid.interpolate(oracle::kGridPostX[i]) == doctest::Approx(oracle::kGridPostValue[i]).epsilon(1e-5));
    }
}

TEST_CASE("threshold for a standard normal prior") {
    const Prior prior = GaussianPrior{GaussianParams(0.0, 1.0)};
    TauSolveConfig cfg;
    const auto sol = solve_tau(prior, std::nullopt, 0.05, cfg);
    CHECK(sol.tau == doctest::Approx(std_normal_pdf(1.959964)).epsilon(1e-6));
    CHECK(sol.tau == doctest::Approx(0.05844).epsilon(1e-4));
    CHECK_FALSE(sol.plateau);
    const auto r = extract_region(compute_posterior(prior, std::nullopt), sol.region_tau);
    REQUIRE(r.intervals.size() == 1);
    CHECK(std::abs(r.intervals[0].lo + 1.959964) <= 1e-5);
    CHECK(std::abs(r.intervals[0].hi - 1.959964) <= 1e-5);
}

TEST_CASE("uniform prior hits the plateau at its height") {
    const Prior u = uniform_prior(0.0, 1.0, 256);
    for (double alpha : {0.01, 0.05, 0.3}) {
        const auto sol = solve_tau(u, std::nullopt, alpha, TauSolveConfig{});
        CHECK(sol.plateau);
        CHECK(sol.tau == doctest::Approx(1.0).epsilon(1e-9));
        const auto r = extract_region(compute_posterior(u, std::nullopt), sol.region_tau);
        CHECK(r.measure == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("threshold on a grid prior calibrates posterior mass") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int t = 0; t < 10; ++t) {
        const GridSpec spec = grid_between(-6.0, 6.0, 1024);
        const double a = u(rng);
        const double b = u(rng);
        const GridPrior g{GridDensity(spec, tabulate(spec, [&](double x) {
                                           return 0.6 * normal_pdf(x, {-1.5, a}) + 0.4 * normal_pdf(x, {2.0, b});
                                       })).normalized()};
        const double alpha = 0.1;
        const auto sol = solve_tau(Prior(g), std::nullopt, alpha, TauSolveConfig{});
        double mass = 0.0;
        double boundary = 0.0;
        for (std::size_t i = 0; i < spec.n_cells; ++i) {
            if (g.grid.value(i) > sol.region_tau) mass += g.grid.value(i) * spec.step;
            boundary = std::max(boundary, g.grid.value(i) * spec.step);
        }
        CHECK(mass >= 1.0 - alpha - 1e-12);
        CHECK(mass <= 1.0 - alpha + boundary + 1e-12);
    }
}

TEST_CASE("Monte Carlo threshold agrees with the closed form") {
    TauSolveConfig cfg;
    cfg.seed = 3;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        const GaussianPrior prior{GaussianParams(-1.0 + 2.0 * u(rng), 0.1 + 2.0 * u(rng))};
        const auto o = obs(3.0 * u(rng) - 1.5, 0.5 + 2.0 * u(rng), 1 + std::size_t(20 * u(rng)));
        const auto eb = eb_region(prior, o, 0.05, cfg);
        const auto closed = eb_gaussian_interval(prior, o, 0.05);
        const double step = closed.resolution;
        CHECK(std::abs(eb.region.intervals[0].lo - closed.intervals[0].lo) <= 2.0 * step);
        CHECK(std::abs(eb.region.intervals[0].hi - closed.intervals[0].hi) <= 2.0 * step);
    }
}

TEST_CASE("Monte Carlo threshold is reproducible and thread independent") {
    const Prior m = KernelMixturePrior{{-1.0, 0.0, 2.5}, 0.2};
    const NoiseModel noise{1.0, 4};
    TauSolveConfig cfg;
    cfg.seed = 77;
    cfg.mc_draws = 1200;
    cfg.threads = 1;
    const auto a = solve_tau(m, noise, 0.05, cfg);
    cfg.threads = 3;
    const auto b = solve_tau(m, noise, 0.05, cfg);
    CHECK(a.tau == b.tau);
    CHECK(a.region_tau == b.region_tau);
    CHECK(a.coverage == b.coverage);
    cfg.seed = 78;
    const auto c = solve_tau(m, noise, 0.05, cfg);
    CHECK(c.coverage >= 0.95);
}

TEST_CASE("threshold config validation") {
    TauSolveConfig cfg;
    cfg.mc_draws = 100;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.bisection_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    CHECK_THROWS_AS(solve_tau(GaussianPrior{}, std::nullopt, 1.5, TauSolveConfig{}), InputError);
}

TEST_CASE("level sets") {
    const Posterior n01 = GaussianPosterior{GaussianParams(0.0, 1.0)};
    const auto r = extract_region(n01, std_normal_pdf(1.959964));
    REQUIRE(r.intervals.size() == 1);
    CHECK(r.intervals[0].lo == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(r.intervals[0].hi == doctest::Approx(1.959964).epsilon(1e-6));

    const Posterior bimodal = MixturePosterior{{0.5, 0.5}, {-3.0, 3.0}, 0.25};
    const auto b = extract_region(bimodal, 0.1);
    REQUIRE(b.intervals.size() == 2);
    CHECK(std::abs(b.intervals[0].lo + oracle::kBimodalOuter) <= 1e-6);
    CHECK(std::abs(b.intervals[0].hi + oracle::kBimodalInner) <= 1e-6);
    CHECK(std::abs(b.intervals[1].lo - oracle::kBimodalInner) <= 1e-6);
    CHECK(std::abs(b.intervals[1].hi - oracle::kBimodalOuter) <= 1e-6);
    CHECK(std::abs(b.intervals[0].lo + b.intervals[1].hi) <= 1e-6);

    const auto whole = extract_region(bimodal, 0.0);
    const GridSpec spec = default_grid(bimodal);
    CHECK(whole.measure == doctest::Approx(spec.width()));
    const auto whole_g = extract_region(n01, 0.0);
    CHECK(whole_g.measure == doctest::Approx(16.0));

    CHECK_THROWS_WITH_AS(extract_region(n01, 1.0), doctest::Contains("tau too large"), NumericalError);
    CHECK_THROWS_WITH_AS(extract_region(bimodal, 5.0), doctest::Contains("tau too large"), NumericalError);
    CHECK_THROWS_AS(extract_region(n01, -0.1), InputError);
}

TEST_CASE("region invariants") {
    const Posterior m = MixturePosterior{{0.2, 0.5, 0.3}, {-2.0, 0.5, 3.0}, 0.3};
    double prev_measure = std::numeric_limits<double>::infinity();
    Region prev;
    for (double tau : {0.01, 0.05, 0.1, 0.2, 0.3}) {
        const Region r = extract_region(m, tau);
        double total = 0.0;
        for (std::size_t i = 0; i < r.intervals.size(); ++i) {
            total += r.intervals[i].length();
            if (i > 0) CHECK(r.intervals[i].lo - r.intervals[i - 1].hi > r.resolution);
        }
        CHECK(std::abs(total - r.measure) <= 1e-9);
        CHECK(r.measure <= prev_measure);
        for (const auto& iv : r.intervals) {
            if (!prev.intervals.empty()) {
                CHECK(prev.contains(iv.lo));
                CHECK(prev.contains(iv.hi));
            }
        }
        prev = r;
        prev_measure = r.measure;
    }
}

TEST_CASE("grid level sets are scale equivariant") {
    const GridSpec spec = grid_between(-4.0, 4.0, 512);
    auto f = [](double x) { return std::exp(-x * x) * (1.2 + std::sin(3.0 * x)); };
    const auto vals = tabulate(spec, f);
    const Region base = extract_region(GridPosterior{GridDensity(spec, vals)}, 0.4, 512);
    for (double c : {0.5, 3.0, 1024.0}) {
        std::vector<double> scaled(vals);
        for (double& v : scaled) v *= c;
        const Region r = extract_region(GridPosterior{GridDensity(spec, scaled)}, 0.4 * c, 512);
        REQUIRE(r.intervals.size() == base.intervals.size());
        for (std::size_t i = 0; i < r.intervals.size(); ++i) {
            CHECK(r.intervals[i].lo == doctest::Approx(base.intervals[i].lo).epsilon(1e-9));
            CHECK(r.intervals[i].hi == doctest::Approx(base.intervals[i].hi).epsilon(1e-9));
        }
    }
}

TEST_CASE("closed-form intervals") {
    const GaussianPrior prior{GaussianParams(0.0, 1.0)};
    const Region eb = eb_gaussian_interval(prior, obs(1.0, 1.0, 4), 0.05);
    const double half = oracle::kZ975 * std::sqrt(0.2);
    CHECK(eb.intervals[0].lo == doctest::Approx(0.8 - half).epsilon(1e-12));
    CHECK(eb.intervals[0].hi == doctest::Approx(0.8 + half).epsilon(1e-12));
    CHECK(eb.intervals[0].lo == doctest::Approx(-0.0766).epsilon(1e-3));

    const Region cl = classical_interval(obs(0.0, 1.0, 1), 0.05);
    CHECK(cl.intervals[0].lo == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(cl.measure == doctest::Approx(2.0 * oracle::kZ975).epsilon(1e-14));

    const Region flat = eb_gaussian_interval(GaussianPrior{GaussianParams(0.0, 1e12)}, obs(1.3, 2.0, 5), 0.05);
    const Region cl2 = classical_interval(obs(1.3, 2.0, 5), 0.05);
    CHECK(flat.intervals[0].lo == doctest::Approx(cl2.intervals[0].lo).epsilon(1e-9));
    CHECK(flat.intervals[0].hi == doctest::Approx(cl2.intervals[0].hi).epsilon(1e-9));

    CHECK_THROWS_AS(eb_gaussian_interval(prior, obs(0.0, 1.0, 0), 0.05), InputError);
    CHECK_THROWS_AS(classical_interval(obs(0.0, 1.0, 0), 0.05), InputError);
}

TEST_CASE("width ratio of the closed forms") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int t = 0; t < 20; ++t) {
        const double s = u(rng);
        const double sig = u(rng);
        const std::size_t n0 = 1 + std::size_t(30 * u(rng));
        const auto o = obs(u(rng), sig, n0);
        const double ratio = eb_gaussian_interval(GaussianPrior{GaussianParams(0.0, s)}, o, 0.1).measure /
                             classical_interval(o, 0.1).measure;
        const double n = double(n0);
        CHECK(std::abs(ratio - std::sqrt(n * s / (sig + n * s))) <= 1e-10);
    }
}

TEST_CASE("hybrid selector") {
    TauSolveConfig cfg;
    cfg.seed = 9;
    cfg.mc_draws = 600;
    const auto o = obs(0.4, 1.0, 10);

    const auto tight = hybrid_select(GaussianPrior{GaussianParams(0.0, 1e-4)}, o, 0.05, cfg);
    CHECK(tight.chosen == RegionMethod::EmpiricalBayes);
    CHECK(tight.expected_eb_measure < tight.classical_measure);

    const GridPrior flat = uniform_prior(-1e4, 1e4, 2048);
    const auto wide = hybrid_select(flat, o, 0.05, cfg);
    CHECK(wide.chosen == RegionMethod::Classical);
    CHECK(wide.region.measure == doctest::Approx(classical_interval(o, 0.05).measure));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int t = 0; t < 3; ++t) {
        const auto h = hybrid_select(GaussianPrior{GaussianParams(0.0, u(rng))}, obs(u(rng), u(rng), 5), 0.05, cfg);
        CHECK(h.chosen == RegionMethod::EmpiricalBayes);
    }
}

TEST_CASE("one-way random effects closed forms") {
    std::mt19937_64 rng(6);
    const GaussianParams prior(0.0, 0.5);
    for (int t = 0; t < 20; ++t) {
        std::vector<PopulationData> pops;
        pops.push_back(random_population(rng, "T", 8 + t % 5, 2));
        for (int k = 0; k < 3; ++k) pops.push_back(random_population(rng, "S" + std::to_string(k), 10 + k, 2));
        const auto c1 = anova_case_law(pops, prior, 1.0, AnovaCase::Separate);
        const auto c2 = anova_case_law(pops, prior, 1.0, AnovaCase::Pooled);
        const auto c3 = anova_case_law(pops, prior, 1.0, AnovaCase::Posterior);
        const auto c4 = anova_case_law(pops, prior, 1.0, AnovaCase::PooledPosterior);
        CHECK(c2.variance <= c1.variance + 1e-10);
        CHECK(c3.variance < c1.variance);
        CHECK(c4.variance <= c3.variance + 1e-10);
        const double d1 = anova_information(pops, false);
        CHECK(c1.variance == doctest::Approx(1.0 / d1));
        CHECK(c3.variance == doctest::Approx(0.5 / (0.5 * d1 + 1.0)));
    }
    std::vector<PopulationData> empty(1);
    empty[0].id = "T";
    empty[0].X.resize(0, 2);
    empty[0].y.resize(0);
    const auto p3 = anova_case_law(empty, prior, 1.0, AnovaCase::Posterior);
    CHECK(p3.mean == 0.0);
    CHECK(p3.variance == 0.5);
}

TEST_CASE("one-way random effects oracle information") {
    std::vector<PopulationData> pops(3);
    pops[0] = {"A", Eigen::Map<const Eigen::Matrix<double, 12, 2, Eigen::RowMajor>>(oracle::kAnovaX0),
               Eigen::Map<const Eigen::VectorXd>(oracle::kAnovaY0, 12)};
    pops[1] = {"B", Eigen::Map<const Eigen::Matrix<double, 15, 2, Eigen::RowMajor>>(oracle::kAnovaX1),
               Eigen::Map<const Eigen::VectorXd>(oracle::kAnovaY1, 15)};
    pops[2] = {"C", Eigen::Map<const Eigen::Matrix<double, 9, 2, Eigen::RowMajor>>(oracle::kAnovaX2),
               Eigen::Map<const Eigen::VectorXd>(oracle::kAnovaY2, 9)};
    CHECK(anova_information(pops, false) == doctest::Approx(oracle::kAnovaInfo[0]).epsilon(1e-12));
    CHECK(anova_information(pops, true) == doctest::Approx(oracle::kAnovaPooledInfo).epsilon(1e-12));
}
