#include "ebcr/errors.hpp"
#include "ebcr/stat_core.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ebcr;

TEST_CASE("normal density and distribution function") {
    auto a = normal_pdf_cdf(0.0, {0.0, 1.0});
    CHECK(a.density == doctest::Approx(0.3989422804).epsilon(1e-10));
    CHECK(a.cumulative == doctest::Approx(0.5).epsilon(1e-15));

    auto b = normal_pdf_cdf(1.959964, {0.0, 1.0});
    CHECK(std::abs(b.cumulative - 0.975) < 1e-8);

    auto c = normal_pdf_cdf(2.0, {2.0, 4.0});
    CHECK(c.density == doctest::Approx(0.1994711402).epsilon(1e-10));
    CHECK(c.cumulative == doctest::Approx(0.5));

    for (std::size_t i = 0; i < std::size(oracle::kPhiProbeX); ++i) {
        CHECK(std::abs(std_normal_cdf(oracle::kPhiProbeX[i]) - oracle::kPhiProbeValue[i]) <= 1e-12);
    }
}

TEST_CASE("normal_pdf_cdf rejects non-finite input") {
    CHECK_THROWS_AS(normal_pdf_cdf(std::numeric_limits<double>::quiet_NaN(), {0.0, 1.0}), InputError);
    CHECK_THROWS_AS(normal_pdf_cdf(std::numeric_limits<double>::infinity(), {0.0, 1.0}), InputError);
    CHECK_THROWS_AS(GaussianParams(0.0, 0.0), InputError);
    CHECK_THROWS_AS(GaussianParams(0.0, -1.0), InputError);
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(z_critical(0.05) == doctest::Approx(oracle::kZ975).epsilon(1e-13));
    for (std::size_t i = 0; i < std::size(oracle::kQuantileProbeP); ++i) {
        const double q = normal_quantile(oracle::kQuantileProbeP[i]);
        CHECK(std::abs(std_normal_cdf(q) - oracle::kQuantileProbeP[i]) <= 1e-10);
        CHECK(q == doctest::Approx(oracle::kQuantileProbeValue[i]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), InputError);
    CHECK_THROWS_AS(normal_quantile(1.0), InputError);
    CHECK_THROWS_AS(normal_quantile(-0.2), InputError);
}

TEST_CASE("quantile and cdf are inverse on a log-spaced probe set") {
    for (int e = -12; e <= -1; ++e) {
        for (double m : {1.0, 2.5, 5.0}) {
            const double p = m * std::pow(10.0, e);
            CHECK(std::abs(std_normal_cdf(normal_quantile(p)) - p) <= 1e-9 * std::max(1.0, p));
            CHECK(std::abs(std_normal_cdf(normal_quantile(1.0 - p)) - (1.0 - p)) <= 1e-9);
        }
    }
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(std::abs(normal_quantile(std_normal_cdf(x)) - x) <= 1e-9 * std::max(1.0, std::abs(x)));
    }
}

TEST_CASE("KL-based bound") {
    CHECK(tv_upper_bound({0, 1}, {0, 1}) == doctest::Approx(0.0));
    CHECK(tv_upper_bound({0, 1}, {1, 1}) == doctest::Approx(0.5));
    CHECK(tv_upper_bound({0, 1}, {0, 2}) == doctest::Approx(oracle::kKlExample).epsilon(1e-14));
}

TEST_CASE("correct Pinsker forms hold for numerically integrated distances") {
    // ||f - g||_1 <= sqrt(2 KL) and TV = ||f - g||_1 / 2 <= sqrt(KL / 2).
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mean(-2.0, 2.0);
    std::uniform_real_distribution<double> var(0.2, 4.0);
    for (int t = 0; t < 50; ++t) {
        const GaussianParams a(mean(rng), var(rng));
        const GaussianParams b(mean(rng), var(rng));
        const double lo = std::min(a.mean - 12 * a.sd(), b.mean - 12 * b.sd());
        const double hi = std::max(a.mean + 12 * a.sd(), b.mean + 12 * b.sd());
        const GridSpec g = grid_between(lo, hi, 20000);
        double l1 = 0.0;
        for (std::size_t i = 0; i < g.n_cells; ++i) {
            l1 += std::abs(normal_pdf(g.midpoint(i), a) - normal_pdf(g.midpoint(i), b)) * g.step;
        }
        const double kl = tv_upper_bound(a, b);
        CHECK(l1 <= std::sqrt(2.0 * kl) + 1e-3);
        CHECK(0.5 * l1 <= std::sqrt(kl) + 1e-3);
    }
}

TEST_CASE("grid normalisation and integration") {
    GridDensity u(0.0, 0.01, std::vector<double>(100, 3.0));
    const auto un = u.normalized();
    for (double v : un.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    const GridSpec spec = default_grid(0.0, 1.0);
    CHECK(spec.n_cells == 2048);
    CHECK(spec.start == doctest::Approx(-8.0));
    const GridDensity g =
        GridDensity(spec, tabulate(spec, [](double x) { return normal_pdf(x, {0.0, 1.0}); })).normalized();
    CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g.integrate(-1.96, 1.96) - oracle::kNormalMass196) <= 1e-4);
    CHECK(g.integrate(-100.0, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.integrate(1.0, 1.0) == 0.0);

    CHECK_THROWS_AS(GridDensity(0.0, 1.0, std::vector<double>(32, 0.0)).normalized(), NumericalError);
    CHECK_THROWS_AS(GridDensity(0.0, 1.0, std::vector<double>(8, 1.0)), InputError);
    std::vector<double> neg(32, 1.0);
    neg[3] = -1.0;
    CHECK_THROWS_AS(GridDensity(0.0, 1.0, neg), InputError);
}

TEST_CASE("normalisation is idempotent to one ulp") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<double> v(777);
    for (double& x : v) x = u(rng);
    const auto once = GridDensity(-3.0, 0.013, v).normalized();
    const auto twice = once.normalized();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = once.value(i);
        const double b = twice.value(i);
        CHECK((a == b || std::nextafter(a, b) == b));
    }
}

TEST_CASE("interpolation and point evaluation") {
    GridDensity g(0.0, 1.0, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
    CHECK(g(0.2) == 0.0);
    CHECK(g(3.7) == 3.0);
    CHECK(g(-0.1) == 0.0);
    CHECK(g(16.5) == 0.0);
    CHECK(g.interpolate(3.5) == doctest::Approx(3.0));
    CHECK(g.interpolate(4.0) == doctest::Approx(3.5));
    CHECK(g.interpolate(0.25) == doctest::Approx(0.0));
    CHECK(g.interpolate(15.9) == doctest::Approx(15.0));
    CHECK(g.max_value() == 15.0);
}

TEST_CASE("gaussian accumulation matches direct evaluation") {
    const GridSpec spec = grid_between(-5.0, 7.0, 3001);
    std::vector<double> acc(spec.n_cells, 0.0);
    accumulate_gaussian(acc, spec, 0.731, 0.37, 0.4);
    for (std::size_t i = 0; i < spec.n_cells; ++i) {
        const double direct = 0.4 * normal_pdf(spec.midpoint(i), {0.731, 0.37});
        CHECK(std::abs(acc[i] - direct) <= 1e-12 * 0.4 / std::sqrt(0.37) + 1e-10 * direct);
    }
}

TEST_CASE("sample summaries") {
    std::vector<double> xs{4, 1, 3, 2, 5};
    CHECK(sample_mean(xs) == doctest::Approx(3.0));
    CHECK(sample_variance(xs) == doctest::Approx(2.5));
    CHECK(median(xs) == doctest::Approx(3.0));
    CHECK(sample_quantile(xs, 0.25) == doctest::Approx(2.0));
    CHECK(sample_quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
}
