#include "ebcr/stat_core.hpp"

#include "ebcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ebcr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation, relative error below 1.2e-9.
double quantile_initial_guess(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for p <= 0.5, refined against the lower tail where Phi is
// computed without cancellation.
double lower_quantile(double p) {
    double x = quantile_initial_guess(p);
    for (int i = 0; i < 2; ++i) {
        const double err = std_normal_cdf(x) - p;
        const double dens = std_normal_pdf(x);
        if (dens <= 0.0) break;
        // Halley step; converges cubically from Acklam's start.
        const double u = err / dens;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace

GaussianParams::GaussianParams(double mean_, double variance_) : mean(mean_), variance(variance_) {
    if (!std::isfinite(mean_) || !std::isfinite(variance_) || !(variance_ > 0.0)) {
        throw InputError("GaussianParams: variance must be finite and positive");
    }
}

double GaussianParams::sd() const { return std::sqrt(variance); }

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_pdf(double x, const GaussianParams& p) {
    const double sd = p.sd();
    return std_normal_pdf((x - p.mean) / sd) / sd;
}

double normal_cdf(double x, const GaussianParams& p) {
    return std_normal_cdf((x - p.mean) / p.sd());
}

double log_normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * kPi * variance) + d * d / variance);
}

PdfCdf normal_pdf_cdf(double x, const GaussianParams& p) {
    if (!std::isfinite(x)) throw InputError("normal_pdf_cdf: x must be finite");
    return {normal_pdf(x, p), normal_cdf(x, p)};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InputError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
    }
    if (p == 0.5) return 0.0;
    if (p < 0.5) return lower_quantile(p);
    return -lower_quantile(1.0 - p);
}

double z_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    return -lower_quantile(0.5 * alpha);
}

double tv_upper_bound(const GaussianParams& a, const GaussianParams& b) {
    const double dm = a.mean - b.mean;
    return 0.5 * std::log(b.variance / a.variance) + (a.variance + dm * dm) / (2.0 * b.variance) -
           0.5;
}

GridSpec default_grid(double mean, double sd, std::size_t n_cells) {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
        throw InputError("default_grid: need finite mean and positive sd");
    }
    const double half = kDefaultGridHalfWidthSd * sd;
    return grid_between(mean - half, mean + half, n_cells);
}

GridSpec grid_between(double lo, double hi, std::size_t n_cells) {
    if (!(hi > lo) || n_cells < GridDensity::kMinCells) {
        throw InputError("grid_between: need lo < hi and at least 16 cells");
    }
    return {lo, (hi - lo) / static_cast<double>(n_cells), n_cells};
}

GridDensity::GridDensity(double start, double step, std::vector<double> values)
    : start_(start), step_(step), values_(std::move(values)) {
    if (!(step_ > 0.0) || !std::isfinite(step_) || !std::isfinite(start_)) {
        throw InputError("GridDensity: step must be positive and finite");
    }
    if (values_.size() < kMinCells) {
        throw InputError("GridDensity: at least 16 cells required");
    }
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InputError("GridDensity: values must be finite and non-negative");
        }
    }
}

GridDensity::GridDensity(const GridSpec& spec, std::vector<double> values)
    : GridDensity(spec.start, spec.step, std::move(values)) {
    if (values_.size() != spec.n_cells) throw InputError("GridDensity: size mismatch with spec");
}

double GridDensity::total_mass() const {
    return step_ * std::accumulate(values_.begin(), values_.end(), 0.0);
}

GridDensity GridDensity::normalized() const {
    const double mass = total_mass();
    if (!(mass > 0.0)) throw NumericalError("degenerate density");
    if (std::abs(mass - 1.0) <= 1e-12) return *this;
    std::vector<double> out(values_.size());
    const double scale = 1.0 / mass;
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [scale](double v) { return v * scale; });
    GridDensity g;
    g.start_ = start_;
    g.step_ = step_;
    g.values_ = std::move(out);
    return g;
}

double GridDensity::integrate(double lo, double hi) const {
    if (hi < lo) std::swap(lo, hi);
    lo = std::max(lo, start_);
    hi = std::min(hi, end());
    if (!(hi > lo)) return 0.0;
    const auto n = static_cast<std::ptrdiff_t>(values_.size());
    auto first = static_cast<std::ptrdiff_t>(std::floor((lo - start_) / step_));
    auto last = static_cast<std::ptrdiff_t>(std::floor((hi - start_) / step_));
    first = std::clamp<std::ptrdiff_t>(first, 0, n - 1);
    last = std::clamp<std::ptrdiff_t>(last, 0, n - 1);
    double sum = 0.0;
    for (auto i = first; i <= last; ++i) {
        const double a = std::max(lo, start_ + static_cast<double>(i) * step_);
        const double b = std::min(hi, start_ + static_cast<double>(i + 1) * step_);
        if (b > a) sum += values_[static_cast<std::size_t>(i)] * (b - a);
    }
    return sum;
}

double GridDensity::operator()(double x) const {
    if (x < start_ || x >= end()) return 0.0;
    auto i = static_cast<std::size_t>((x - start_) / step_);
    i = std::min(i, values_.size() - 1);
    return values_[i];
}

double GridDensity::interpolate(double x) const {
    if (x < start_ || x > end()) return 0.0;
    const double u = (x - start_) / step_ - 0.5;
    if (u <= 0.0) return values_.front();
    const auto last = static_cast<double>(values_.size() - 1);
    if (u >= last) return values_.back();
    const auto i = static_cast<std::size_t>(u);
    const double t = u - static_cast<double>(i);
    return (1.0 - t) * values_[i] + t * values_[i + 1];
}

double GridDensity::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<double> tabulate(const GridSpec& spec, const std::function<double(double)>& f) {
    std::vector<double> out(spec.n_cells);
    for (std::size_t i = 0; i < spec.n_cells; ++i) out[i] = f(spec.midpoint(i));
    return out;
}

void accumulate_gaussian(std::span<double> values, const GridSpec& spec, double mean,
                         double variance, double weight) {
    if (weight == 0.0) return;
    const double h = spec.step;
    const double sd = std::sqrt(variance);
    const auto n = static_cast<std::ptrdiff_t>(spec.n_cells);
    const double reach = 12.0 * sd;
    const auto lo = std::max<std::ptrdiff_t>(
        0, static_cast<std::ptrdiff_t>(std::floor((mean - reach - spec.start) / h - 0.5)));
    const auto hi = std::min<std::ptrdiff_t>(
        n - 1, static_cast<std::ptrdiff_t>(std::ceil((mean + reach - spec.start) / h - 0.5)));
    if (lo > hi) return;
    auto c = static_cast<std::ptrdiff_t>(std::llround((mean - spec.start) / h - 0.5));
    c = std::clamp(c, lo, hi);

    const double xc = spec.midpoint(static_cast<std::size_t>(c));
    const double dc = xc - mean;
    const double fc = weight * kInvSqrt2Pi / sd * std::exp(-0.5 * dc * dc / variance);
    const double step_ratio = std::exp(-h * h / variance);

    values[static_cast<std::size_t>(c)] += fc;
    double f = fc;
    double r = std::exp(-(dc * h + 0.5 * h * h) / variance);
    for (auto i = c + 1; i <= hi; ++i) {
        f *= r;
        r *= step_ratio;
        if (f == 0.0) break;
        values[static_cast<std::size_t>(i)] += f;
    }
    f = fc;
    double l = std::exp((dc * h - 0.5 * h * h) / variance);
    for (auto i = c - 1; i >= lo; --i) {
        f *= l;
        l *= step_ratio;
        if (f == 0.0) break;
        values[static_cast<std::size_t>(i)] += f;
    }
}

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw InputError("sample_mean: empty input");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw InputError("sample_variance: need at least two values");
    const double m = sample_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double sample_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw InputError("sample_quantile: empty input");
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * q;
    const auto i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= xs.size()) return xs.back();
    return xs[i] + (h - static_cast<double>(i)) * (xs[i + 1] - xs[i]);
}

double median(std::vector<double> xs) { return sample_quantile(std::move(xs), 0.5); }

}  // namespace ebcr
