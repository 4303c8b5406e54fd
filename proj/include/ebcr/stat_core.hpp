#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ebcr {

inline constexpr double kPi = 3.14159265358979323846;

/// Mean and (strictly positive) variance of a univariate normal law.
struct GaussianParams {
    double mean = 0.0;
    double variance = 1.0;

    GaussianParams() = default;
    GaussianParams(double mean, double variance);

    double sd() const;
};

struct PdfCdf {
    double density;
    double cumulative;
};

double normal_pdf(double x, const GaussianParams& p);
double normal_cdf(double x, const GaussianParams& p);
double std_normal_pdf(double z);
double std_normal_cdf(double z);
double log_normal_pdf(double x, double mean, double variance);

/// Density and distribution function at x. Throws InputError on non-finite x.
PdfCdf normal_pdf_cdf(double x, const GaussianParams& p);

/// Standard normal quantile, |Phi(result) - p| <= 1e-10 on (0, 1).
double normal_quantile(double p);

/// Two-sided critical value z with Phi(z) = 1 - alpha / 2.
double z_critical(double alpha);

/// Kullback-Leibler divergence KL(a || b); its square root bounds the
/// distance between the two densities. Callers take the square root.
double tv_upper_bound(const GaussianParams& a, const GaussianParams& b);

/// Uniform cell layout on the real line: cell i covers
/// [start + i*step, start + (i+1)*step).
struct GridSpec {
    double start = 0.0;
    double step = 1.0;
    std::size_t n_cells = 2048;

    double end() const { return start + step * static_cast<double>(n_cells); }
    double midpoint(std::size_t i) const { return start + (static_cast<double>(i) + 0.5) * step; }
    double width() const { return step * static_cast<double>(n_cells); }
};

inline constexpr std::size_t kDefaultGridCells = 2048;
inline constexpr double kDefaultGridHalfWidthSd = 8.0;

/// mean +- 8 sd, 2048 cells.
GridSpec default_grid(double mean, double sd, std::size_t n_cells = kDefaultGridCells);
GridSpec grid_between(double lo, double hi, std::size_t n_cells = kDefaultGridCells);

/// Piecewise-constant density on a uniform grid; values are the heights at
/// cell midpoints.
class GridDensity {
public:
    static constexpr std::size_t kMinCells = 16;

    GridDensity() = default;
    GridDensity(double start, double step, std::vector<double> values);
    GridDensity(const GridSpec& spec, std::vector<double> values);

    double start() const { return start_; }
    double step() const { return step_; }
    double end() const { return start_ + step_ * static_cast<double>(values_.size()); }
    std::size_t n_cells() const { return values_.size(); }
    GridSpec spec() const { return {start_, step_, values_.size()}; }
    double midpoint(std::size_t i) const { return start_ + (static_cast<double>(i) + 0.5) * step_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }

    /// step * sum(values)
    double total_mass() const;

    /// Rescaled copy with unit mass. Throws NumericalError("degenerate density")
    /// when no value is positive.
    GridDensity normalized() const;

    /// Midpoint-rule integral over [lo, hi]; partially covered cells contribute
    /// in proportion to the covered length.
    double integrate(double lo, double hi) const;

    /// Piecewise-constant evaluation (zero outside the grid).
    double operator()(double x) const;

    /// Linear interpolation between cell midpoints, flat within the outer
    /// half-cells and zero outside the grid.
    double interpolate(double x) const;

    double max_value() const;

private:
    double start_ = 0.0;
    double step_ = 1.0;
    std::vector<double> values_;
};

/// Tabulate f at the cell midpoints of spec.
std::vector<double> tabulate(const GridSpec& spec, const std::function<double(double)>& f);

/// Add weight * phi(x | mean, variance) at every midpoint of spec within
/// +-12 sd of the mean. Uses a multiplicative recurrence, so costs two
/// multiplications per touched cell.
void accumulate_gaussian(std::span<double> values, const GridSpec& spec, double mean,
                         double variance, double weight);

/// Quantile with linear interpolation between order statistics (R type 7).
double sample_quantile(std::vector<double> xs, double q);
double sample_mean(std::span<const double> xs);
/// Variance with denominator n - 1.
double sample_variance(std::span<const double> xs);
double median(std::vector<double> xs);

}  // namespace ebcr
