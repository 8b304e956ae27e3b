#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsr::detail {

double mean(std::span<const double> xs);

/// Sample standard deviation, n-1 denominator. Requires xs.size() >= 2.
double sample_std(std::span<const double> xs);

double min_value(std::span<const double> xs);
double max_value(std::span<const double> xs);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> xs, double q);

double median(std::span<const double> xs);

/// Median absolute deviation scaled to be consistent with the normal sd.
double mad_sigma(std::span<const double> xs);

/// Autocorrelation at `lag` (biased estimator, full-sample mean/variance).
double autocorrelation(std::span<const double> xs, std::size_t lag);

/// Pearson correlation. Requires nonconstant inputs of equal length >= 2.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Average ranks (ties averaged), for Spearman correlation.
std::vector<double> ranks(std::span<const double> xs);

/// First differences x[i+1] - x[i].
std::vector<double> diff(std::span<const double> xs);

struct OlsFit {
    std::vector<double> coef;
    std::vector<double> stderr_coef;
    double rss = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    double dof() const { return static_cast<double>(n) - static_cast<double>(k); }
};

/// Ordinary least squares on a dense row-major design matrix.
/// Throws std::runtime_error on a rank-deficient system.
OlsFit ols(const std::vector<std::vector<double>>& design, std::span<const double> y);

/// Residual sum of squares only (cheaper when t-stats are not needed).
double ols_rss(const std::vector<std::vector<double>>& design, std::span<const double> y);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double slope_t = 0.0;
    double slope_p = 0.0;  // two-sided
};

/// OLS of xs against 0..n-1 with a slope significance test.
LineFit fit_line(std::span<const double> xs);

}  // namespace tsr::detail
