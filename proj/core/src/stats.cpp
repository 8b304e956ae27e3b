#include "tsreason/detail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tsreason/detail/distributions.hpp"

namespace tsr::detail {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty range");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("std requires at least 2 points");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double min_value(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("min of empty range");
    return *std::min_element(xs.begin(), xs.end());
}

double max_value(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("max of empty range");
    return *std::max_element(xs.begin(), xs.end());
}

double quantile(std::span<const double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty range");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return sorted[lo];
    const double w = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

double median(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty range");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double mad_sigma(std::span<const double> xs) {
    const double med = median(xs);
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::fabs(xs[i] - med);
    return 1.4826 * median(dev);
}

double autocorrelation(std::span<const double> xs, std::size_t lag) {
    const std::size_t n = xs.size();
    if (lag >= n) throw std::invalid_argument("autocorrelation lag out of range");
    const double m = mean(xs);
    double denom = 0.0;
    for (double x : xs) denom += (x - m) * (x - m);
    if (denom <= 0.0) throw std::invalid_argument("autocorrelation of constant series");
    double num = 0.0;
    for (std::size_t t = lag; t < n; ++t) num += (xs[t] - m) * (xs[t - lag] - m);
    return num / denom;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("pearson requires equal-length inputs of size >= 2");
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("pearson of constant input");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
        i = j + 1;
    }
    return out;
}

std::vector<double> diff(std::span<const double> xs) {
    if (xs.size() < 2) return {};
    std::vector<double> out(xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) out[i] = xs[i + 1] - xs[i];
    return out;
}

namespace {

// Solve the symmetric positive-definite system A x = b in place (Cholesky).
// Returns false when A is not (numerically) positive definite.
bool solve_spd(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t k = a.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i][j];
            for (std::size_t m = 0; m < j; ++m) sum -= a[i][m] * a[j][m];
            if (i == j) {
                if (sum <= 1e-12) return false;
                a[i][i] = std::sqrt(sum);
            } else {
                a[i][j] = sum / a[j][j];
            }
        }
    }
    // forward substitution L y = b
    for (std::size_t i = 0; i < k; ++i) {
        double sum = b[i];
        for (std::size_t m = 0; m < i; ++m) sum -= a[i][m] * b[m];
        b[i] = sum / a[i][i];
    }
    // back substitution L' x = y
    for (std::size_t ii = k; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t m = ii + 1; m < k; ++m) sum -= a[m][ii] * b[m];
        b[ii] = sum / a[ii][ii];
    }
    return true;
}

}  // namespace

OlsFit ols(const std::vector<std::vector<double>>& design, std::span<const double> y) {
    const std::size_t n = design.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("ols: empty or mismatched inputs");
    const std::size_t k = design[0].size();
    if (k == 0 || n < k) throw std::invalid_argument("ols: more parameters than observations");

    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& row = design[t];
        for (std::size_t i = 0; i < k; ++i) {
            xty[i] += row[i] * y[t];
            for (std::size_t j = 0; j <= i; ++j) xtx[i][j] += row[i] * row[j];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) xtx[i][j] = xtx[j][i];

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coef = xty;
    auto chol = xtx;
    if (!solve_spd(chol, fit.coef)) throw std::runtime_error("ols: rank-deficient regression");

    double rss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double fitted = 0.0;
        for (std::size_t i = 0; i < k; ++i) fitted += design[t][i] * fit.coef[i];
        const double e = y[t] - fitted;
        rss += e * e;
    }
    fit.rss = rss;

    if (n > k) {
        const double sigma2 = rss / static_cast<double>(n - k);
        fit.stderr_coef.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> ei(k, 0.0);
            ei[i] = 1.0;
            auto chol2 = xtx;
            if (!solve_spd(chol2, ei)) throw std::runtime_error("ols: rank-deficient regression");
            fit.stderr_coef[i] = std::sqrt(std::max(0.0, sigma2 * ei[i]));
        }
    }
    return fit;
}

double ols_rss(const std::vector<std::vector<double>>& design, std::span<const double> y) {
    return ols(design, y).rss;
}

LineFit fit_line(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("fit_line requires at least 3 points");
    std::vector<std::vector<double>> design(n, std::vector<double>(2));
    for (std::size_t t = 0; t < n; ++t) {
        design[t][0] = 1.0;
        design[t][1] = static_cast<double>(t);
    }
    const auto fit = ols(design, xs);
    LineFit out;
    out.intercept = fit.coef[0];
    out.slope = fit.coef[1];
    out.slope_stderr = fit.stderr_coef[1];
    if (out.slope_stderr > 0.0) {
        out.slope_t = out.slope / out.slope_stderr;
        out.slope_p = student_t_two_sided_p(out.slope_t, fit.dof());
    } else {
        // perfectly collinear fit: a nonzero slope is trivially significant
        out.slope_t = out.slope == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        out.slope_p = out.slope == 0.0 ? 1.0 : 0.0;
    }
    return out;
}

}  // namespace tsr::detail
