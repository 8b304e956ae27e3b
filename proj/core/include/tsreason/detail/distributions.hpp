#pragma once

#include <cstddef>

namespace tsr::detail {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

/// Upper-tail probability P(F > f) for an F(d1, d2) statistic.
double f_upper_tail_p(double f, double d1, double d2);

/// Approximate 5% critical value of the Dickey-Fuller tau statistic for a
/// constant-only regression, as a function of sample size (response-surface
/// expansion in 1/T).
double adf_critical_5pct_constant(std::size_t t);

/// 5% critical value of the KPSS level-stationarity statistic.
double kpss_critical_5pct_level();

}  // namespace tsr::detail
