#pragma once

namespace regbench::numeric {

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x).
// Series and continued-fraction routes are both exposed so results can be
// cross-checked; the dispatching P/Q pick the route by the usual x < a+1 rule.
double gamma_p_series(double a, double x);
double gamma_q_contfrac(double a, double x);
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

// Upper tails.
double chi_squared_sf(double x, double df);
double f_sf(double f, double df1, double df2);
double normal_sf(double z);

}  // namespace regbench::numeric
