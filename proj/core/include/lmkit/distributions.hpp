#pragma once

namespace lmkit {

// Regularized incomplete beta function I_x(a, b), evaluated with the
// continued-fraction expansion (modified Lentz), switching to the
// symmetric form for x past the central region.
double regularized_incomplete_beta(double a, double b, double x);

// Student-t distribution with df degrees of freedom.
double student_t_cdf(double t, double df);
// P(|T| >= |t|), computed directly through the incomplete beta so tiny
// tail probabilities keep full precision.
double student_t_two_sided_p(double t, double df);
// Inverse CDF via bracketed bisection on student_t_cdf, to 1e-10.
double t_quantile(double p, double df);

// F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
// Upper tail P(F >= x), full precision in the far tail.
double f_sf(double x, double d1, double d2);

// Standard normal inverse CDF (used for Q-Q plot positions).
double normal_quantile(double p);

}  // namespace lmkit
