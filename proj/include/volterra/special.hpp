#pragma once

// Closed-form building blocks for the fBm kernels. The power integrals
// ∫_x^1 v^{a-1} (1-v)^{b-1} dv that appear after the substitution r = s/v
// reduce to incomplete Beta functions or, when a = 0, to the series below.

namespace volterra::special {

double beta(double a, double b);

// ∫_x^1 v^{a-1}(1-v)^{b-1} dv for a > 0, b > 0.
double upper_beta(double a, double b, double x);

// Same integral for -1 < a < 0, b > 0 (after one integration by parts).
double upper_beta_neg_a(double a, double b, double x, double omx);

// ∫_x^1 v^{-1}(1-v)^{b-1} dv for 0 < b, 0 < x < 1. omx = 1 - x supplied exactly.
double log_beta_tail(double b, double x, double omx);

// ∫_0^x u^{a-1}(1-u)^{b-1} du for a > 0 and any b > -1 with b != 0, x < 1.
// Negative b is handled by B_x(a,b) = [(a+b) B_x(a,b+1) - x^a (1-x)^b] / b.
double lower_beta(double a, double b, double x, double omx);

}  // namespace volterra::special
