#pragma once

#include <functional>
#include <vector>

namespace volterra {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int evaluations = 0;
};

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with n points, 1 <= n <= 64. Rules are built once and cached.
const GaussRule& gauss_legendre(int n);

// Fixed-order rule on [a, b]; no error control.
template <class F>
double gauss_fixed(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += r.w[k] * f(c + h * r.x[k]);
    return s * h;
}

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int order = 10;
    int max_intervals = 2000;
};

// Globally adaptive bisection: each panel is compared against its two halves.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// f(x, x - a, b - x) behaving like (x-a)^alpha near a and (b-x)^beta near b.
// Each half is mapped by x = a + h u^p with p = 1/(1+alpha) when alpha < 0, which
// removes the endpoint singularity; the distances are passed exactly so that the
// integrand never has to form small differences itself.
QuadResult integrate_singular(const std::function<double(double, double, double)>& f,
                              double a, double b, double alpha, double beta,
                              const QuadOptions& opt = {});

}  // namespace volterra
