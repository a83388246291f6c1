#include "volterra/special.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <stdexcept>

namespace volterra::special {

double beta(double a, double b) { return boost::math::beta(a, b); }

double upper_beta(double a, double b, double x) {
    if (x <= 0.0) return boost::math::beta(a, b);
    if (x >= 1.0) return 0.0;
    return boost::math::betac(a, b, x);
}

double upper_beta_neg_a(double a, double b, double x, double omx) {
    // ∫_x^1 v^{a-1}(1-v)^{b-1} = -x^a (1-x)^b / a + (a+b)/a ∫_x^1 v^a (1-v)^{b-1}
    return -std::pow(x, a) * std::pow(omx, b) / a + (a + b) / a * upper_beta(a + 1.0, b, x);
}

double log_beta_tail(double b, double x, double omx) {
    if (!(x > 0.0) || !(omx > 0.0)) throw std::domain_error("log_beta_tail: x outside (0,1)");
    // split v^{-1}(1-v)^{b-1} = (1-v)^{b-1} + (1-v)^b / v
    double f;
    if (x > 0.5) {
        // ∫_0^{1-x} w^b / (1-w) dw as a geometric series in w
        f = 0.0;
        double p = std::pow(omx, b + 1.0);
        for (int m = 0; m < 200; ++m) {
            double term = p / (b + m + 1.0);
            f += term;
            if (term < 1e-17 * f) break;
            p *= omx;
        }
    } else {
        // -ln x - (psi(b+1) + gamma_E) - sum_k binom(b,k)(-1)^k x^k / k
        double s = 0.0, c = 1.0, xp = 1.0;
        for (int k = 1; k < 200; ++k) {
            c *= (k - 1.0 - b) / k;  // binom(b,k)(-1)^k
            xp *= x;
            double term = c * xp / k;
            s += term;
            if (std::abs(term) < 1e-17 * std::abs(s)) break;
        }
        f = -std::log(x) - boost::math::digamma(b + 1.0) - boost::math::constants::euler<double>() - s;
    }
    return std::pow(omx, b) / b + f;
}

double lower_beta(double a, double b, double x, double omx) {
    if (x <= 0.0) return 0.0;
    if (b > 0.0) return boost::math::beta(a, b, x);
    return ((a + b) * boost::math::beta(a, b + 1.0, x) - std::pow(x, a) * std::pow(omx, b)) / b;
}

}  // namespace volterra::special
