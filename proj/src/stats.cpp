#include "volterra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volterra {

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    if (lambda < 1.18) {
        // small-lambda form converges much faster here
        const double y = std::exp(-M_PI * M_PI / (8 * lambda * lambda));
        double s = 0.0;
        for (int k = 1; k < 50; k += 2) s += std::pow(y, double(k) * k);
        return std::clamp(1.0 - std::sqrt(2 * M_PI) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2 * s, 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

MeanVar mean_var(const std::vector<double>& x) {
    MeanVar r;
    r.count = int(x.size());
    if (x.size() < 2) throw std::invalid_argument("mean_var: need at least two values");
    const double n = double(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - m) * (v - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    r.mean = m;
    r.var = m2 / (n - 1);
    r.mean_se = std::sqrt(r.var / n);
    m2 /= n;
    m4 /= n;
    r.var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return r;
}

CovEstimate covariance(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("covariance: bad sample sizes");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double c = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = (x[i] - mx) * (y[i] - my);
        c += p;
        c2 += p * p;
    }
    CovEstimate e;
    e.cov = c / (n - 1);
    const double cb = c / n;
    e.se = std::sqrt(std::max(0.0, c2 / n - cb * cb) / n);
    return e;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // integrate |F_a^{-1}(u) - F_b^{-1}(u)| over the merged breakpoints of both quantile functions
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double u = 0.0, w = 0.0;
    while (i < a.size() && j < b.size()) {
        const double ua = (i + 1) / na, ub = (j + 1) / nb;
        const double next = std::min(ua, ub);
        w += (next - u) * std::abs(a[i] - b[j]);
        u = next;
        if (ua <= next) ++i;
        if (ub <= next) ++j;
    }
    return w;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: bad sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace volterra
