#pragma once

#include <functional>
#include <vector>

namespace volterra {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Asymptotic Kolmogorov distribution Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double normal_cdf(double x);

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // unbiased
    double mean_se = 0.0;
    double var_se = 0.0;  // from the fourth central moment
    int count = 0;
};
MeanVar mean_var(const std::vector<double>& x);

// Sample covariance of paired data with the standard error of the estimate.
struct CovEstimate {
    double cov = 0.0;
    double se = 0.0;
};
CovEstimate covariance(const std::vector<double>& x, const std::vector<double>& y);

// Exact 1-Wasserstein distance between two equal-weight empirical measures on the line.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace volterra
