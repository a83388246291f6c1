#pragma once

#include <cstdint>
#include <vector>

#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"
#include "volterra/regression.hpp"

namespace volterra {

// Features of X[t_i] for the regression at time index i (one-dimensional paths).
struct FeatureMap {
    bool full_prefix = false;     // X_1 .. X_i (X_0 is the deterministic start)
    std::vector<int> lags{0, 1, 2, 4, 8};  // X_{i - l}, clipped at index 0

    int size(int i) const { return full_prefix ? i : int(lags.size()); }
    void fill(const Eigen::MatrixXd& path, int i, double* out) const;
};

struct ConditionalDriftEstimator {
    TimeGrid grid;
    FeatureMap features;
    std::vector<RidgeFit> fits;  // one per time index 0..n

    double predict(int i, const Eigen::MatrixXd& path) const;
};

struct TrainingPair {
    Eigen::VectorXd q;  // Q^b along the path, n + 1 values
    SamplePath x;
};

// Ridge regression of Q^b_{t_i} on features of X[t_i], separately for every i.
ConditionalDriftEstimator fit_conditional_q(const std::vector<TrainingPair>& training, const FeatureMap& features,
                                            double penalty = 1e-8);

// X̂_{t_i} = x0 + sum_{j<i} kdens(i-1, j) Q̃(t_j, X̂[t_j]) dt + Ẑ_{t_i} for a density-action K matrix.
SamplePath simulate_mimicked(const ConditionalDriftEstimator& est, const KernelMatrix& kdens, double x0,
                             const SamplePath& noise);

// The model X_t = x0 + theta ∫_0^t B̃_s ds + Z_t, discretized exactly as the simulations do.
struct LinearGaussianOracle {
    GaussianLaw law_x;          // X_{t_1..t_n}
    GaussianLaw law_mimicked;   // X̂_{t_1..t_n}
    Eigen::MatrixXd beta;       // row i: E[Q_i | X_1..X_i] = beta(i, 0..i-1) . (X - x0)
    double relative_gap = 0.0;  // max |cov_x - cov_mimicked| / max |cov_x|
    double condition_number = 0.0;
    bool jittered = false;
};
LinearGaussianOracle linear_gaussian_oracle(double theta, HurstParam h, const TimeGrid& grid, double x0 = 0.0);

// Training pairs from the model above: B̃, noise and X from independent streams of seed.
std::vector<TrainingPair> linear_gaussian_training(double theta, HurstParam h, const TimeGrid& grid, double x0,
                                                   int count, std::uint64_t seed);

struct CheckpointComparison {
    double time = 0.0;
    double ks_statistic = 0.0, ks_p_value = 1.0;
    double mean_gap = 0.0, mean_gap_se = 0.0;
    double var_gap = 0.0, var_gap_se = 0.0;
};

// Marginal comparison of two path samples of coordinate coord at T/4, T/2, 3T/4, T.
std::vector<CheckpointComparison> law_distance(const std::vector<SamplePath>& a, const std::vector<SamplePath>& b,
                                               int coord = 0);

}  // namespace volterra
