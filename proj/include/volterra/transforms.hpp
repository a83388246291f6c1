#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "volterra/drift.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// Linear map b -> Q^b on grid functions, b interpolated linearly between nodes.
// q = W b. For h > 1/2 the same map is also kept in the increment form
//   q_i = boundary_i b_i + sum_{j<i} V(i, j) (b_i - b_j),   V >= 0,
// which is what the growth bound is built from. q_0 is set to 0 in both regimes; for
// h > 1/2 the true value is infinite and nothing downstream reads it.
struct QWeights {
    TimeGrid grid;
    double hurst = 0.5;
    Eigen::MatrixXd W;
    Eigen::VectorXd boundary;
    Eigen::MatrixXd V;
};

// Built once per (h, grid) and shared.
std::shared_ptr<const QWeights> q_weights(HurstParam h, const TimeGrid& grid);

struct HolderCheck {
    double exponent = -1.0;  // negative: use (h - 1/2) + 0.1
    double bound = 1e3;
};

struct QResult {
    Eigen::VectorXd q;
    double holder_quotient = 0.0;  // max |b_i - b_j| / |t_i - t_j|^exponent, h > 1/2 only
    bool conditioning_warning = false;
};

QResult q_transform(HurstParam h, const Eigen::VectorXd& b, const TimeGrid& grid, const HolderCheck& check = {});

// Q^1 in closed form, for b identically one.
double q_of_constant(HurstParam h, double t);

// The split of Q^b for b(s, x[s]) = bbar(s, x_s), h > 1/2, along one path:
//   boundary     bbar(t, x_t) t^{1/2-H}
//   regularity   the remaining multiple of bbar(t, x_t) t^{1/2-H}
//   time_reg     ∫ (bbar(t, x_t) - bbar(s, x_t)) ...
//   space_reg    ∫ (bbar(s, x_t) - bbar(s, x_s)) ...
// all already multiplied by the normalizing constant, so total = their sum.
struct MarkovQTerms {
    Eigen::VectorXd boundary, regularity, time_reg, space_reg, total;
};
MarkovQTerms q_transform_markov(HurstParam h, const std::function<double(double, double)>& bbar,
                                const Eigen::VectorXd& path, const TimeGrid& grid);

// b_i = d/dt ∫_0^t K(t, s) q_s ds at t_i: centered differences inside, second-order
// one-sided at both ends.
Eigen::VectorXd inverse_q(HurstParam h, const Eigen::VectorXd& q, const TimeGrid& grid);

// X†_{t_i} = X_0 + sum_j lmat(i-1, j) dX_j, per coordinate.
SamplePath to_fundamental(const KernelMatrix& lmat, const SamplePath& x);
// X_{t_i} = X†_0 + sum_j kmat(i-1, j) dX†_j.
SamplePath from_fundamental(const KernelMatrix& kmat, const SamplePath& x_dagger);

struct GrowthReport {
    int paths = 0;
    int points = 0;
    int violations = 0;
    double min_relative_slack = 1.0;   // min over points of (bound - |Q|) / bound
    double mean_relative_slack = 0.0;
    double max_abs_q = 0.0;
    double path_holder_exponent = 0.0;  // used for h > 1/2
};

// Checks |Q^b(t, X[t])| <= bound_t(X) along each path. The drift must carry a modulus; for
// h > 1/2 it must be Markov and carry a Hölder modulus as well.
GrowthReport q_growth_check(HurstParam h, const DriftSpec& drift, const std::vector<SamplePath>& paths);

}  // namespace volterra
