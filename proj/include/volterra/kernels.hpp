#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "volterra/quadrature.hpp"

namespace volterra {

enum class Regime { sub, brownian, super };

class HurstParam {
public:
    explicit HurstParam(double h);
    double value() const { return h_; }
    Regime regime() const;
    bool brownian() const { return h_ == 0.5; }

private:
    double h_;
};

struct TimeGrid {
    double T = 1.0;
    int n = 1;

    TimeGrid() = default;
    TimeGrid(double horizon, int n_steps);
    double dt() const { return T / n; }
    double t(int i) const { return i == n ? T : i * (T / n); }
    int points() const { return n + 1; }
    bool operator==(const TimeGrid& o) const { return T == o.T && n == o.n; }
};

double fbm_covariance(HurstParam h, double t, double s);

// c_H; throws for h = 1/2.
double normalizing_constant_cH(HurstParam h);

// K(t, s) for 0 < s < t. Exactly 1 at h = 1/2.
double kernel_K(HurstParam h, double t, double s);

// The inverse kernel exactly as displayed, without a normalizing constant.
double kernel_L_displayed(HurstParam h, double t, double s);

// Constant that turns kernel_L_displayed into the true inverse of K.
double l_normalization(HurstParam h);

// lambda_H * kernel_L_displayed; exactly 1 at h = 1/2.
double kernel_L(HurstParam h, double t, double s);

enum class ActionMode { density, increment };

// Treatment of the cell [0, t_1], where the fBm kernels blow up like s^{-|H-1/2|}.
// rms stores sign(avg) * sqrt((1/dt) ∫_cell k^2), which keeps the variance carried by the
// first increment exact; automatic picks rms for increment action and average otherwise.
// The left-point value is not an option: K(t, 0) is infinite.
enum class OriginCell { automatic, average, rms };

// Row r holds the kernel seen from t_{r+1}; column j is the cell [s_j, s_{j+1}].
// Entries are cell averages (1/dt) ∫_cell k(t_{r+1}, s) ds, so the support is j <= r.
// density:   (Kf)(t_i) ≈ sum_j entries(i-1, j) f_j dt
// increment: (K dX)(t_i) ≈ sum_j entries(i-1, j) (X_{j+1} - X_j)
struct KernelMatrix {
    TimeGrid grid;
    Eigen::MatrixXd entries;
    ActionMode mode = ActionMode::increment;
    std::vector<std::pair<int, int>> failed_cells;  // (row, column) where quadrature did not converge

    // values at t_0..t_n of x0 + sum_j entries(i-1, j) dX_j
    Eigen::VectorXd apply_increments(const Eigen::VectorXd& dx, double x0 = 0.0) const;
};

struct KernelSingularity {
    double at_origin = 0.0;    // exponent of s near 0
    double at_diagonal = 0.0;  // exponent of (t - s) near s = t
};

// Per-cell adaptive quadrature of a user kernel.
KernelMatrix discretize_kernel(const std::function<double(double, double)>& kernel, const TimeGrid& grid,
                               ActionMode mode, KernelSingularity sing = {}, const QuadOptions& opt = {},
                               OriginCell origin = OriginCell::average);

// Fast fBm discretizations. They use the scaling K(ct, cs) = c^{H-1/2} K(t, s) so
// that every cell integral is a difference of one cumulative integral over [0, 1].
KernelMatrix kernel_matrix_K(HurstParam h, const TimeGrid& grid, ActionMode mode = ActionMode::increment,
                             OriginCell origin = OriginCell::automatic);
KernelMatrix kernel_matrix_L(HurstParam h, const TimeGrid& grid, ActionMode mode = ActionMode::increment);

// Nodal product-integration weights: (∫_0^{t_i} K(t_i, s) q_s ds) = sum_j P(i, j) q_j for a grid
// function q read as q(s) = s^{1/2-H} r(s), with r = q_j t_j^{H-1/2} linear between nodes on
// [t_1, T] and constant on [0, t_1]. Column 0 is identically zero.
Eigen::MatrixXd kernel_K_nodal_weights(HurstParam h, const TimeGrid& grid);

double verify_isometry(const KernelMatrix& kmat, HurstParam h);

// C A^{-1} C with C the cumulative-sum matrix: maps increments of Z back to the values
// of the driving Brownian motion. Throws std::runtime_error naming the failing pivot.
KernelMatrix discrete_inverse_L(const KernelMatrix& kmat);

}  // namespace volterra
