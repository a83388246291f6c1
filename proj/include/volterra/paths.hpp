#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "volterra/kernels.hpp"

namespace volterra {

// One independent generator per (seed, stream, substream) triple.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0);

struct SamplePath {
    TimeGrid grid;
    Eigen::MatrixXd values;  // (n + 1) x dim

    SamplePath() = default;
    SamplePath(const TimeGrid& g, int dim, double x0 = 0.0);
    int dim() const { return int(values.cols()); }
    Eigen::VectorXd coord(int d = 0) const { return values.col(d); }
    Eigen::VectorXd increments(int d = 0) const;
};

struct GaussianLaw {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int size() const { return int(mean.size()); }
    // Throws if cov is not symmetric or has an eigenvalue below -1e-10 * trace.
    void validate() const;
};

SamplePath sample_bm(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t stream = 0);

// Z_{t_i} = sum_{j<i} K(t_i, cell j) dW_j with the increment-action matrix.
SamplePath volterra_from_bm(const KernelMatrix& kmat, const SamplePath& bm);

// R(t_i, t_j) for i, j = 1..n.
Eigen::MatrixXd fbm_grid_covariance(HurstParam h, const TimeGrid& grid);

// Exact-in-law fBm on the grid from the Cholesky factor of R. The factor is built once.
class FbmCholeskySampler {
public:
    FbmCholeskySampler(HurstParam h, const TimeGrid& grid);
    SamplePath sample(int dim, std::uint64_t seed, std::uint64_t stream = 0) const;
    bool jittered() const { return jittered_; }

private:
    TimeGrid grid_;
    Eigen::MatrixXd chol_;
    bool jittered_ = false;
};

SamplePath sample_fbm_cholesky(HurstParam h, const TimeGrid& grid, int dim, std::uint64_t seed,
                               std::uint64_t stream = 0);

// (∫_0^{up_to} |q_s|^2 ds)^{1/2} for a grid function q (size n + 1), read the same way as in
// kernel_K_nodal_weights: q(s) = s^{1/2-H} r(s) with r linear, constant on the first cell.
// q_0 is not used.
double rkhs_norm(HurstParam h, const TimeGrid& grid, const Eigen::VectorXd& q, double up_to);

// Sample mean and unbiased covariance of one coordinate over the grid points t_0..t_n.
GaussianLaw empirical_covariance(const std::vector<SamplePath>& paths, int coord = 0);

// Standard errors of the entries of empirical_covariance (delta-method, from fourth moments).
Eigen::MatrixXd covariance_standard_errors(const std::vector<SamplePath>& paths, int coord = 0);

}  // namespace volterra
