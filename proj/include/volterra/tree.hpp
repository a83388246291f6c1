#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volterra/drift.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"
#include "volterra/regression.hpp"
#include "volterra/sde.hpp"

namespace volterra {

enum class BoundaryPolicy { frozen, free };

// Ball of radius `depth` around the root of the kappa-regular tree, vertices in breadth-first
// order: the root is 0 and its children are 1..kappa, so the root ball is 0..kappa.
struct TruncatedTree {
    int kappa = 2;
    int depth = 2;
    BoundaryPolicy boundary = BoundaryPolicy::frozen;
    std::vector<int> parent;  // -1 for the root
    std::vector<int> level;
    std::vector<std::vector<int>> neighbors;  // ascending vertex order

    static TruncatedTree build(int kappa, int depth, BoundaryPolicy boundary = BoundaryPolicy::frozen);
    int size() const { return int(parent.size()); }
    bool on_boundary(int v) const { return level[v] == depth; }
};

// The vertex drift is b0(t, X^u) + 1/kappa sum_{v in N_u} b(t, X^u, X^v), using DriftSpec::b0
// and DriftSpec::b. Frozen boundary vertices keep b0 only; free ones average over the
// neighbours they have.
using TreeSample = std::vector<SamplePath>;  // one path per vertex (or per local coordinate)

// Synchronous Euler stepping; vertex v draws noise stream (replication << 32) | v.
TreeSample simulate_tree(const TruncatedTree& tree, const DriftSpec& drift, const FbmNoise& noise,
                         std::uint64_t seed, std::uint64_t replication, double x0 = 0.0);
std::vector<TreeSample> simulate_tree_replications(const TruncatedTree& tree, const DriftSpec& drift,
                                                   const FbmNoise& noise, std::uint64_t seed, int replications,
                                                   double x0 = 0.0);

// Interaction part of the root drift along a sample: 1/kappa sum_{v in N_root} b(t_i, X^root, X^v).
Eigen::VectorXd root_interaction(const TruncatedTree& tree, const DriftSpec& drift, const TreeSample& s);

struct GammaConfig {
    std::vector<int> lags{0, 1, 2};  // X_{i-l} of both paths, clipped at 0
    bool full_prefix = false;        // all of X_1..X_i of both paths instead
    double penalty = 1e-8;
};

// gamma(t_i, x[t_i], y[t_i]): x is the vertex whose interaction drift is being replaced, y the
// neighbour it is conditioned on (root and child when fitting, neighbour and centre when used).
struct GammaModel {
    TimeGrid grid;
    GammaConfig config;
    KernelMatrix kdens;  // density-action K for the Volterra stepping
    std::vector<RidgeFit> fits;  // per time index 0..n
    std::vector<double> tower_gap;     // mean prediction minus mean target, per time index
    std::vector<double> target_var;    // Var of the regression targets
    std::vector<double> fitted_var;    // Var of the predictions on the training set

    int feature_count(int i) const;
    void features(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int i, double* out) const;
    double operator()(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
};

// Ridge regression per time index of the root's Q-transformed interaction drift on features of
// (X^root, X^child); every child of the root contributes one row per replication.
GammaModel estimate_gamma(const std::vector<TreeSample>& samples, const TruncatedTree& tree, const DriftSpec& drift,
                          HurstParam h, const TimeGrid& grid, const GammaConfig& config = {});

struct LocalConfig {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    double x0 = 0.0;
    // Noise stream per coordinate (centre first); empty means (replication << 32) | c with an
    // offset of 1 << 31 to keep them apart from tree streams. The centre's interaction sum runs
    // in stream order, so permuting neighbour ids permutes neighbour paths exactly.
    std::vector<std::uint64_t> streams;
};

// Coordinate 0 is the centre, driven by the true drift over its kappa neighbours; coordinates
// 1..kappa carry b0 plus the K-convolved gamma(s, X^j, X^0), stepped as in simulate_mimicked.
TreeSample simulate_local_equation(const GammaModel& gamma, const DriftSpec& drift, int kappa,
                                   const FbmNoise& noise, const LocalConfig& cfg);
std::vector<TreeSample> simulate_local_replications(const GammaModel& gamma, const DriftSpec& drift, int kappa,
                                                    const FbmNoise& noise, std::uint64_t seed, int replications,
                                                    double x0 = 0.0);

struct RootBallRow {
    double time = 0.0;
    int coordinate = 0;      // 0 centre, 1..kappa neighbours
    std::string statistic;   // mean_gap, var_gap, cross_cov_gap, ks
    double value = 0.0;
    double std_error = 0.0;  // for ks: the p-value
};

// Gaps (first minus second) on the root ball at T/2 and T. Tree samples contribute vertices
// 0..kappa; local samples all of their kappa + 1 coordinates.
std::vector<RootBallRow> compare_root_ball(const std::vector<TreeSample>& a, const std::vector<TreeSample>& b,
                                           int kappa);

struct AgreementReport {
    int checked = 0;
    int failed = 0;
    double worst_ratio = 0.0;  // max |gap| / (3 se + allowance)
};

// Every non-KS gap within 3 s.e. plus the matching |gap| of `allowance` (same layout, e.g. the
// comparison of depth D and D-1 trees); an empty allowance means zero.
AgreementReport root_ball_agreement(const std::vector<RootBallRow>& gaps, const std::vector<RootBallRow>& allowance);

}  // namespace volterra
