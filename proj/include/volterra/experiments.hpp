#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "volterra/chaos.hpp"
#include "volterra/kernels.hpp"
#include "volterra/mimic.hpp"
#include "volterra/tree.hpp"

// Desk-scale experiments shared by the command line tool and the acceptance tests. Each returns
// its raw numbers together with the pass/fail verdict of its threshold.
namespace volterra {

struct IsometryRow {
    int steps = 0;
    double defect = 0.0;           // max |K K^T dt - R|
    double relative_defect = 0.0;  // defect / max |R|
};
struct KernelsCheck {
    std::vector<IsometryRow> rows;  // steps, 2 steps
    double shrink = 0.0;            // defect(steps) / defect(2 steps); infinite when both vanish
    bool pass = false;              // relative defect <= 1e-2 and shrink >= 1.5
};
KernelsCheck kernels_check(HurstParam h, double T, int steps);

struct TestDrift {
    std::string name;
    std::function<double(double)> b;
};
// constant, linear t, sin(2 pi t), and a smooth fixed path standing in for a state-dependent drift.
std::vector<TestDrift> roundtrip_drifts();

struct QRoundtripRow {
    std::string drift;
    int steps = 0;
    double relative_error = 0.0;  // ||inverse_q(q_transform(b)) - b||_2 / ||b||_2
};
struct FundamentalRoundtrip {
    double exact_error = 0.0;     // max |from(to(X)) - X| with the matrix-inverse L
    double analytic_error = 0.0;  // same with analytic L, divided by ||X||_inf
    double noise_error = 0.0;     // max |to(Z) - W| / ||W||_inf with analytic L
};
struct TransformRoundtrip {
    std::vector<QRoundtripRow> rows;
    FundamentalRoundtrip fundamental;
    bool q_pass = false;            // error <= 5e-2 at `steps` and halving (ratio >= 1.6) or exact (< 1e-10)
    bool fundamental_pass = false;  // exact <= 1e-8, analytic and noise <= 5e-2
};
TransformRoundtrip transform_roundtrip(HurstParam h, double T, int steps, int paths, std::uint64_t seed);

struct OracleRow {
    int steps = 0;
    double relative_gap = 0.0;
    double condition_number = 0.0;
};
struct MimicVerify {
    std::vector<OracleRow> oracle;  // steps / 4, steps / 2, steps
    std::vector<CheckpointComparison> checkpoints;
    bool oracle_pass = false;  // gap <= 2% at `steps`, decreasing
    bool ks_pass = false;      // every checkpoint KS p-value >= 0.01
};
struct MimicSettings {
    double theta = 1.0;
    double T = 1.0;
    int steps = 256;      // oracle grid
    int mc_steps = 32;    // Monte Carlo grid (full-prefix regression)
    int train = 6000;
    int samples = 4000;
    std::uint64_t seed = 1;
    bool run_monte_carlo = true;
};
MimicVerify mimic_verify(HurstParam h, const MimicSettings& s);

struct EntropyCheck {
    EntropyEstimate estimate;
    double oracle = 0.0;      // 1/2 T (c1 - c2)^2 at h = 1/2, the grid Gaussian KL otherwise
    double continuum = 0.0;   // 1/2 (c1 - c2)^2 ∫_0^T (Q^1_s)^2 ds in closed form
    double allowance = 0.0;   // discretization allowance added to 3 s.e.
    bool pass = false;
};
EntropyCheck entropy_check(HurstParam h, double c1, double c2, double T, int steps, int samples, std::uint64_t seed);

struct ChaosRateRow {
    int n = 0, k = 0;
    double t = 0.0;
    double w2_scaled = 0.0, limit = 0.0, gaussian_entropy = 0.0, chaos_bound = 0.0;
};
struct ChaosRate {
    std::vector<ChaosRateRow> rows;
    ChaosConstants constants;
    double entropy_slope = 0.0;  // log-log slope of the entropy over the n of the rows
    bool slope_pass = false;     // in [-2.2, -1.8]
    bool dominance_pass = false; // entropy <= chaos_bound on every row
};
ChaosRate chaos_rate(const FouParams& p, int k, double t, const std::vector<int>& n_list, int steps, int samples,
                     std::uint64_t seed);

struct FouLimit {
    std::vector<FouRateRow> rows;
    double last_ratio = 0.0;
    bool monotone = false;
    bool pass = false;  // last ratio in [0.95, 1.05] and monotone
};
FouLimit fou_limit(const FouParams& p, int k, double t, const std::vector<int>& n_list);

struct HierarchyCheck {
    double max_a_excess = 0.0;    // max of A_k^l - exp(-2(l+1)(e^{-gamma t} - k/(l+1))_+^2)
    double max_sum_ratio = 0.0;   // max of sum_l l^2 B_k^l / (2 k^2 e^{2 gamma t})
    double base_case_error = 0.0; // A_k^k, B_k^k against their closed forms
    double closed_form_gap = 0.0; // recursion against the pure-birth closed forms
    bool pass = false;
};
HierarchyCheck hierarchy_check(const std::vector<int>& ks, int l_max, const std::vector<double>& ts,
                               const std::vector<double>& gammas);

struct TreeSettings {
    int kappa = 2;
    int depth = 4;
    double T = 1.0;
    int steps = 64;
    int replications = 2000;
    int train = 2000;
    double self_rate = 1.0;  // b0(x) = -self_rate x
    double coupling = 0.8;   // b(x, y) = coupling y
    std::uint64_t seed = 1;
    BoundaryPolicy boundary = BoundaryPolicy::frozen;
};
struct TreeLocal {
    std::vector<RootBallRow> gaps;       // tree (depth D) minus local equation
    std::vector<RootBallRow> allowance;  // tree depth D minus depth D-1, common noise
    AgreementReport agreement;
    GammaModel gamma;
    bool pass = false;
};
DriftSpec linear_tree_drift(double self_rate, double coupling);
TreeLocal tree_local(HurstParam h, const TreeSettings& s);

struct FbmLawCheck {
    int samples = 0;
    int checked = 0;
    int failed = 0;
    double worst_z = 0.0;  // max |C_emp - R| / s.e. over the checked pairs
    bool pass = false;
};
// Kernel-convolved paths; the entries compared are all pairs of the checkpoint times T/4 .. T.
FbmLawCheck fbm_law_check(HurstParam h, double T, int steps, int samples, std::uint64_t seed);

}  // namespace volterra
