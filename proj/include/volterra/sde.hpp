#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "volterra/drift.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

enum class NoiseMethod { cholesky, kernel };

// Gaussian Volterra noise with a factor built once; sample() is pure in (seed, stream).
class FbmNoise {
public:
    FbmNoise(HurstParam h, const TimeGrid& grid, NoiseMethod method = NoiseMethod::cholesky);
    SamplePath sample(int dim, std::uint64_t seed, std::uint64_t stream) const;
    const TimeGrid& grid() const { return grid_; }
    HurstParam hurst() const { return h_; }

private:
    HurstParam h_;
    TimeGrid grid_;
    NoiseMethod method_;
    std::shared_ptr<const FbmCholeskySampler> chol_;
    std::shared_ptr<const KernelMatrix> kmat_;
};

// X_{i+1} = X_i + b(t_i, X[0..i]) dt + (Z_{i+1} - Z_i). Only b0 of a single drift is used.
// Throws std::runtime_error naming the step if the drift is not finite.
SamplePath euler_solve(const DriftSpec& drift, const Eigen::VectorXd& x0, const SamplePath& noise);

struct ParticleConfig {
    int n = 2;
    TimeGrid grid;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    double x0 = 0.0;
    int dim = 1;
    // Noise stream per particle; empty means (replication << 32) | i. Interaction sums run
    // over particles in order of their stream id, so permuting the ids permutes the output
    // paths bit for bit.
    std::vector<std::uint64_t> streams;
};

struct Ensemble {
    std::vector<SamplePath> particles;
    std::vector<std::uint64_t> streams;
};

// Pairwise drift: b0(t, X^i) + 1/(n-1) sum_{j != i} b(t, X^i, X^j).
Ensemble simulate_particle_system(const DriftSpec& drift, const FbmNoise& noise, const ParticleConfig& cfg);

// Independent replications (parallel), replication r using ParticleConfig::replication = r.
std::vector<Ensemble> simulate_replications(const DriftSpec& drift, const FbmNoise& noise, ParticleConfig cfg,
                                            int replications);

// Joint draws of particles 1..k, one per replication.
std::vector<std::vector<SamplePath>> marginal_samples(const std::vector<Ensemble>& reps, int k);

struct McKeanVlasovConfig {
    int n_pool = 1000;
    int n_iter = 20;
    double tol = 1e-3;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    int dim = 1;
};

struct McKeanVlasovResult {
    std::vector<SamplePath> pool;
    std::vector<double> distances;  // between successive iterates
    int iterations = 0;
    bool converged = false;
};

// Picard iteration on the measure flow. Iterate 0 ignores the interaction; iterate m freezes
// the law at the empirical pool of iterate m-1. Noise is common to all iterates.
McKeanVlasovResult mckean_vlasov_proxy(const DriftSpec& drift, const FbmNoise& noise, const McKeanVlasovConfig& cfg);

// Mean over 8 checkpoint times (k T / 8) and coordinates of the 1-Wasserstein distance
// between the one-dimensional marginals.
double sliced_w1(const std::vector<SamplePath>& a, const std::vector<SamplePath>& b);

// dX^i = -(a X^i + (b/n) sum_j X^j) dt + dZ^i written as b0 plus a separable pairwise term.
DriftSpec fou_particle_drift(double a, double b, int n);
// Its mean-field limit -(a x + b E[X_t]).
DriftSpec fou_mean_field_drift(double a, double b);

}  // namespace volterra
