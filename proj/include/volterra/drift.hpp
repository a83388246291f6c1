#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace volterra {

struct SamplePath;

// Read-only view of a path up to and including grid index i. Drifts only see this,
// which is how progressive measurability is enforced.
class PathPrefix {
public:
    PathPrefix(const Eigen::MatrixXd& values, int i) : v_(&values), i_(i) {}
    int index() const { return i_; }
    int dim() const { return int(v_->cols()); }
    double now(int d = 0) const { return (*v_)(i_, d); }
    double at(int k, int d = 0) const;  // k <= index()

private:
    const Eigen::MatrixXd* v_;
    int i_;
};

// A frozen pool of sample paths standing in for a law; per-time means are precomputed.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(const std::vector<SamplePath>& pool);
    int size() const { return int(pool_->size()); }
    PathPrefix sample(int m, int i) const;
    double mean(int i, int d = 0) const { return means_(i, d); }

private:
    const std::vector<SamplePath>* pool_;
    Eigen::MatrixXd means_;
};

struct HolderModulus {
    // |b̄(s, x) - b̄(t, y)| <= C (|t - s|^gamma + |x - y|^alpha)
    double C = 0.0;
    double gamma = 1.0;
    double alpha = 1.0;
};

// Drifts write dim() values into out (overwriting).
struct DriftSpec {
    enum class Kind { single, pairwise, measure };
    using Single = std::function<void(double t, const PathPrefix& x, double* out)>;
    using Pair = std::function<void(double t, const PathPrefix& x, const PathPrefix& y, double* out)>;
    using Measure = std::function<void(double t, const PathPrefix& x, const EmpiricalMeasure& mu, double* out)>;

    Kind kind = Kind::single;
    Single b0;            // own-path part; empty means zero
    Pair b;               // pairwise interaction, averaged over the other n - 1 particles
    Measure b_measure;    // interaction with a law

    // Declares b(t, x, y) = phi(t, x) + psi(t, y); the particle system then costs O(n) per step.
    Single phi, psi;
    bool separable = false;

    std::function<double(double)> modulus;  // M_t with |b(t, x[t])| <= M_t (1 + ||x||_{∞,t})
    std::optional<HolderModulus> holder;     // for drifts b(t, x[t]) = b̄(t, x_t)

    bool zero_interaction() const;
};

// Convenience constructors for the common one-dimensional Markov case b0(t, x_t).
DriftSpec markov_drift(std::function<double(double, double)> f);
DriftSpec zero_drift();

}  // namespace volterra
