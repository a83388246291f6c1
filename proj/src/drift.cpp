#include "volterra/drift.hpp"

#include <stdexcept>

#include "volterra/paths.hpp"

namespace volterra {

double PathPrefix::at(int k, int d) const {
    if (k > i_ || k < 0) throw std::out_of_range("PathPrefix: index beyond the visible prefix");
    return (*v_)(k, d);
}

EmpiricalMeasure::EmpiricalMeasure(const std::vector<SamplePath>& pool) : pool_(&pool) {
    if (pool.empty()) throw std::invalid_argument("EmpiricalMeasure: empty pool");
    means_ = Eigen::MatrixXd::Zero(pool.front().values.rows(), pool.front().values.cols());
    for (const auto& p : pool) means_ += p.values;
    means_ /= double(pool.size());
}

PathPrefix EmpiricalMeasure::sample(int m, int i) const { return PathPrefix((*pool_)[m].values, i); }

bool DriftSpec::zero_interaction() const {
    switch (kind) {
        case Kind::single: return true;
        case Kind::pairwise: return separable ? (!phi && !psi) : !b;
        case Kind::measure: return !b_measure;
    }
    return true;
}

DriftSpec markov_drift(std::function<double(double, double)> f) {
    DriftSpec d;
    d.b0 = [f = std::move(f)](double t, const PathPrefix& x, double* out) { out[0] = f(t, x.now()); };
    return d;
}

DriftSpec zero_drift() { return DriftSpec{}; }

}  // namespace volterra
