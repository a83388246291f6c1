#include "volterra/mimic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"
#include "volterra/transforms.hpp"

namespace volterra {

void FeatureMap::fill(const Eigen::MatrixXd& path, int i, double* out) const {
    if (full_prefix) {
        for (int k = 1; k <= i; ++k) out[k - 1] = path(k, 0);
        return;
    }
    for (std::size_t l = 0; l < lags.size(); ++l) out[l] = path(std::max(0, i - lags[l]), 0);
}

double ConditionalDriftEstimator::predict(int i, const Eigen::MatrixXd& path) const {
    const int p = features.size(i);
    Eigen::RowVectorXd f(p);
    features.fill(path, i, f.data());
    return fits[i].predict(f);
}

ConditionalDriftEstimator fit_conditional_q(const std::vector<TrainingPair>& training, const FeatureMap& features,
                                            double penalty) {
    if (training.size() < 500) throw std::invalid_argument("fit_conditional_q: need at least 500 training pairs");
    ConditionalDriftEstimator est;
    est.grid = training.front().x.grid;
    est.features = features;
    const int n = est.grid.n, N = int(training.size());
    for (const auto& tp : training)
        if (!(tp.x.grid == est.grid) || tp.q.size() != n + 1)
            throw std::invalid_argument("fit_conditional_q: training pairs on different grids");
    est.fits.resize(n + 1);
    parallel_for(n + 1, [&](int i) {
        const int p = features.size(i);
        RowMatrix X(N, p);
        Eigen::VectorXd y(N);
        for (int r = 0; r < N; ++r) {
            features.fill(training[r].x.values, i, X.row(r).data());
            y(r) = training[r].q(i);
        }
        est.fits[i] = ridge_fit(X, y, penalty);
    });
    return est;
}

SamplePath simulate_mimicked(const ConditionalDriftEstimator& est, const KernelMatrix& kdens, double x0,
                             const SamplePath& noise) {
    if (!(est.grid == kdens.grid) || !(noise.grid == est.grid))
        throw std::invalid_argument("simulate_mimicked: grid mismatch");
    if (kdens.mode != ActionMode::density) throw std::invalid_argument("simulate_mimicked: density-action K required");
    const int n = est.grid.n;
    const double dt = est.grid.dt();
    SamplePath x(est.grid, 1, x0);
    Eigen::VectorXd qt(n + 1);
    qt(0) = est.predict(0, x.values);
    for (int i = 1; i <= n; ++i) {
        double drift = 0.0;
        for (int j = 0; j < i; ++j) drift += kdens.entries(i - 1, j) * qt(j);
        x.values(i, 0) = x0 + drift * dt + noise.values(i, 0);
        qt(i) = est.predict(i, x.values);
        if (!std::isfinite(qt(i))) {
            std::ostringstream os;
            os << "mimicked drift is not finite at step " << i;
            throw std::runtime_error(os.str());
        }
    }
    return x;
}

LinearGaussianOracle linear_gaussian_oracle(double theta, HurstParam h, const TimeGrid& grid, double x0) {
    const int n = grid.n;
    const double dt = grid.dt();
    LinearGaussianOracle o;
    Eigen::MatrixXd Cb(n, n), S = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cb(i, j) = std::min(grid.t(i + 1), grid.t(j + 1));
            if (j < i) S(i, j) = 1.0;
        }
    const Eigen::MatrixXd R = fbm_grid_covariance(h, grid);
    const Eigen::MatrixXd SC = S * Cb;
    Eigen::MatrixXd covx = theta * theta * dt * dt * SC * S.transpose() + R;

    auto w = q_weights(h, grid);
    const Eigen::MatrixXd W1 = w->W.block(1, 1, n, n);
    const Eigen::MatrixXd covqx = theta * theta * dt * W1 * SC.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covx, Eigen::EigenvaluesOnly);
    o.condition_number = es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 1e-300);
    Eigen::LLT<Eigen::MatrixXd> llt(covx);
    if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd jit = covx;
        jit.diagonal().array() += 1e-12 * covx.trace() / n;
        llt.compute(jit);
        o.jittered = true;
        if (llt.info() != Eigen::Success) {
            std::ostringstream os;
            os << "linear_gaussian_oracle: conditioning covariance is singular (condition number "
               << o.condition_number << ")";
            throw std::runtime_error(os.str());
        }
    }
    const Eigen::MatrixXd L = llt.matrixL();
    o.beta = Eigen::MatrixXd::Zero(n + 1, n);
    parallel_for(n, [&](int j) {
        // Q_{j+1} given X_1 .. X_{j+1}: leading block of the Cholesky factor
        const int m = j + 1;
        Eigen::VectorXd c = covqx.row(j).head(m).transpose();
        const auto Lm = L.topLeftCorner(m, m).triangularView<Eigen::Lower>();
        Lm.solveInPlace(c);
        Lm.transpose().solveInPlace(c);
        o.beta.row(j + 1).head(m) = c.transpose();
    });

    const KernelMatrix kd = kernel_matrix_K(h, grid, ActionMode::density);
    Eigen::MatrixXd Kp = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c + 1 <= r; ++c) Kp(r, c) = kd.entries(r, c + 1);
    const Eigen::MatrixXd A = dt * Kp * o.beta.bottomRows(n);
    const Eigen::MatrixXd IA = Eigen::MatrixXd::Identity(n, n) - A;
    const Eigen::MatrixXd M = IA.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));

    o.law_x.mean = Eigen::VectorXd::Constant(n, x0);
    o.law_x.cov = covx;
    o.law_mimicked.mean = Eigen::VectorXd::Constant(n, x0);
    o.law_mimicked.cov = M * R * M.transpose();
    o.relative_gap = (o.law_x.cov - o.law_mimicked.cov).cwiseAbs().maxCoeff() / o.law_x.cov.cwiseAbs().maxCoeff();
    return o;
}

std::vector<TrainingPair> linear_gaussian_training(double theta, HurstParam h, const TimeGrid& grid, double x0,
                                                   int count, std::uint64_t seed) {
    const KernelMatrix k = kernel_matrix_K(h, grid);
    const int n = grid.n;
    const double dt = grid.dt();
    std::vector<TrainingPair> out(count);
    parallel_for(count, [&](int p) {
        const SamplePath aux = sample_bm(grid, 1, seed, 2 * std::uint64_t(p));
        const SamplePath z = volterra_from_bm(k, sample_bm(grid, 1, seed, 2 * std::uint64_t(p) + 1));
        Eigen::VectorXd b = theta * aux.values.col(0);
        SamplePath x(grid, 1, x0);
        for (int i = 0; i < n; ++i) x.values(i + 1, 0) = x.values(i, 0) + b(i) * dt + z.values(i + 1, 0) - z.values(i, 0);
        out[p].q = q_transform(h, b, grid).q;
        out[p].x = std::move(x);
    });
    return out;
}

namespace {
CheckpointComparison compare_at(const std::vector<SamplePath>& a, const std::vector<SamplePath>& b, int idx,
                                int coord) {
    std::vector<double> va, vb;
    va.reserve(a.size());
    vb.reserve(b.size());
    for (const auto& p : a) va.push_back(p.values(idx, coord));
    for (const auto& p : b) vb.push_back(p.values(idx, coord));
    CheckpointComparison c;
    c.time = a.front().grid.t(idx);
    const auto ks = ks_two_sample(va, vb);
    c.ks_statistic = ks.statistic;
    c.ks_p_value = ks.p_value;
    const MeanVar ma = mean_var(va), mb = mean_var(vb);
    c.mean_gap = ma.mean - mb.mean;
    c.mean_gap_se = std::hypot(ma.mean_se, mb.mean_se);
    c.var_gap = ma.var - mb.var;
    c.var_gap_se = std::hypot(ma.var_se, mb.var_se);
    return c;
}
}  // namespace

std::vector<CheckpointComparison> law_distance(const std::vector<SamplePath>& a, const std::vector<SamplePath>& b,
                                               int coord) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("law_distance: need at least two paths per side");
    const TimeGrid g = a.front().grid;
    if (!(b.front().grid == g)) throw std::invalid_argument("law_distance: grid mismatch");
    std::vector<CheckpointComparison> out;
    for (int c = 1; c <= 4; ++c) out.push_back(compare_at(a, b, int(std::lround(c * g.n / 4.0)), coord));
    return out;
}

}  // namespace volterra
