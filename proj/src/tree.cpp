#include "volterra/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"
#include "volterra/transforms.hpp"

namespace volterra {

TruncatedTree TruncatedTree::build(int kappa, int depth, BoundaryPolicy boundary) {
    if (kappa < 2) throw std::invalid_argument("tree: kappa must be at least 2");
    if (depth < 2) throw std::invalid_argument("tree: depth must be at least 2");
    TruncatedTree t;
    t.kappa = kappa;
    t.depth = depth;
    t.boundary = boundary;
    t.parent.push_back(-1);
    t.level.push_back(0);
    std::size_t head = 0;
    while (head < t.parent.size()) {
        const int v = int(head++);
        if (t.level[v] == depth) continue;
        const int kids = v == 0 ? kappa : kappa - 1;
        for (int c = 0; c < kids; ++c) {
            t.parent.push_back(v);
            t.level.push_back(t.level[v] + 1);
        }
    }
    t.neighbors.assign(t.parent.size(), {});
    for (int v = 1; v < t.size(); ++v) {
        t.neighbors[v].push_back(t.parent[v]);
        t.neighbors[t.parent[v]].push_back(v);
    }
    for (auto& nb : t.neighbors) std::sort(nb.begin(), nb.end());
    return t;
}

namespace {

void require_tree_drift(const DriftSpec& drift) {
    if (drift.kind != DriftSpec::Kind::pairwise || !drift.b)
        throw std::invalid_argument("tree drift must be pairwise with b set");
}

[[noreturn]] void non_finite(const char* what, int step) {
    std::ostringstream os;
    os << what << " drift is not finite at step " << step;
    throw std::runtime_error(os.str());
}

}  // namespace

TreeSample simulate_tree(const TruncatedTree& tree, const DriftSpec& drift, const FbmNoise& noise,
                         std::uint64_t seed, std::uint64_t replication, double x0) {
    require_tree_drift(drift);
    const TimeGrid& grid = noise.grid();
    const int V = tree.size(), n = grid.n;
    const double dt = grid.dt();
    std::vector<SamplePath> z(V);
    for (int v = 0; v < V; ++v) z[v] = noise.sample(1, seed, (replication << 32) | std::uint64_t(v));
    TreeSample x(V, SamplePath(grid, 1, x0));
    std::vector<double> drifts(V);
    for (int k = 0; k < n; ++k) {
        const double t = grid.t(k);
        for (int u = 0; u < V; ++u) {
            const PathPrefix xu(x[u].values, k);
            double acc = 0.0, tmp = 0.0;
            if (drift.b0) drift.b0(t, xu, &acc);
            const bool frozen = tree.on_boundary(u) && tree.boundary == BoundaryPolicy::frozen;
            if (!frozen) {
                double inter = 0.0;
                for (int v : tree.neighbors[u]) {
                    drift.b(t, xu, PathPrefix(x[v].values, k), &tmp);
                    inter += tmp;
                }
                const int denom = tree.on_boundary(u) ? int(tree.neighbors[u].size()) : tree.kappa;
                acc += inter / denom;
            }
            if (!std::isfinite(acc)) non_finite("tree", k);
            drifts[u] = acc;
        }
        for (int u = 0; u < V; ++u)
            x[u].values(k + 1, 0) = x[u].values(k, 0) + drifts[u] * dt + z[u].values(k + 1, 0) - z[u].values(k, 0);
    }
    return x;
}

std::vector<TreeSample> simulate_tree_replications(const TruncatedTree& tree, const DriftSpec& drift,
                                                   const FbmNoise& noise, std::uint64_t seed, int replications,
                                                   double x0) {
    std::vector<TreeSample> out(replications);
    parallel_for(replications,
                 [&](int r) { out[r] = simulate_tree(tree, drift, noise, seed, std::uint64_t(r), x0); });
    return out;
}

Eigen::VectorXd root_interaction(const TruncatedTree& tree, const DriftSpec& drift, const TreeSample& s) {
    require_tree_drift(drift);
    const TimeGrid& grid = s.front().grid;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(grid.n + 1);
    double tmp = 0.0;
    for (int i = 0; i <= grid.n; ++i) {
        const PathPrefix xr(s[0].values, i);
        for (int v : tree.neighbors[0]) {
            drift.b(grid.t(i), xr, PathPrefix(s[v].values, i), &tmp);
            g(i) += tmp;
        }
        g(i) /= tree.kappa;
    }
    return g;
}

int GammaModel::feature_count(int i) const {
    return config.full_prefix ? 2 * i : 2 * int(config.lags.size());
}

void GammaModel::features(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int i, double* out) const {
    if (config.full_prefix) {
        for (int k = 1; k <= i; ++k) {
            out[k - 1] = x(k, 0);
            out[i + k - 1] = y(k, 0);
        }
        return;
    }
    const int L = int(config.lags.size());
    for (int l = 0; l < L; ++l) {
        const int k = std::max(0, i - config.lags[l]);
        out[l] = x(k, 0);
        out[L + l] = y(k, 0);
    }
}

double GammaModel::operator()(int i, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
    Eigen::RowVectorXd f(feature_count(i));
    features(x, y, i, f.data());
    return fits[i].predict(f);
}

GammaModel estimate_gamma(const std::vector<TreeSample>& samples, const TruncatedTree& tree, const DriftSpec& drift,
                          HurstParam h, const TimeGrid& grid, const GammaConfig& config) {
    if (samples.size() < 1000) throw std::invalid_argument("estimate_gamma: need at least 1000 replications");
    for (const auto& s : samples)
        if (int(s.size()) != tree.size() || !(s.front().grid == grid))
            throw std::invalid_argument("estimate_gamma: samples do not match the tree or grid");
    GammaModel m;
    m.grid = grid;
    m.config = config;
    m.kdens = kernel_matrix_K(h, grid, ActionMode::density);
    const int R = int(samples.size()), n = grid.n, kappa = tree.kappa;
    std::vector<Eigen::VectorXd> q(R);
    parallel_for(R, [&](int r) { q[r] = q_transform(h, root_interaction(tree, drift, samples[r]), grid).q; });

    m.fits.resize(n + 1);
    m.tower_gap.assign(n + 1, 0.0);
    m.target_var.assign(n + 1, 0.0);
    m.fitted_var.assign(n + 1, 0.0);
    const int rows = R * kappa;
    parallel_for(n + 1, [&](int i) {
        const int p = m.feature_count(i);
        RowMatrix X(rows, p);
        Eigen::VectorXd y(rows);
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < kappa; ++c) {
                const int row = r * kappa + c;
                m.features(samples[r][0].values, samples[r][1 + c].values, i, X.row(row).data());
                y(row) = q[r](i);
            }
        m.fits[i] = ridge_fit(X, y, config.penalty);
        Eigen::VectorXd fitted(rows);
        for (int row = 0; row < rows; ++row) fitted(row) = m.fits[i].predict(X.row(row));
        m.tower_gap[i] = fitted.mean() - y.mean();
        m.target_var[i] = (y.array() - y.mean()).square().sum() / std::max(rows - 1, 1);
        m.fitted_var[i] = (fitted.array() - fitted.mean()).square().sum() / std::max(rows - 1, 1);
    });
    return m;
}

TreeSample simulate_local_equation(const GammaModel& gamma, const DriftSpec& drift, int kappa,
                                   const FbmNoise& noise, const LocalConfig& cfg) {
    require_tree_drift(drift);
    const TimeGrid& grid = noise.grid();
    if (!(gamma.grid == grid)) throw std::invalid_argument("simulate_local_equation: gamma fitted on another grid");
    const int C = kappa + 1, n = grid.n;
    const double dt = grid.dt();
    std::vector<std::uint64_t> streams = cfg.streams;
    if (streams.empty())
        for (int c = 0; c < C; ++c) streams.push_back((cfg.replication << 32) | (std::uint64_t(1) << 31) | std::uint64_t(c));
    if (int(streams.size()) != C) throw std::invalid_argument("simulate_local_equation: one stream per coordinate");
    std::vector<int> order(kappa);
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return streams[a] < streams[b]; });

    std::vector<SamplePath> z(C);
    for (int c = 0; c < C; ++c) z[c] = noise.sample(1, cfg.seed, streams[c]);
    TreeSample x(C, SamplePath(grid, 1, cfg.x0));
    Eigen::MatrixXd g(n + 1, C);          // gamma values of the neighbours
    Eigen::VectorXd own = Eigen::VectorXd::Zero(C);  // accumulated b0 dt of the neighbours
    for (int j = 1; j < C; ++j) g(0, j) = gamma(0, x[j].values, x[0].values);
    for (int k = 0; k < n; ++k) {
        const double t = grid.t(k);
        double tmp = 0.0, centre = 0.0, inter = 0.0;
        const PathPrefix x0p(x[0].values, k);
        if (drift.b0) drift.b0(t, x0p, &centre);
        for (int j : order) {
            drift.b(t, x0p, PathPrefix(x[j].values, k), &tmp);
            inter += tmp;
        }
        centre += inter / kappa;
        if (!std::isfinite(centre)) non_finite("local equation centre", k);
        for (int j = 1; j < C; ++j) {
            tmp = 0.0;
            if (drift.b0) drift.b0(t, PathPrefix(x[j].values, k), &tmp);
            if (!std::isfinite(tmp)) non_finite("local equation", k);
            own(j) += tmp * dt;
        }
        x[0].values(k + 1, 0) = x[0].values(k, 0) + centre * dt + z[0].values(k + 1, 0) - z[0].values(k, 0);
        for (int j = 1; j < C; ++j) {
            double conv = 0.0;
            for (int m = 0; m <= k; ++m) conv += gamma.kdens.entries(k, m) * g(m, j);
            x[j].values(k + 1, 0) = cfg.x0 + own(j) + conv * dt + z[j].values(k + 1, 0);
        }
        for (int j = 1; j < C; ++j) {
            g(k + 1, j) = gamma(k + 1, x[j].values, x[0].values);
            if (!std::isfinite(g(k + 1, j))) non_finite("local equation gamma", k + 1);
        }
    }
    return x;
}

std::vector<TreeSample> simulate_local_replications(const GammaModel& gamma, const DriftSpec& drift, int kappa,
                                                    const FbmNoise& noise, std::uint64_t seed, int replications,
                                                    double x0) {
    std::vector<TreeSample> out(replications);
    parallel_for(replications, [&](int r) {
        LocalConfig cfg;
        cfg.seed = seed;
        cfg.replication = std::uint64_t(r);
        cfg.x0 = x0;
        out[r] = simulate_local_equation(gamma, drift, kappa, noise, cfg);
    });
    return out;
}

std::vector<RootBallRow> compare_root_ball(const std::vector<TreeSample>& a, const std::vector<TreeSample>& b,
                                           int kappa) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("compare_root_ball: need at least two samples each");
    for (const auto* side : {&a, &b})
        for (const auto& s : *side)
            if (int(s.size()) < kappa + 1) throw std::invalid_argument("compare_root_ball: sample smaller than root ball");
    const TimeGrid grid = a.front().front().grid;
    if (!(b.front().front().grid == grid)) throw std::invalid_argument("compare_root_ball: grid mismatch");
    auto column = [](const std::vector<TreeSample>& s, int c, int idx) {
        std::vector<double> v;
        v.reserve(s.size());
        for (const auto& x : s) v.push_back(x[c].values(idx, 0));
        return v;
    };
    std::vector<RootBallRow> rows;
    for (int idx : {grid.n / 2, grid.n}) {
        const double t = grid.t(idx);
        const auto a0 = column(a, 0, idx), b0 = column(b, 0, idx);
        for (int c = 0; c <= kappa; ++c) {
            const auto va = column(a, c, idx), vb = column(b, c, idx);
            const MeanVar ma = mean_var(va), mb = mean_var(vb);
            rows.push_back({t, c, "mean_gap", ma.mean - mb.mean, std::hypot(ma.mean_se, mb.mean_se)});
            rows.push_back({t, c, "var_gap", ma.var - mb.var, std::hypot(ma.var_se, mb.var_se)});
            if (c > 0) {
                const CovEstimate ca = covariance(a0, va), cb = covariance(b0, vb);
                rows.push_back({t, c, "cross_cov_gap", ca.cov - cb.cov, std::hypot(ca.se, cb.se)});
            }
            const KsResult ks = ks_two_sample(va, vb);
            rows.push_back({t, c, "ks", ks.statistic, ks.p_value});
        }
    }
    return rows;
}

AgreementReport root_ball_agreement(const std::vector<RootBallRow>& gaps, const std::vector<RootBallRow>& allowance) {
    if (!allowance.empty() && allowance.size() != gaps.size())
        throw std::invalid_argument("root_ball_agreement: allowance layout differs");
    AgreementReport rep;
    for (std::size_t r = 0; r < gaps.size(); ++r) {
        const RootBallRow& g = gaps[r];
        if (g.statistic == "ks") continue;
        double allow = 0.0;
        if (!allowance.empty()) {
            const RootBallRow& a = allowance[r];
            if (a.statistic != g.statistic || a.coordinate != g.coordinate || a.time != g.time)
                throw std::invalid_argument("root_ball_agreement: allowance layout differs");
            allow = std::abs(a.value);
        }
        const double tol = 3 * g.std_error + allow;
        const double ratio = tol > 0 ? std::abs(g.value) / tol : (g.value == 0 ? 0.0 : INFINITY);
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        ++rep.checked;
        if (ratio > 1.0) ++rep.failed;
    }
    return rep;
}

}  // namespace volterra
