#include "volterra/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "volterra/parallel.hpp"
#include "volterra/special.hpp"

namespace volterra {

namespace {

using Key = std::tuple<double, double, int>;

// ∫_{x0}^{x1} u^{a-1} (1-u)^{c-1} du for c > -1, c != 0. Upper tails are used on the
// right half when c > 0 so that cells close to u = 1 do not lose digits.
double cell_moment(double a, double c, double x0, double x1) {
    if (c > 0.0 && x0 >= 0.5) return special::upper_beta(a, c, x0) - special::upper_beta(a, c, x1);
    return special::lower_beta(a, c, x1, 1.0 - x1) - special::lower_beta(a, c, x0, 1.0 - x0);
}

std::shared_ptr<const QWeights> build_q_weights(HurstParam hp, const TimeGrid& grid) {
    auto w = std::make_shared<QWeights>();
    w->grid = grid;
    w->hurst = hp.value();
    const int n = grid.n;
    w->W = Eigen::MatrixXd::Zero(n + 1, n + 1);
    if (hp.brownian()) {
        w->W.diagonal().setOnes();
        w->W(0, 0) = 1.0;
        return w;
    }
    const double H = hp.value();
    const double lam = l_normalization(hp);
    const double a = 1.5 - H, c = 0.5 - H;
    const double dt = grid.dt();

    if (H < 0.5) {
        // Q_i = lam t^{1/2-H} ∫_0^1 u^{1/2-H} (1-u)^{-1/2-H} b(t u) du
        parallel_for(n, [&](int r) {
            const int i = r + 1;
            const double scale = lam * std::pow(grid.t(i), 0.5 - H);
            for (int j = 0; j < i; ++j) {
                const double x0 = double(j) / i, x1 = double(j + 1) / i;
                const double m0 = cell_moment(a, c, x0, x1), m1 = cell_moment(a + 1, c, x0, x1);
                w->W(i, j) += scale * ((j + 1) * m0 - i * m1);
                w->W(i, j + 1) += scale * (i * m1 - j * m0);
            }
        });
        return w;
    }

    w->boundary = Eigen::VectorXd::Zero(n + 1);
    w->V = Eigen::MatrixXd::Zero(n + 1, n + 1);
    const double c2 = (2 - 2 * H) * special::beta(a, a);
    const double alpha = H - 0.5;
    parallel_for(n, [&](int r) {
        const int i = r + 1;
        const double t = grid.t(i);
        w->boundary(i) = lam * c2 * std::pow(t, 0.5 - H);
        // far cells: u in [0, 1 - 1/i], b linear on each
        const double far = lam * alpha * std::pow(t, 0.5 - H);
        for (int j = 0; j + 1 < i; ++j) {
            const double x0 = double(j) / i, x1 = double(j + 1) / i;
            const double m0 = cell_moment(a, c, x0, x1), m1 = cell_moment(a + 1, c, x0, x1);
            w->V(i, j) += far * ((j + 1) * m0 - i * m1);
            w->V(i, j + 1) += far * (i * m1 - j * m0);
        }
        // last cell: b_i - b(s) = (b_i - b_{i-1}) (t - s) / dt removes the singularity
        const double near = special::lower_beta(a, a, 1.0 / i, 1.0 - 1.0 / i);
        w->V(i, i - 1) += lam * alpha * std::pow(t, 1.5 - H) / dt * near;
    });
    for (int i = 1; i <= n; ++i) {
        w->W(i, i) = w->boundary(i) + w->V.row(i).sum();
        for (int j = 0; j < i; ++j) w->W(i, j) = -w->V(i, j);
    }
    return w;
}

template <class T, class Build>
std::shared_ptr<const T> cached(std::map<Key, std::shared_ptr<const T>>& cache, std::mutex& m, const Key& key,
                                Build&& build) {
    {
        std::lock_guard lk(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto v = build();
    std::lock_guard lk(m);
    if (cache.size() > 16) cache.clear();
    return cache.emplace(key, v).first->second;
}

std::shared_ptr<const Eigen::MatrixXd> nodal_weights(HurstParam h, const TimeGrid& grid) {
    static std::map<Key, std::shared_ptr<const Eigen::MatrixXd>> cache;
    static std::mutex m;
    return cached(cache, m, Key{h.value(), grid.T, grid.n},
                  [&] { return std::make_shared<const Eigen::MatrixXd>(kernel_K_nodal_weights(h, grid)); });
}

void require_size(const Eigen::VectorXd& v, const TimeGrid& grid, const char* what) {
    if (v.size() != grid.n + 1) throw std::invalid_argument(std::string(what) + ": expected n + 1 grid values");
}

}  // namespace

std::shared_ptr<const QWeights> q_weights(HurstParam h, const TimeGrid& grid) {
    static std::map<Key, std::shared_ptr<const QWeights>> cache;
    static std::mutex m;
    return cached(cache, m, Key{h.value(), grid.T, grid.n}, [&] { return build_q_weights(h, grid); });
}

double q_of_constant(HurstParam h, double t) {
    if (h.brownian()) return 1.0;
    if (!(t > 0.0)) return 0.0;
    const double H = h.value();
    const double lam = l_normalization(h);
    if (H < 0.5) return lam * special::beta(1.5 - H, 0.5 - H) * std::pow(t, 0.5 - H);
    return lam * (2 - 2 * H) * special::beta(1.5 - H, 1.5 - H) * std::pow(t, 0.5 - H);
}

QResult q_transform(HurstParam h, const Eigen::VectorXd& b, const TimeGrid& grid, const HolderCheck& check) {
    require_size(b, grid, "q_transform");
    if (!b.allFinite()) throw std::invalid_argument("q_transform: drift values must be finite");
    QResult res;
    if (h.brownian()) {
        res.q = b;
        return res;
    }
    auto w = q_weights(h, grid);
    res.q = w->W.triangularView<Eigen::Lower>() * b;
    if (h.regime() == Regime::super) {
        const double e = check.exponent > 0 ? check.exponent : h.value() - 0.5 + 0.1;
        double hq = 0.0;
        for (int i = 1; i <= grid.n; ++i)
            for (int j = 0; j < i; ++j)
                hq = std::max(hq, std::abs(b(i) - b(j)) / std::pow(grid.t(i) - grid.t(j), e));
        res.holder_quotient = hq;
        res.conditioning_warning = hq > check.bound;
    }
    return res;
}

MarkovQTerms q_transform_markov(HurstParam h, const std::function<double(double, double)>& bbar,
                                const Eigen::VectorXd& path, const TimeGrid& grid) {
    if (h.regime() != Regime::super) throw std::invalid_argument("q_transform_markov requires h > 1/2");
    require_size(path, grid, "q_transform_markov");
    auto w = q_weights(h, grid);
    const int n = grid.n;
    const double H = h.value();
    const double lam = l_normalization(h);
    MarkovQTerms m;
    for (auto* v : {&m.boundary, &m.regularity, &m.time_reg, &m.space_reg, &m.total}) *v = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd g(n + 1);
    for (int j = 0; j <= n; ++j) g(j) = bbar(grid.t(j), path(j));
    for (int i = 1; i <= n; ++i) {
        const double t = grid.t(i);
        m.boundary(i) = lam * std::pow(t, 0.5 - H) * g(i);
        m.regularity(i) = w->boundary(i) * g(i) - m.boundary(i);
        double tr = 0.0, sr = 0.0;
        for (int j = 0; j < i; ++j) {
            const double frozen = bbar(grid.t(j), path(i));
            tr += w->V(i, j) * (g(i) - frozen);
            sr += w->V(i, j) * (frozen - g(j));
        }
        m.time_reg(i) = tr;
        m.space_reg(i) = sr;
        m.total(i) = m.boundary(i) + m.regularity(i) + tr + sr;
    }
    return m;
}

Eigen::VectorXd inverse_q(HurstParam h, const Eigen::VectorXd& q, const TimeGrid& grid) {
    require_size(q, grid, "inverse_q");
    if (h.brownian()) return q;
    const int n = grid.n;
    if (n < 2) throw std::invalid_argument("inverse_q needs at least two steps");
    auto P = nodal_weights(h, grid);
    Eigen::VectorXd F = P->triangularView<Eigen::Lower>() * q;
    const double dt = grid.dt();
    Eigen::VectorXd b(n + 1);
    for (int i = 1; i < n; ++i) b(i) = (F(i + 1) - F(i - 1)) / (2 * dt);
    b(0) = (-3 * F(0) + 4 * F(1) - F(2)) / (2 * dt);
    b(n) = (3 * F(n) - 4 * F(n - 1) + F(n - 2)) / (2 * dt);
    return b;
}

namespace {
SamplePath apply_kernel_path(const KernelMatrix& kmat, const SamplePath& x, const char* what) {
    if (!(kmat.grid == x.grid)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
    SamplePath out(x.grid, x.dim(), 0.0);
    for (int d = 0; d < x.dim(); ++d) out.values.col(d) = kmat.apply_increments(x.increments(d), x.values(0, d));
    return out;
}
}  // namespace

SamplePath to_fundamental(const KernelMatrix& lmat, const SamplePath& x) {
    return apply_kernel_path(lmat, x, "to_fundamental");
}

SamplePath from_fundamental(const KernelMatrix& kmat, const SamplePath& x_dagger) {
    return apply_kernel_path(kmat, x_dagger, "from_fundamental");
}

GrowthReport q_growth_check(HurstParam h, const DriftSpec& drift, const std::vector<SamplePath>& paths) {
    if (drift.kind != DriftSpec::Kind::single) throw std::invalid_argument("q_growth_check: single drift required");
    if (!drift.modulus) throw std::invalid_argument("q_growth_check: drift has no modulus M_t");
    GrowthReport rep;
    if (paths.empty()) return rep;
    const TimeGrid grid = paths.front().grid;
    const int n = grid.n, dim = paths.front().dim();
    const bool super = h.regime() == Regime::super;
    if (super && !drift.holder) throw std::invalid_argument("q_growth_check: h > 1/2 needs a Hölder modulus");
    auto w = q_weights(h, grid);
    const double beta = h.value() - 0.05;
    rep.path_holder_exponent = super ? beta : 0.0;

    Eigen::VectorXd M(n + 1);
    for (int j = 0; j <= n; ++j) M(j) = std::abs(drift.modulus(grid.t(j)));
    Eigen::VectorXd Mt = h.brownian() ? M : Eigen::VectorXd(w->W.cwiseAbs() * M);

    // Hölder part of the bound without the path seminorm: sum_j V_ij |t_i - t_j|^gamma and
    // sum_j V_ij |t_i - t_j|^{alpha beta}.
    Eigen::VectorXd vt = Eigen::VectorXd::Zero(n + 1), vx = Eigen::VectorXd::Zero(n + 1);
    if (super) {
        const HolderModulus& hm = *drift.holder;
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < i; ++j) {
                const double dt = grid.t(i) - grid.t(j);
                vt(i) += w->V(i, j) * std::pow(dt, hm.gamma);
                vx(i) += w->V(i, j) * std::pow(dt, hm.alpha * beta);
            }
    }

    double slack_sum = 0.0;
    std::vector<double> out(dim);
    for (const auto& p : paths) {
        if (!(p.grid == grid)) throw std::invalid_argument("q_growth_check: paths on different grids");
        Eigen::MatrixXd b(n + 1, dim);
        for (int j = 0; j <= n; ++j) {
            if (drift.b0)
                drift.b0(grid.t(j), PathPrefix(p.values, j), out.data());
            else
                std::fill(out.begin(), out.end(), 0.0);
            for (int d = 0; d < dim; ++d) b(j, d) = out[d];
        }
        Eigen::MatrixXd q = w->W.triangularView<Eigen::Lower>() * b;
        double sup = 0.0, holder = 0.0;
        for (int i = 0; i <= n; ++i) {
            sup = std::max(sup, p.values.row(i).norm());
            if (super)
                for (int j = 0; j < i; ++j)
                    holder = std::max(holder, (p.values.row(i) - p.values.row(j)).norm() /
                                                  std::pow(grid.t(i) - grid.t(j), beta));
            if (i == 0) continue;
            double bound;
            if (super) {
                const HolderModulus& hm = *drift.holder;
                bound = w->boundary(i) * M(i) * (1 + sup) + hm.C * (vt(i) + std::pow(holder, hm.alpha) * vx(i));
            } else {
                bound = Mt(i) * (1 + sup);
            }
            const double qa = q.row(i).norm();
            rep.max_abs_q = std::max(rep.max_abs_q, qa);
            ++rep.points;
            if (qa > bound * (1 + 1e-12) + 1e-300) ++rep.violations;
            const double slack = bound > 0 ? (bound - qa) / bound : (qa == 0 ? 1.0 : -1.0);
            rep.min_relative_slack = std::min(rep.min_relative_slack, slack);
            slack_sum += slack;
        }
        ++rep.paths;
    }
    rep.mean_relative_slack = rep.points ? slack_sum / rep.points : 0.0;
    return rep;
}

}  // namespace volterra
