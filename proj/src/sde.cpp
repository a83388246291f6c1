#include "volterra/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"

namespace volterra {

FbmNoise::FbmNoise(HurstParam h, const TimeGrid& grid, NoiseMethod method) : h_(h), grid_(grid), method_(method) {
    if (h.brownian()) return;
    if (method == NoiseMethod::cholesky)
        chol_ = std::make_shared<FbmCholeskySampler>(h, grid);
    else
        kmat_ = std::make_shared<KernelMatrix>(kernel_matrix_K(h, grid));
}

SamplePath FbmNoise::sample(int dim, std::uint64_t seed, std::uint64_t stream) const {
    if (h_.brownian()) return sample_bm(grid_, dim, seed, stream);
    if (chol_) return chol_->sample(dim, seed, stream);
    return volterra_from_bm(*kmat_, sample_bm(grid_, dim, seed, stream));
}

namespace {

[[noreturn]] void non_finite(int step) {
    std::ostringstream os;
    os << "drift is not finite at step " << step;
    throw std::runtime_error(os.str());
}

}  // namespace

SamplePath euler_solve(const DriftSpec& drift, const Eigen::VectorXd& x0, const SamplePath& noise) {
    const int dim = noise.dim(), n = noise.grid.n;
    if (x0.size() != dim) throw std::invalid_argument("euler_solve: x0 dimension differs from noise");
    SamplePath x(noise.grid, dim, 0.0);
    x.values.row(0) = x0.transpose();
    const double dt = noise.grid.dt();
    std::vector<double> b(dim, 0.0);
    for (int i = 0; i < n; ++i) {
        if (drift.b0) {
            drift.b0(noise.grid.t(i), PathPrefix(x.values, i), b.data());
            for (int d = 0; d < dim; ++d)
                if (!std::isfinite(b[d])) non_finite(i);
        }
        for (int d = 0; d < dim; ++d)
            x.values(i + 1, d) = x.values(i, d) + b[d] * dt + (noise.values(i + 1, d) - noise.values(i, d));
    }
    return x;
}

Ensemble simulate_particle_system(const DriftSpec& drift, const FbmNoise& noise, const ParticleConfig& cfg) {
    if (cfg.n < 2) throw std::invalid_argument("particle system needs n >= 2");
    if (drift.kind == DriftSpec::Kind::measure) throw std::invalid_argument("particle system needs a pairwise drift");
    if (!(cfg.grid == noise.grid())) throw std::invalid_argument("particle system: grid mismatch with noise");
    const int n = cfg.n, dim = cfg.dim, steps = cfg.grid.n;
    Ensemble e;
    e.streams = cfg.streams;
    if (e.streams.empty())
        for (int i = 0; i < n; ++i) e.streams.push_back((cfg.replication << 32) | std::uint64_t(i));
    if (int(e.streams.size()) != n) throw std::invalid_argument("particle system: one stream per particle");

    std::vector<SamplePath> z(n);
    for (int i = 0; i < n; ++i) z[i] = noise.sample(dim, cfg.seed, e.streams[i]);
    e.particles.assign(n, SamplePath(cfg.grid, dim, cfg.x0));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e.streams[a] < e.streams[b]; });

    const bool pairwise = drift.kind == DriftSpec::Kind::pairwise && !drift.zero_interaction();
    const double dt = cfg.grid.dt();
    Eigen::MatrixXd drifts(n, dim);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> psi(n, dim);
    const bool parallel = n >= 64;
    for (int k = 0; k < steps; ++k) {
        const double t = cfg.grid.t(k);
        if (pairwise && drift.separable && drift.psi) {
            for (int i = 0; i < n; ++i) drift.psi(t, PathPrefix(e.particles[i].values, k), psi.row(i).data());
        }
        Eigen::RowVectorXd psi_sum = Eigen::RowVectorXd::Zero(dim);
        if (pairwise && drift.separable && drift.psi)
            for (int i : order) psi_sum += psi.row(i);
        auto eval = [&](int i) {
            std::vector<double> out(dim), tmp(dim);
            Eigen::Map<Eigen::RowVectorXd> acc(out.data(), dim);
            const PathPrefix xi(e.particles[i].values, k);
            if (drift.b0)
                drift.b0(t, xi, out.data());
            else
                acc.setZero();
            if (pairwise) {
                Eigen::RowVectorXd inter = Eigen::RowVectorXd::Zero(dim);
                if (drift.separable) {
                    if (drift.phi) {
                        drift.phi(t, xi, tmp.data());
                        for (int d = 0; d < dim; ++d) inter(d) += (n - 1) * tmp[d];
                    }
                    if (drift.psi) inter += psi_sum - psi.row(i);
                } else {
                    for (int j : order) {
                        if (j == i) continue;
                        drift.b(t, xi, PathPrefix(e.particles[j].values, k), tmp.data());
                        for (int d = 0; d < dim; ++d) inter(d) += tmp[d];
                    }
                }
                acc += inter / double(n - 1);
            }
            drifts.row(i) = acc;
        };
        if (parallel)
            parallel_for(n, eval);
        else
            for (int i = 0; i < n; ++i) eval(i);
        if (!drifts.allFinite()) non_finite(k);
        for (int i = 0; i < n; ++i)
            e.particles[i].values.row(k + 1) =
                e.particles[i].values.row(k) + drifts.row(i) * dt + (z[i].values.row(k + 1) - z[i].values.row(k));
    }
    return e;
}

std::vector<Ensemble> simulate_replications(const DriftSpec& drift, const FbmNoise& noise, ParticleConfig cfg,
                                            int replications) {
    std::vector<Ensemble> out(replications);
    parallel_for(replications, [&](int r) {
        ParticleConfig c = cfg;
        c.replication = std::uint64_t(r);
        c.streams.clear();
        out[r] = simulate_particle_system(drift, noise, c);
    });
    return out;
}

std::vector<std::vector<SamplePath>> marginal_samples(const std::vector<Ensemble>& reps, int k) {
    std::vector<std::vector<SamplePath>> out;
    out.reserve(reps.size());
    for (const auto& e : reps) {
        if (k < 1 || k > int(e.particles.size())) throw std::invalid_argument("marginal_samples: need 1 <= k <= n");
        out.emplace_back(e.particles.begin(), e.particles.begin() + k);
    }
    return out;
}

double sliced_w1(const std::vector<SamplePath>& a, const std::vector<SamplePath>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("sliced_w1: empty pool");
    const TimeGrid& g = a.front().grid;
    const int dim = a.front().dim();
    double s = 0.0;
    int count = 0;
    for (int c = 1; c <= 8; ++c) {
        const int idx = int(std::lround(double(c) * g.n / 8));
        for (int d = 0; d < dim; ++d) {
            std::vector<double> va, vb;
            for (const auto& p : a) va.push_back(p.values(idx, d));
            for (const auto& p : b) vb.push_back(p.values(idx, d));
            s += wasserstein1(va, vb);
            ++count;
        }
    }
    return s / count;
}

McKeanVlasovResult mckean_vlasov_proxy(const DriftSpec& drift, const FbmNoise& noise, const McKeanVlasovConfig& cfg) {
    if (cfg.n_pool < 100) throw std::invalid_argument("mckean_vlasov_proxy: n_pool must be at least 100");
    if (drift.kind != DriftSpec::Kind::measure && drift.kind != DriftSpec::Kind::single)
        throw std::invalid_argument("mckean_vlasov_proxy: measure drift required");
    const TimeGrid grid = noise.grid();
    const int dim = cfg.dim, n = grid.n;
    const double dt = grid.dt();
    std::vector<SamplePath> z(cfg.n_pool);
    parallel_for(cfg.n_pool, [&](int m) { z[m] = noise.sample(dim, cfg.seed, std::uint64_t(m)); });

    auto solve = [&](const EmpiricalMeasure* mu) {
        std::vector<SamplePath> pool(cfg.n_pool);
        parallel_for(cfg.n_pool, [&](int m) {
            SamplePath x(grid, dim, cfg.x0);
            std::vector<double> b(dim), tmp(dim);
            for (int i = 0; i < n; ++i) {
                const double t = grid.t(i);
                const PathPrefix xi(x.values, i);
                if (drift.b0)
                    drift.b0(t, xi, b.data());
                else
                    std::fill(b.begin(), b.end(), 0.0);
                if (mu && drift.b_measure) {
                    drift.b_measure(t, xi, *mu, tmp.data());
                    for (int d = 0; d < dim; ++d) b[d] += tmp[d];
                }
                for (int d = 0; d < dim; ++d) {
                    if (!std::isfinite(b[d])) non_finite(i);
                    x.values(i + 1, d) = x.values(i, d) + b[d] * dt + (z[m].values(i + 1, d) - z[m].values(i, d));
                }
            }
            pool[m] = std::move(x);
        });
        return pool;
    };

    McKeanVlasovResult res;
    std::vector<SamplePath> prev = solve(nullptr);
    for (int it = 1; it <= cfg.n_iter; ++it) {
        const EmpiricalMeasure mu(prev);
        std::vector<SamplePath> next = solve(&mu);
        const double d = sliced_w1(next, prev);
        res.distances.push_back(d);
        res.iterations = it;
        prev = std::move(next);
        if (d < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.pool = std::move(prev);
    return res;
}

DriftSpec fou_particle_drift(double a, double b, int n) {
    DriftSpec d;
    d.kind = DriftSpec::Kind::pairwise;
    d.b0 = [a, b, n](double, const PathPrefix& x, double* out) { out[0] = -(a + b / n) * x.now(); };
    d.separable = true;
    if (b != 0.0)
        d.psi = [b, n](double, const PathPrefix& y, double* out) { out[0] = -b * (n - 1.0) / n * y.now(); };
    d.b = [b, n](double, const PathPrefix&, const PathPrefix& y, double* out) {
        out[0] = -b * (n - 1.0) / n * y.now();
    };
    return d;
}

DriftSpec fou_mean_field_drift(double a, double b) {
    DriftSpec d;
    d.kind = DriftSpec::Kind::measure;
    d.b0 = [a](double, const PathPrefix& x, double* out) { out[0] = -a * x.now(); };
    if (b != 0.0)
        d.b_measure = [b](double, const PathPrefix& x, const EmpiricalMeasure& mu, double* out) {
            out[0] = -b * mu.mean(x.index());
        };
    return d;
}

}  // namespace volterra
