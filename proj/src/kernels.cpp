#include "volterra/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/special.hpp"

namespace volterra {

HurstParam::HurstParam(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) {
        std::ostringstream os;
        os << "hurst must lie in (0, 1), got " << h;
        throw std::invalid_argument(os.str());
    }
}

Regime HurstParam::regime() const {
    if (h_ < 0.5) return Regime::sub;
    if (h_ > 0.5) return Regime::super;
    return Regime::brownian;
}

TimeGrid::TimeGrid(double horizon, int n_steps) : T(horizon), n(n_steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("grid horizon must be positive");
    if (n_steps < 1) throw std::invalid_argument("grid needs at least one step");
}

double fbm_covariance(HurstParam h, double t, double s) {
    const double e = 2.0 * h.value();
    return 0.5 * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) - std::pow(std::abs(t - s), e));
}

double normalizing_constant_cH(HurstParam hp) {
    const double H = hp.value();
    if (hp.brownian()) throw std::invalid_argument("c_H is undefined at h = 1/2");
    if (H > 0.5) return std::sqrt(H * (2 * H - 1) / special::beta(2 - 2 * H, H - 0.5));
    return std::sqrt(2 * H / ((1 - 2 * H) * special::beta(1 - 2 * H, H + 0.5)));
}

double l_normalization(HurstParam hp) {
    const double H = hp.value();
    if (hp.brownian()) return 1.0;
    const double c = normalizing_constant_cH(hp);
    if (H < 0.5)
        return 1.0 / (special::beta(0.5 - H, 1.5 - H) * c * special::beta(2 - 2 * H, H + 0.5) * (1.5 - H));
    return 1.0 / ((2 - 2 * H) * special::beta(1.5 - H, 1.5 - H) * c * special::beta(2 - 2 * H, H - 0.5));
}

namespace {

// k(t, s) = t^degree f(s/t, 1 - s/t); alpha0 / alpha1 are the exponents of u and 1-u at the ends.
struct UnitKernel {
    std::function<double(double, double)> f;
    double degree = 0.0;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
};

// After r = s/v the inner integrals become ∫_{s/t}^1 v^{a-1}(1-v)^{b-1} dv.
UnitKernel unit_K(HurstParam hp) {
    const double H = hp.value();
    UnitKernel k;
    k.degree = H - 0.5;
    if (hp.brownian()) {
        k.f = [](double, double) { return 1.0; };
        return k;
    }
    const double c = normalizing_constant_cH(hp);
    k.alpha0 = -std::abs(H - 0.5);
    k.alpha1 = H - 0.5;
    if (H > 0.5) {
        const double a = 1 - 2 * H, b = H - 0.5;
        k.f = [=](double u, double omu) {
            return c * std::pow(u, H - 0.5) * special::upper_beta_neg_a(a, b, u, omu);
        };
    } else {
        k.f = [=](double u, double omu) {
            return c * (std::pow(omu / u, H - 0.5) -
                        (H - 0.5) * std::pow(u, H - 0.5) * special::upper_beta(1 - 2 * H, H + 0.5, u));
        };
    }
    return k;
}

UnitKernel unit_L_displayed(HurstParam hp, double scale = 1.0) {
    const double H = hp.value();
    UnitKernel k;
    k.degree = 0.5 - H;
    if (hp.brownian()) {
        k.f = [](double, double) { return 1.0; };
        return k;
    }
    k.alpha1 = 0.5 - H;
    if (H < 0.5) {
        k.alpha0 = 0.0;  // u^{1/2-H} log u
        k.f = [=](double u, double omu) {
            return scale * std::pow(u, 0.5 - H) * special::log_beta_tail(0.5 - H, u, omu);
        };
    } else {
        k.alpha0 = 0.5 - H;
        k.f = [=](double u, double omu) {
            return scale * (std::pow(u * omu, 0.5 - H) -
                            (H - 0.5) * std::pow(u, 0.5 - H) * special::log_beta_tail(1.5 - H, u, omu));
        };
    }
    return k;
}

double eval_homogeneous(const UnitKernel& k, double t, double s) {
    if (!(s > 0.0)) throw std::domain_error("kernel requires s > 0");
    if (!(s < t)) throw std::domain_error("kernel requires s < t");
    return std::pow(t, k.degree) * k.f(s / t, (t - s) / t);
}

// Cumulative integrals G0(x) = ∫_0^x f, G1(x) = ∫_0^x u f over all fractions j/i, 0 <= j <= i <= n.
struct Cumulative {
    std::vector<double> x, g0, g1, g2;
    bool converged = true;

    std::size_t index(double v) const {
        auto it = std::lower_bound(x.begin(), x.end(), v);
        return static_cast<std::size_t>(it - x.begin());
    }
    double d0(int j0, int j1, int i) const { return g0[index(double(j1) / i)] - g0[index(double(j0) / i)]; }
    double d1(int j0, int j1, int i) const { return g1[index(double(j1) / i)] - g1[index(double(j0) / i)]; }
    double d2(int j0, int j1, int i) const { return g2[index(double(j1) / i)] - g2[index(double(j0) / i)]; }
};

Cumulative cumulate(const UnitKernel& k, int n) {
    Cumulative c;
    c.x.reserve(std::size_t(n) * (n + 3) / 2);
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j <= i; ++j) c.x.push_back(double(j) / i);
    std::sort(c.x.begin(), c.x.end());
    c.x.erase(std::unique(c.x.begin(), c.x.end()), c.x.end());
    const std::size_t m = c.x.size();
    std::vector<double> p0(m - 1), p1(m - 1), p2(m - 1);
    std::vector<char> ok(m - 1, 1);
    const int chunks = std::max(1, std::min<int>(64, int(m - 1)));
    parallel_for(chunks, [&](int ch) {
        const std::size_t lo = (m - 1) * ch / chunks, hi = (m - 1) * (ch + 1) / chunks;
        for (std::size_t g = lo; g < hi; ++g) {
            const double a = c.x[g], b = c.x[g + 1];
            if (a == 0.0 || b == 1.0) {
                const double al = a == 0.0 ? k.alpha0 : 0.0, be = b == 1.0 ? k.alpha1 : 0.0;
                QuadOptions o;
                o.rel_tol = 1e-12;
                auto r0 = integrate_singular([&](double u, double, double db) { return k.f(u, b == 1.0 ? db : 1.0 - u); },
                                             a, b, al, be, o);
                auto r1 = integrate_singular(
                    [&](double u, double, double db) { return u * k.f(u, b == 1.0 ? db : 1.0 - u); }, a, b, al, be, o);
                auto r2 = integrate_singular(
                    [&](double u, double, double db) {
                        const double v = k.f(u, b == 1.0 ? db : 1.0 - u);
                        return v * v;
                    },
                    a, b, 2 * al, 2 * be, o);
                p0[g] = r0.value;
                p1[g] = r1.value;
                p2[g] = r2.value;
                ok[g] = r0.converged && r1.converged && r2.converged;
            } else {
                const GaussRule& r = gauss_legendre(10);
                const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
                double s0 = 0.0, s1 = 0.0, s2 = 0.0;
                for (int q = 0; q < 10; ++q) {
                    const double u = mid + h * r.x[q];
                    const double fv = k.f(u, 1.0 - u);
                    s0 += r.w[q] * fv;
                    s1 += r.w[q] * u * fv;
                    s2 += r.w[q] * fv * fv;
                }
                p0[g] = s0 * h;
                p1[g] = s1 * h;
                p2[g] = s2 * h;
            }
        }
    });
    c.g0.assign(m, 0.0);
    c.g1.assign(m, 0.0);
    c.g2.assign(m, 0.0);
    for (std::size_t g = 0; g + 1 < m; ++g) {
        c.g0[g + 1] = c.g0[g] + p0[g];
        c.g1[g + 1] = c.g1[g] + p1[g];
        c.g2[g + 1] = c.g2[g] + p2[g];
        if (!ok[g]) c.converged = false;
    }
    return c;
}

KernelMatrix cell_average_matrix(const UnitKernel& k, const TimeGrid& grid, ActionMode mode, bool exact_ones,
                                 OriginCell origin) {
    KernelMatrix km;
    km.grid = grid;
    km.mode = mode;
    const int n = grid.n;
    km.entries = Eigen::MatrixXd::Zero(n, n);
    if (exact_ones) {
        for (int r = 0; r < n; ++r)
            for (int j = 0; j <= r; ++j) km.entries(r, j) = 1.0;
        return km;
    }
    const Cumulative c = cumulate(k, n);
    const double dt = grid.dt();
    for (int i = 1; i <= n; ++i) {
        const double scale = std::pow(grid.t(i), k.degree + 1.0) / dt;
        for (int j = 0; j < i; ++j) {
            const double avg = scale * c.d0(j, j + 1, i);
            if (j == 0 && origin == OriginCell::rms) {
                const double rms = std::sqrt(std::pow(grid.t(i), 2 * k.degree + 1.0) * c.d2(0, 1, i) / dt);
                km.entries(i - 1, 0) = avg < 0 ? -rms : rms;
            } else {
                km.entries(i - 1, j) = avg;
            }
        }
    }
    if (!c.converged) km.failed_cells.emplace_back(-1, -1);
    return km;
}

}  // namespace

double kernel_K(HurstParam h, double t, double s) {
    if (h.brownian()) {
        if (!(s > 0.0) || !(s < t)) throw std::domain_error("kernel requires 0 < s < t");
        return 1.0;
    }
    return eval_homogeneous(unit_K(h), t, s);
}

double kernel_L_displayed(HurstParam h, double t, double s) {
    if (h.brownian()) {
        if (!(s > 0.0) || !(s < t)) throw std::domain_error("kernel requires 0 < s < t");
        return 1.0;
    }
    return eval_homogeneous(unit_L_displayed(h), t, s);
}

double kernel_L(HurstParam h, double t, double s) { return l_normalization(h) * kernel_L_displayed(h, t, s); }

Eigen::VectorXd KernelMatrix::apply_increments(const Eigen::VectorXd& dx, double x0) const {
    if (dx.size() != grid.n) throw std::invalid_argument("apply_increments: grid mismatch");
    Eigen::VectorXd out(grid.n + 1);
    out(0) = x0;
    out.tail(grid.n) = entries.triangularView<Eigen::Lower>() * dx;
    out.tail(grid.n).array() += x0;
    return out;
}

KernelMatrix discretize_kernel(const std::function<double(double, double)>& kernel, const TimeGrid& grid,
                               ActionMode mode, KernelSingularity sing, const QuadOptions& opt,
                               OriginCell origin) {
    KernelMatrix km;
    km.grid = grid;
    km.mode = mode;
    const int n = grid.n;
    const double dt = grid.dt();
    km.entries = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::vector<int>> failed(n);
    parallel_for(n, [&](int r) {
        const double t = grid.t(r + 1);
        for (int j = 0; j <= r; ++j) {
            const double al = j == 0 ? sing.at_origin : 0.0;
            const double be = j == r ? sing.at_diagonal : 0.0;
            auto res = integrate_singular([&](double s, double, double) { return kernel(t, s); }, grid.t(j),
                                          grid.t(j + 1), al, be, opt);
            km.entries(r, j) = res.value / dt;
            if (j == 0 && origin == OriginCell::rms) {
                auto sq = integrate_singular(
                    [&](double s, double, double) {
                        const double v = kernel(t, s);
                        return v * v;
                    },
                    grid.t(0), grid.t(1), 2 * al, 2 * be, opt);
                const double rms = std::sqrt(sq.value / dt);
                km.entries(r, 0) = res.value < 0 ? -rms : rms;
                if (!sq.converged) res.converged = false;
            }
            if (!res.converged || !std::isfinite(res.value)) failed[r].push_back(j);
        }
    });
    for (int r = 0; r < n; ++r)
        for (int j : failed[r]) km.failed_cells.emplace_back(r, j);
    return km;
}

KernelMatrix kernel_matrix_K(HurstParam h, const TimeGrid& grid, ActionMode mode, OriginCell origin) {
    if (origin == OriginCell::automatic)
        origin = mode == ActionMode::increment ? OriginCell::rms : OriginCell::average;
    return cell_average_matrix(unit_K(h), grid, mode, h.brownian(), origin);
}

KernelMatrix kernel_matrix_L(HurstParam h, const TimeGrid& grid, ActionMode mode) {
    return cell_average_matrix(unit_L_displayed(h, l_normalization(h)), grid, mode, h.brownian(),
                               OriginCell::average);
}

Eigen::MatrixXd kernel_K_nodal_weights(HurstParam h, const TimeGrid& grid) {
    const int n = grid.n;
    const double pe = 0.5 - h.value();  // q(s) = s^{1/2-H} r(s), r linear on [t_1, T] and constant on [0, t_1]
    const UnitKernel k = unit_K(h);
    UnitKernel kw = k;
    kw.f = [k, pe](double u, double omu) { return k.f(u, omu) * std::pow(u, pe); };
    kw.degree = k.degree + pe;
    kw.alpha0 = k.alpha0 + pe;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n + 1, n + 1);
    const Cumulative c = cumulate(kw, n);
    for (int i = 1; i <= n; ++i) {
        const double scale = std::pow(grid.t(i), kw.degree + 1.0);
        P(i, 1) += scale * std::pow(grid.t(1), -pe) * c.d0(0, 1, i);
        for (int cell = 1; cell < i; ++cell) {
            const double g0 = c.d0(cell, cell + 1, i), g1 = c.d1(cell, cell + 1, i);
            P(i, cell) += scale * std::pow(grid.t(cell), -pe) * ((cell + 1) * g0 - i * g1);
            P(i, cell + 1) += scale * std::pow(grid.t(cell + 1), -pe) * (i * g1 - cell * g0);
        }
    }
    return P;
}

double verify_isometry(const KernelMatrix& kmat, HurstParam h) {
    const int n = kmat.grid.n;
    const double dt = kmat.grid.dt();
    Eigen::MatrixXd A = kmat.entries.triangularView<Eigen::Lower>();
    Eigen::MatrixXd G = A * A.transpose() * dt;
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double r = fbm_covariance(h, kmat.grid.t(i + 1), kmat.grid.t(j + 1));
            err = std::max(err, std::abs(G(i, j) - r));
        }
    return err;
}

KernelMatrix discrete_inverse_L(const KernelMatrix& kmat) {
    const int n = kmat.grid.n;
    const Eigen::MatrixXd& A = kmat.entries;
    const double scale = A.diagonal().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (!(std::abs(A(i, i)) > 1e-14 * scale)) {
            std::ostringstream os;
            os << "discrete_inverse_L: singular pivot at index " << i << " (value " << A(i, i) << ")";
            throw std::runtime_error(os.str());
        }
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) C(i, j) = 1.0;
    Eigen::MatrixXd Y = A.triangularView<Eigen::Lower>().solve(C);
    for (int i = 1; i < n; ++i) Y.row(i) += Y.row(i - 1);
    KernelMatrix out;
    out.grid = kmat.grid;
    out.mode = ActionMode::increment;
    out.entries = Y.triangularView<Eigen::Lower>();
    return out;
}

}  // namespace volterra
