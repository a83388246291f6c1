#include "volterra/chaos.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "volterra/parallel.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/sde.hpp"
#include "volterra/transforms.hpp"

namespace volterra {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(const Eigen::MatrixXd& S, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() == Eigen::Success) return llt;
    Eigen::MatrixXd J = S;
    J.diagonal().array() += 1e-12 * std::max(S.trace(), 1e-300) / S.rows();
    llt.compute(J);
    if (llt.info() != Eigen::Success) throw std::runtime_error(std::string(what) + ": covariance is singular");
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double gaussian_entropy(const GaussianLaw& law1, const GaussianLaw& law2) {
    const int k = law1.size();
    if (law2.size() != k) throw std::invalid_argument("gaussian_entropy: dimension mismatch");
    const auto l2 = factor_with_jitter(law2.cov, "gaussian_entropy (second law)");
    Eigen::LLT<Eigen::MatrixXd> l1(law1.cov);
    if (l1.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd dm = law2.mean - law1.mean;
    const double tr = l2.solve(law1.cov).trace();
    const double quad = dm.dot(l2.solve(dm));
    return 0.5 * (tr + quad - k + log_det(l2) - log_det(l1));
}

double gaussian_wasserstein2(const GaussianLaw& law1, const GaussianLaw& law2) {
    const Eigen::MatrixXd& A = law1.cov;
    const Eigen::MatrixXd& B = law2.cov;
    if (A.rows() != B.rows()) throw std::invalid_argument("gaussian_wasserstein2: dimension mismatch");
    const double dm2 = (law1.mean - law2.mean).squaredNorm();
    const double scale = std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
    if ((A * B - B * A).cwiseAbs().maxCoeff() <= 1e-13 * scale * scale * A.rows()) {
        // a generic combination of commuting matrices has their joint eigenbasis
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A + 0.7853981633974483 * B);
        const Eigen::MatrixXd& U = es.eigenvectors();
        const Eigen::MatrixXd a = U.transpose() * A * U, b = U.transpose() * B * U;
        const double off = std::max((a - Eigen::MatrixXd(a.diagonal().asDiagonal())).cwiseAbs().maxCoeff(),
                                    (b - Eigen::MatrixXd(b.diagonal().asDiagonal())).cwiseAbs().maxCoeff());
        if (off <= 1e-12 * std::max(scale, 1e-300)) {
            double s = 0.0;
            for (int i = 0; i < A.rows(); ++i) {
                const double d = std::sqrt(std::max(a(i, i), 0.0)) - std::sqrt(std::max(b(i, i), 0.0));
                s += d * d;
            }
            return std::sqrt(dm2 + s);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
    const Eigen::MatrixXd rootB =
        eb.eigenvectors() * eb.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * eb.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(rootB * A * rootB, Eigen::EigenvaluesOnly);
    const double cross = ec.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::sqrt(std::max(0.0, dm2 + A.trace() + B.trace() - 2 * cross));
}

EntropyEstimate entropy_between_laws(const DriftSpec& b1, const DriftSpec& b2, HurstParam h, const TimeGrid& grid,
                                     int n_samples, std::uint64_t seed, double initial_entropy, double x0) {
    if (b1.kind != DriftSpec::Kind::single || b2.kind != DriftSpec::Kind::single)
        throw std::invalid_argument("entropy_between_laws: single drifts required");
    if (n_samples < 2) throw std::invalid_argument("entropy_between_laws: need at least two samples");
    const FbmNoise noise(h, grid, NoiseMethod::kernel);
    const int n = grid.n;
    std::vector<double> energy(n_samples);
    parallel_for(n_samples, [&](int m) {
        const SamplePath z = noise.sample(1, seed, std::uint64_t(m));
        const SamplePath y = euler_solve(b1, Eigen::VectorXd::Constant(1, x0), z);
        Eigen::VectorXd diff(n + 1);
        double v1 = 0.0, v2 = 0.0;
        for (int j = 0; j <= n; ++j) {
            const PathPrefix px(y.values, j);
            v1 = v2 = 0.0;
            if (b1.b0) b1.b0(grid.t(j), px, &v1);
            if (b2.b0) b2.b0(grid.t(j), px, &v2);
            diff(j) = v1 - v2;
        }
        if (!diff.allFinite()) {
            energy[m] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        const Eigen::VectorXd q = q_transform(h, diff, grid).q;
        const double r = rkhs_norm(h, grid, q, grid.T);
        energy[m] = 0.5 * r * r;
    });
    EntropyEstimate e;
    double s = 0.0, s2 = 0.0;
    for (double v : energy) {
        if (!std::isfinite(v)) {
            ++e.excluded;
            continue;
        }
        s += v;
        s2 += v * v;
        ++e.samples;
    }
    if (e.excluded > 0.01 * n_samples) {
        std::ostringstream os;
        os << "entropy_between_laws: " << e.excluded << " of " << n_samples << " samples had non-finite Q";
        throw std::runtime_error(os.str());
    }
    const double mean = s / e.samples;
    const double var = std::max(0.0, (s2 - e.samples * mean * mean) / (e.samples - 1));
    e.estimate = initial_entropy + mean;
    e.std_error = std::sqrt(var / e.samples);
    return e;
}

void FouParams::validate() const {
    if (h.regime() != Regime::super) throw std::invalid_argument("fOU example requires hurst > 1/2");
    if (a + b == 0.0) throw std::invalid_argument("fOU example requires a + b != 0");
}

XiEta fou_xi_eta(const FouParams& p, double t) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("fou_xi_eta: t must be nonnegative");
    if (t == 0.0) return {};
    const double H = p.h.value();
    const double CH = H * (2 * H - 1);
    auto one = [&](double rate) {
        QuadOptions o;
        o.rel_tol = 1e-13;
        auto r = integrate_singular(
            [&](double w, double, double tw) {
                const double g = rate == 0.0 ? 2 * tw : -std::expm1(-2 * rate * tw) / rate;
                return std::pow(w, 2 * H - 2) * std::exp(-rate * w) * g;
            },
            0.0, t, 2 * H - 2, 0.0, o);
        return CH * r.value;
    };
    return {one(p.a), one(p.a + p.b)};
}

GaussianLaw fou_system_covariance(const FouParams& p, int n, double t) {
    if (n < 1) throw std::invalid_argument("fou_system_covariance: n must be positive");
    const XiEta xe = fou_xi_eta(p, t);
    GaussianLaw g;
    g.mean = Eigen::VectorXd::Zero(n);
    g.cov = Eigen::MatrixXd::Constant(n, n, (xe.eta - xe.xi) / n);
    g.cov.diagonal().array() += xe.xi;
    return g;
}

Eigen::MatrixXd fou_exp_closed_form(double a, double b, int n, double r) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Constant(n, n, std::expm1(r * b) / n);
    E.diagonal().array() += 1.0;
    return std::exp(r * a) * E;
}

Eigen::MatrixXd fou_exp_numeric(double a, double b, int n, double r) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Constant(n, n, b / n);
    A.diagonal().array() += a;
    return (r * A).exp();
}

std::vector<FouRateRow> fou_rate_limit(const FouParams& p, int k, double t, const std::vector<int>& n_list) {
    if (k < 1) throw std::invalid_argument("fou_rate_limit: k must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("fou_rate_limit: t must be positive");
    const XiEta xe = fou_xi_eta(p, t);
    const double c = (xe.eta - xe.xi) / xe.xi;
    GaussianLaw limit_law;
    limit_law.mean = Eigen::VectorXd::Zero(k);
    limit_law.cov = xe.xi * Eigen::MatrixXd::Identity(k, k);
    std::vector<FouRateRow> rows;
    for (int n : n_list) {
        if (n < k) throw std::invalid_argument("fou_rate_limit: every n must be at least k");
        GaussianLaw pk;
        pk.mean = Eigen::VectorXd::Zero(k);
        pk.cov = Eigen::MatrixXd::Constant(k, k, (xe.eta - xe.xi) / n);
        pk.cov.diagonal().array() += xe.xi;
        FouRateRow row;
        row.n = n;
        row.k = k;
        row.t = t;
        const double scale = double(n) * n / (double(k) * k);
        const double w = gaussian_wasserstein2(pk, limit_law);
        row.w2_scaled = scale * w * w;
        const double d = std::sqrt(xe.xi + double(k) / n * (xe.eta - xe.xi)) - std::sqrt(xe.xi);
        row.w2_display = scale * d * d;
        row.limit = xe.xi * c * c / 4;
        row.entropy = gaussian_entropy(pk, limit_law);
        rows.push_back(row);
    }
    return rows;
}

namespace {

// One level down: F_k from F_{k+1} on the uniform grid, exact for linear F_{k+1}.
void level_down(std::vector<double>& F, double c, double h) {
    const double z = c * h;
    const double e = std::exp(-z), om = -std::expm1(-z);
    const double lin = (z - om) / z;  // 1 - (1 - e^{-z}) / z
    double prev_g = F[0];
    F[0] = 0.0;
    for (std::size_t m = 1; m < F.size(); ++m) {
        const double g = F[m];
        F[m] = e * F[m - 1] + prev_g * om + (g - prev_g) * lin;
        prev_g = g;
    }
}

std::vector<double> top_level(double gamma, int l, double t, int points, bool for_a) {
    std::vector<double> F(points + 1);
    for (int m = 0; m <= points; ++m) {
        const double s = t * m / points;
        F[m] = for_a ? -std::expm1(-gamma * l * s) : std::exp(-gamma * l * s);
    }
    return F;
}

}  // namespace

HierarchyAB hierarchy_AB(double gamma, int k, int l, double t, int points) {
    if (!(gamma > 0.0)) throw std::invalid_argument("hierarchy_AB: gamma must be positive");
    if (k < 1 || l < k) throw std::invalid_argument("hierarchy_AB: need 1 <= k <= l");
    if (!(t >= 0.0)) throw std::invalid_argument("hierarchy_AB: t must be nonnegative");
    if (k == l || t == 0.0) return {-std::expm1(-gamma * k * t), l == k ? std::exp(-gamma * k * t) : 0.0};
    const double h = t / points;
    std::vector<double> A = top_level(gamma, l, t, points, true), B = top_level(gamma, l, t, points, false);
    for (int j = l - 1; j >= k; --j) {
        level_down(A, gamma * j, h);
        level_down(B, gamma * j, h);
    }
    return {A.back(), B.back()};
}

HierarchyTable hierarchy_table(double gamma, int l_max, double t, int points) {
    HierarchyTable tab;
    tab.A.assign(l_max + 1, std::vector<double>(l_max + 1, 0.0));
    tab.B = tab.A;
    parallel_for(l_max, [&](int r) {
        const int l = r + 1;
        if (t == 0.0) {
            tab.B[l][l] = 1.0;
            return;
        }
        const double h = t / points;
        std::vector<double> A = top_level(gamma, l, t, points, true), B = top_level(gamma, l, t, points, false);
        tab.A[l][l] = -std::expm1(-gamma * l * t);
        tab.B[l][l] = std::exp(-gamma * l * t);
        for (int j = l - 1; j >= 1; --j) {
            level_down(A, gamma * j, h);
            level_down(B, gamma * j, h);
            tab.A[j][l] = A.back();
            tab.B[j][l] = B.back();
        }
    });
    return tab;
}

HierarchyAB hierarchy_AB_closed_form(double gamma, int k, int l, double t) {
    const double p = -std::expm1(-gamma * t);
    auto b = [&](int m) {
        return boost::math::binomial_coefficient<double>(m - 1, k - 1) * std::exp(-gamma * k * t) *
               std::pow(p, m - k);
    };
    double s = 0.0;
    for (int m = k; m <= l; ++m) s += b(m);
    return {1.0 - s, b(l)};
}

void HierarchyInputs::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("hierarchy inputs: gamma must be positive");
    if (M < 0.0 || C0 < 0.0) throw std::invalid_argument("hierarchy inputs: M and C0 must be nonnegative");
    if (k < 1 || k > n) throw std::invalid_argument("hierarchy inputs: need 1 <= k <= n");
    if (!(T >= 0.0)) throw std::invalid_argument("hierarchy inputs: T must be nonnegative");
}

ChaosBound chaos_bound(const HierarchyInputs& in) {
    in.validate();
    ChaosBound out;
    const int n = in.n, k = in.k;
    const double nn = double(n) * n;
    const double top = in.C0 + n * in.M / 2;
    if (k >= n) {
        out.bound = out.top_term = top;
    } else {
        const HierarchyTable tab = hierarchy_table(in.gamma, n - 1, in.T);
        for (int l = k; l <= n - 1; ++l) {
            out.initial_terms.push_back(tab.B[k][l] * in.C0 * l * l / nn);
            out.forcing_terms.push_back(double(l - 1) * (l - 1) * in.T * in.M /
                                        (in.gamma * double(n - 1) * (n - 1)) * tab.A[k][l]);
            out.bound += out.initial_terms.back() + out.forcing_terms.back();
        }
        out.top_term = tab.A[k][n - 1] * top;
        out.bound += out.top_term;
    }
    const double gap = std::max(0.0, std::exp(-in.gamma * in.T) - double(k) / n);
    out.packaged = std::exp(3 * in.gamma * in.T) / nn * (2 * in.C0 * k * k + 5 * in.M * in.T * k * k * k) +
                   (in.C0 + in.M * n * in.T) * std::exp(-2.0 * n * gap * gap);
    return out;
}

ChaosConstants fou_chaos_constants(const FouParams& p, const TimeGrid& grid, int samples, std::uint64_t seed) {
    p.validate();
    if (samples < 2) throw std::invalid_argument("fou_chaos_constants: need at least two samples");
    const FbmNoise noise(p.h, grid);
    const DriftSpec ou = markov_drift([a = p.a](double, double x) { return -a * x; });
    const int n = grid.n;
    std::vector<Eigen::VectorXd> q(samples);
    std::vector<double> energy(samples);
    parallel_for(samples, [&](int m) {
        const SamplePath y = euler_solve(ou, Eigen::VectorXd::Zero(1), noise.sample(1, seed, std::uint64_t(m)));
        q[m] = q_transform(p.h, y.values.col(0), grid).q;
        const double r = rkhs_norm(p.h, grid, q[m], grid.T);
        energy[m] = r * r;
    });
    ChaosConstants c;
    c.samples = samples;
    for (int i = 0; i <= n; ++i) {
        double s = 0.0, s2 = 0.0;
        for (const auto& v : q) {
            s += v(i);
            s2 += v(i) * v(i);
        }
        const double mean = s / samples;
        c.gamma = std::max(c.gamma, (s2 - samples * mean * mean) / (samples - 1));
    }
    c.gamma *= 2 * p.b * p.b;
    double s = 0.0, s2 = 0.0;
    for (double e : energy) {
        s += e;
        s2 += e * e;
    }
    const double mean = s / samples;
    c.M = p.b * p.b * mean;
    c.M_std_error = p.b * p.b * std::sqrt(std::max(0.0, (s2 - samples * mean * mean) / (samples - 1)) / samples);
    return c;
}

}  // namespace volterra
