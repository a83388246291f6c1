#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "volterra/experiments.hpp"
#include "volterra/transforms.hpp"

using namespace volterra;

namespace {

Eigen::VectorXd on_grid(const TimeGrid& g, double (*f)(double)) {
    Eigen::VectorXd v(g.n + 1);
    for (int i = 0; i <= g.n; ++i) v(i) = f(g.t(i));
    return v;
}

double sine(double t) { return std::sin(2 * std::numbers::pi * t); }
double ident(double t) { return t; }

}  // namespace

TEST_SUITE("transforms") {
TEST_CASE("brownian short-circuits") {
    const TimeGrid g(1.0, 32);
    const HurstParam h(0.5);
    const Eigen::VectorXd b = on_grid(g, sine);
    CHECK(q_transform(h, b, g).q == b);
    CHECK(inverse_q(h, b, g) == b);
    const SamplePath x = sample_bm(g, 1, 1, 1);
    const KernelMatrix K = kernel_matrix_K(h, g), L = kernel_matrix_L(h, g);
    CHECK((to_fundamental(L, x).values - x.values).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((from_fundamental(K, x).values - x.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("inverse of zero is zero") {
    const TimeGrid g(1.0, 32);
    for (double h : {0.3, 0.7}) CHECK(inverse_q(HurstParam(h), Eigen::VectorXd::Zero(33), g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transform of a constant against an independent oracle") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double hv : {0.3, 0.7}) {
        const HurstParam h(hv);
        // Q^1 = C s^{1/2-H}; C from ∫_0^1 K(1, s) Q^1_s ds = 1.
        const double I = ts.integrate([&](double s) { return kernel_K(h, 1.0, s) * std::pow(s, 0.5 - hv); }, 0.0, 1.0);
        const double C = 1.0 / I;
        for (double t : {0.1, 0.5, 1.0}) CHECK(q_of_constant(h, t) == doctest::Approx(C * std::pow(t, 0.5 - hv)).epsilon(1e-8));

        const TimeGrid g(1.0, 256);
        const Eigen::VectorXd q = q_transform(h, Eigen::VectorXd::Ones(257), g).q;
        CHECK(q(0) == 0.0);
        for (int i : {64, 128, 256}) CHECK(q(i) == doctest::Approx(q_of_constant(h, g.t(i))).epsilon(1e-6));
    }
}

TEST_CASE("q roundtrip for a linear drift") {
    const TimeGrid g(1.0, 512);
    const HurstParam h(0.7);
    const Eigen::VectorXd b = on_grid(g, ident);
    const Eigen::VectorXd back = inverse_q(h, q_transform(h, b, g).q, g);
    CHECK((back - b).norm() <= 5e-2 * b.norm());
}

TEST_CASE("q roundtrip for a sine drift, both regimes, halving") {
    for (double hv : {0.3, 0.7}) {
        double err[2];
        for (int r = 0; r < 2; ++r) {
            const TimeGrid g(1.0, 256 << r);
            const Eigen::VectorXd b = on_grid(g, sine);
            err[r] = (inverse_q(HurstParam(hv), q_transform(HurstParam(hv), b, g).q, g) - b).norm() / b.norm();
        }
        INFO("h=" << hv << " " << err[0] << " " << err[1]);
        CHECK(err[0] <= 5e-2);
        CHECK(err[0] / err[1] >= 1.6);
    }
}

TEST_CASE("markov decomposition sums to the linear transform along a path") {
    const HurstParam h(0.7);
    const TimeGrid g(1.0, 128);
    const Eigen::VectorXd x = on_grid(g, sine);
    const MarkovQTerms terms = q_transform_markov(h, [](double t, double y) { return y + t; }, x, g);
    const Eigen::VectorXd b = x + on_grid(g, ident);
    const Eigen::VectorXd q = q_transform(h, b, g).q;
    CHECK((terms.total - terms.boundary - terms.regularity - terms.time_reg - terms.space_reg).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((terms.total.tail(g.n) - q.tail(g.n)).cwiseAbs().maxCoeff() < 1e-8 * q.cwiseAbs().maxCoeff());
}

TEST_CASE("rkhs norm through Q equals the grid Cameron-Martin form") {
    // The squared norm of f = ∫ b on the grid is f^T R^{-1} f; it converges to ∫ |Q^b|^2 from below.
    for (double hv : {0.3, 0.7}) {
        const HurstParam h(hv);
        const TimeGrid g(1.0, 256);
        const Eigen::VectorXd b = on_grid(g, sine);
        Eigen::VectorXd f(g.n);
        double acc = 0;
        for (int i = 1; i <= g.n; ++i) {
            acc += 0.5 * (b(i - 1) + b(i)) * g.dt();
            f(i - 1) = acc;
        }
        const Eigen::MatrixXd R = fbm_grid_covariance(h, g);
        const double direct = std::sqrt(f.dot(R.llt().solve(f)));
        const double viaQ = rkhs_norm(h, g, q_transform(h, b, g).q, 1.0);
        INFO("h=" << hv << " direct " << direct << " via Q " << viaQ);
        CHECK(viaQ == doctest::Approx(direct).epsilon(2e-2));
    }
}

TEST_CASE("fundamental transform: exact pair, analytic pair, noise recovery") {
    for (double hv : {0.3, 0.7}) {
        const TransformRoundtrip r = transform_roundtrip(HurstParam(hv), 1.0, 512, 4, 5);
        INFO("h=" << hv << " exact " << r.fundamental.exact_error << " analytic " << r.fundamental.analytic_error
                  << " noise " << r.fundamental.noise_error);
        CHECK(r.fundamental.exact_error <= 1e-8);
        CHECK(r.fundamental.analytic_error <= 5e-2);
        CHECK(r.fundamental.noise_error <= 5e-2);
    }
}

TEST_CASE("noise recovery improves under refinement") {
    const HurstParam h(0.7);
    double err[2];
    for (int r = 0; r < 2; ++r) {
        const TimeGrid g(1.0, 128 << r);
        const KernelMatrix K = kernel_matrix_K(h, g), L = kernel_matrix_L(h, g);
        const SamplePath w = sample_bm(g, 1, 44, 0);
        const SamplePath z = volterra_from_bm(K, w);
        err[r] = (to_fundamental(L, z).values - w.values).cwiseAbs().maxCoeff();
    }
    CHECK(err[1] < err[0]);
}

TEST_CASE("fundamental transform of a drifted path") {
    // X = c t + Z with the exact pair: X† - W equals the L-image of c t, which must match ∫_0^t Q^c.
    const HurstParam h(0.7);
    const TimeGrid g(1.0, 256);
    const KernelMatrix K = kernel_matrix_K(h, g);
    const KernelMatrix L = discrete_inverse_L(K);
    const double c = 0.8;
    const SamplePath w = sample_bm(g, 1, 3, 3);
    SamplePath x = volterra_from_bm(K, w);
    for (int i = 0; i <= g.n; ++i) x.values(i, 0) += c * g.t(i);
    const SamplePath xd = to_fundamental(L, x);
    // ∫_0^t Q^c = c C t^{3/2-H} / (3/2-H)
    const double C = q_of_constant(h, 1.0);
    double worst = 0;
    for (int i = g.n / 4; i <= g.n; ++i) {
        const double t = g.t(i);
        const double expected = c * C * std::pow(t, 1.5 - 0.7) / (1.5 - 0.7);
        worst = std::max(worst, std::abs(xd.values(i, 0) - w.values(i, 0) - expected));
    }
    INFO("worst " << worst);
    CHECK(worst < 1e-2);
}

TEST_CASE("growth bound") {
    const TimeGrid g(1.0, 128);
    std::vector<SamplePath> paths;
    const KernelMatrix K = kernel_matrix_K(HurstParam(0.3), g);
    for (int m = 0; m < 100; ++m) paths.push_back(volterra_from_bm(K, sample_bm(g, 1, 8, m)));

    DriftSpec zero = zero_drift();
    zero.modulus = [](double) { return 1.0; };
    CHECK(q_growth_check(HurstParam(0.3), zero, paths).violations == 0);
    CHECK(q_growth_check(HurstParam(0.3), zero, paths).max_abs_q == 0.0);

    DriftSpec lin = markov_drift([](double, double x) { return x; });
    lin.modulus = [](double) { return 1.0; };
    lin.holder = HolderModulus{1.0, 1.0, 1.0};
    const GrowthReport sub = q_growth_check(HurstParam(0.3), lin, paths);
    CHECK(sub.points > 0);
    CHECK(sub.violations == 0);
    CHECK(q_growth_check(HurstParam(0.5), lin, paths).violations == 0);
}
}
