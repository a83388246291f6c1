#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/special.hpp"

using namespace volterra;

namespace {

// ∫_0^s K(t, u) K(s, u) du by tanh-sinh, which copes with the endpoint singularities on its own.
double isometry_integral(HurstParam h, double t, double s) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([&](double u) { return kernel_K(h, t, u) * kernel_K(h, s, u); }, 0.0, s);
}

}  // namespace

TEST_SUITE("kernels") {
TEST_CASE("hurst parameter is checked") {
    CHECK_THROWS_AS(HurstParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(HurstParam(1.0), std::invalid_argument);
    CHECK_THROWS_AS(HurstParam(1.2), std::invalid_argument);
    CHECK(HurstParam(0.3).regime() == Regime::sub);
    CHECK(HurstParam(0.5).regime() == Regime::brownian);
    CHECK(HurstParam(0.7).regime() == Regime::super);
}

TEST_CASE("fbm covariance: diagonal and symmetry") {
    for (double h : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const HurstParam H(h);
        for (double t : {0.1, 0.5, 1.0, 2.5}) {
            CHECK(fbm_covariance(H, t, t) == doctest::Approx(std::pow(t, 2 * h)).epsilon(1e-14));
            for (double s : {0.05, 0.4, 1.7}) CHECK(fbm_covariance(H, t, s) == fbm_covariance(H, s, t));
        }
    }
    CHECK(fbm_covariance(HurstParam(0.5), 0.3, 0.8) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("brownian branch is exact") {
    const HurstParam h(0.5);
    CHECK(kernel_K(h, 1.0, 0.3) == 1.0);
    CHECK(kernel_L(h, 1.0, 0.3) == 1.0);
    CHECK_THROWS(normalizing_constant_cH(h));
}

TEST_CASE("pointwise kernel reproduces the covariance") {
    for (double h : {0.3, 0.7}) {
        const HurstParam H(h);
        for (auto [t, s] : {std::pair{1.0, 1.0}, {1.0, 0.6}, {0.8, 0.25}}) {
            INFO("h=" << h << " t=" << t << " s=" << s);
            CHECK(isometry_integral(H, t, s) == doctest::Approx(fbm_covariance(H, t, s)).epsilon(1e-6));
        }
    }
}

TEST_CASE("branch continuity near one half") {
    for (double h : {0.5 - 1e-3, 0.5 + 1e-3}) {
        const HurstParam H(h);
        for (double r : {0.2, 0.35, 0.5, 0.65, 0.8}) {
            CHECK(std::abs(kernel_K(H, 1.0, r) - 1.0) < 1e-2);
            CHECK(std::abs(kernel_L(H, 1.0, r) - 1.0) < 1e-2);
        }
    }
}

TEST_CASE("isometry defect at 256 steps and its decrease under refinement") {
    for (double h : {0.3, 0.7}) {
        const HurstParam H(h);
        const double d256 = verify_isometry(kernel_matrix_K(H, TimeGrid(1.0, 256)), H);
        const double d512 = verify_isometry(kernel_matrix_K(H, TimeGrid(1.0, 512)), H);
        INFO("h=" << h << " defects " << d256 << " " << d512);
        CHECK(d256 <= 1e-2);
        CHECK(d256 / d512 >= 1.5);
    }
    CHECK(verify_isometry(kernel_matrix_K(HurstParam(0.5), TimeGrid(1.0, 64)), HurstParam(0.5)) < 1e-14);
}

TEST_CASE("isometry defect is monotone in the grid size") {
    for (double h : {0.3, 0.5, 0.7}) {
        const HurstParam H(h);
        double prev = INFINITY;
        for (int n : {32, 64, 128}) {
            const double d = verify_isometry(kernel_matrix_K(H, TimeGrid(1.0, n)), H);
            CHECK(d <= prev * 1.1);
            prev = d;
        }
    }
}

TEST_CASE("fast discretization agrees with generic per-cell quadrature") {
    const HurstParam H(0.7);
    const TimeGrid g(1.0, 16);
    const KernelMatrix fast = kernel_matrix_K(H, g, ActionMode::density, OriginCell::average);
    const KernelMatrix slow = discretize_kernel([&](double t, double s) { return kernel_K(H, t, s); }, g,
                                                ActionMode::density, {0.5 - 0.7, 0.7 - 0.5}, {});
    CHECK(slow.failed_cells.empty());
    CHECK((fast.entries - slow.entries).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("discrete inverse of the brownian kernel is differencing") {
    const TimeGrid g(1.0, 8);
    const KernelMatrix K = kernel_matrix_K(HurstParam(0.5), g);
    const KernelMatrix L = discrete_inverse_L(K);
    // Increment action: a path is rebuilt from its increments by the lower-triangular ones.
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(8, 8).triangularView<Eigen::Lower>();
    CHECK((L.entries - ones).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("discrete inverse undoes the kernel on random increments") {
    for (double h : {0.3, 0.7}) {
        const TimeGrid g(1.0, 64);
        const KernelMatrix K = kernel_matrix_K(HurstParam(h), g);
        const KernelMatrix L = discrete_inverse_L(K);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> nd;
        double worst = 0;
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd dw(64);
            for (auto& v : dw) v = nd(rng);
            const Eigen::VectorXd z = K.apply_increments(dw);
            Eigen::VectorXd dz(64);
            for (int i = 0; i < 64; ++i) dz(i) = z(i + 1) - z(i);
            const Eigen::VectorXd w = L.apply_increments(dz);
            for (int i = 0; i < 64; ++i) worst = std::max(worst, std::abs(w(i + 1) - w(i) - dw(i)));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("analytic and discrete inverse kernels agree on fBm paths") {
    for (double h : {0.3, 0.7}) {
        double gap[2];
        for (int r = 0; r < 2; ++r) {
            const TimeGrid g(1.0, 128 << r);
            const KernelMatrix K = kernel_matrix_K(HurstParam(h), g);
            const KernelMatrix La = kernel_matrix_L(HurstParam(h), g);
            const KernelMatrix Ld = discrete_inverse_L(K);
            const SamplePath z = volterra_from_bm(K, sample_bm(g, 1, 3, 0));
            const Eigen::VectorXd dz = z.increments();
            const Eigen::VectorXd wd = Ld.apply_increments(dz);
            gap[r] = (La.apply_increments(dz) - wd).cwiseAbs().maxCoeff() / wd.cwiseAbs().maxCoeff();
        }
        INFO("h=" << h << " relative gaps " << gap[0] << " " << gap[1]);
        CHECK(gap[1] < gap[0]);
        CHECK(gap[1] < 2e-2);
    }
}

TEST_CASE("singular quadrature") {
    const QuadResult r = integrate_singular([](double, double xa, double) { return std::pow(xa, -0.7); }, 0.0, 1.0,
                                            -0.7, 0.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 0.3).epsilon(1e-10));
    const QuadResult both = integrate_singular(
        [](double, double xa, double xb) { return std::pow(xa, -0.4) * std::pow(xb, -0.6); }, 0.0, 1.0, -0.4, -0.6);
    CHECK(both.value == doctest::Approx(boost::math::beta(0.6, 0.4)).epsilon(1e-9));
    CHECK(gauss_fixed([](double x) { return x * x * x * x; }, 0.0, 2.0, 3) == doctest::Approx(32.0 / 5));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value == doctest::Approx(std::expm1(1.0)));
}

TEST_CASE("incomplete beta building blocks against boost") {
    using boost::math::beta;
    for (double a : {0.3, 0.8, 1.7})
        for (double b : {0.2, 0.5, 1.4})
            for (double x : {0.05, 0.4, 0.93}) {
                INFO(a << " " << b << " " << x);
                CHECK(special::upper_beta(a, b, x) == doctest::Approx(boost::math::betac(a, b, x)).epsilon(1e-12));
                CHECK(special::lower_beta(a, b, x, 1 - x) == doctest::Approx(beta(a, b, x)).epsilon(1e-12));
            }
    // Negative parameters: compare with direct quadrature.
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double x : {0.1, 0.5, 0.9}) {
        const double a = -0.3, b = 0.6;
        const double direct = ts.integrate([&](double v) { return std::pow(v, a - 1) * std::pow(1 - v, b - 1); }, x, 1.0);
        CHECK(special::upper_beta_neg_a(a, b, x, 1 - x) == doctest::Approx(direct).epsilon(1e-9));
        const double tail = ts.integrate([&](double v) { return std::pow(1 - v, b - 1) / v; }, x, 1.0);
        CHECK(special::log_beta_tail(b, x, 1 - x) == doctest::Approx(tail).epsilon(1e-9));
        const double lb = ts.integrate([&](double u) { return std::pow(u, 0.7 - 1) * std::pow(1 - u, -0.4 - 1); }, 0.0, x);
        CHECK(special::lower_beta(0.7, -0.4, x, 1 - x) == doctest::Approx(lb).epsilon(1e-9));
    }
}
}
