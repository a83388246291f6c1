#include <doctest.h>

#include <cmath>
#include <random>

#include "volterra/chaos.hpp"
#include "volterra/experiments.hpp"

using namespace volterra;

namespace {

GaussianLaw random_law(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = nd(rng);
    GaussianLaw g;
    g.mean = Eigen::VectorXd(d);
    for (auto& v : g.mean) v = nd(rng);
    g.cov = A * A.transpose() + 0.05 * Eigen::MatrixXd::Identity(d, d);
    return g;
}

GaussianLaw scalar_law(double m, double v) {
    GaussianLaw g;
    g.mean = Eigen::VectorXd::Constant(1, m);
    g.cov = Eigen::MatrixXd::Constant(1, 1, v);
    return g;
}

}  // namespace

TEST_SUITE("chaos") {
TEST_CASE("gaussian relative entropy") {
    CHECK(gaussian_entropy(scalar_law(0, 1), scalar_law(0, 2)) ==
          doctest::Approx(0.5 * (0.5 - 1 + std::log(2.0))).epsilon(1e-14));
    CHECK(gaussian_entropy(scalar_law(1, 1), scalar_law(0, 1)) == doctest::Approx(0.5));
    std::mt19937_64 rng(1);
    const GaussianLaw g = random_law(rng, 4);
    CHECK(std::abs(gaussian_entropy(g, g)) < 1e-12);
}

TEST_CASE("wasserstein: one-dimensional closed form and commuting case") {
    CHECK(gaussian_wasserstein2(scalar_law(1, 4), scalar_law(-1, 1)) == doctest::Approx(std::sqrt(4.0 + 1.0)));
    GaussianLaw a, b;
    a.mean = b.mean = Eigen::VectorXd::Zero(3);
    a.cov = Eigen::Vector3d(1, 4, 9).asDiagonal();
    b.cov = Eigen::Vector3d(4, 1, 9).asDiagonal();
    CHECK(gaussian_wasserstein2(a, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("wasserstein: symmetry and triangle inequality on random triples") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 1 + rep % 4;
        const GaussianLaw x = random_law(rng, d), y = random_law(rng, d), z = random_law(rng, d);
        const double xy = gaussian_wasserstein2(x, y), yx = gaussian_wasserstein2(y, x);
        const double xz = gaussian_wasserstein2(x, z), yz = gaussian_wasserstein2(y, z);
        CHECK(xy == doctest::Approx(yx).epsilon(1e-9));
        CHECK(xz <= xy + yz + 1e-9);
        CHECK(gaussian_wasserstein2(x, x) < 1e-6);
    }
}

TEST_CASE("matrix exponential of the fOU drift matrix") {
    for (int n : {1, 3, 8})
        for (double r : {0.1, 1.0, 2.5})
            CHECK((fou_exp_closed_form(-1.0, -0.5, n, r) - fou_exp_numeric(-1.0, -0.5, n, r)).cwiseAbs().maxCoeff() <
                  1e-12);
}

TEST_CASE("fOU variances") {
    FouParams p;
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
        const XiEta v = fou_xi_eta(p, t);
        CHECK(v.xi > 0);
        CHECK(v.eta > 0);
        CHECK(v.eta < v.xi);
    }
    FouParams slow;
    slow.a = 1e-9;
    slow.b = 0.0;
    for (double t : {0.5, 1.0, 2.0}) CHECK(fou_xi_eta(slow, t).xi == doctest::Approx(std::pow(t, 1.4)).epsilon(1e-6));
    FouParams bad;
    bad.h = HurstParam(0.3);
    CHECK_THROWS(bad.validate());
    bad.h = HurstParam(0.7);
    bad.a = 1;
    bad.b = -1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("fOU system covariance structure") {
    FouParams p;
    const GaussianLaw law = fou_system_covariance(p, 4, 1.0);
    const XiEta v = fou_xi_eta(p, 1.0);
    CHECK(law.cov(0, 0) == doctest::Approx(v.xi + (v.eta - v.xi) / 4));
    CHECK(law.cov(1, 2) == doctest::Approx((v.eta - v.xi) / 4));
}

TEST_CASE("fOU rate limit") {
    FouParams p;
    const FouLimit lim = fou_limit(p, 2, 1.0, {8, 16, 32, 64, 100, 200, 400, 800});
    CHECK(lim.monotone);
    CHECK(lim.last_ratio == doctest::Approx(1.0).epsilon(0.05));
    FouParams none = p;
    none.b = 0.0;
    for (const auto& row : fou_rate_limit(none, 2, 1.0, {8, 64})) {
        CHECK(row.w2_scaled == 0.0);
        CHECK(row.limit == 0.0);
        CHECK(row.entropy == doctest::Approx(0.0).epsilon(1e-12));
    }
    // k = n: the marginal is the whole system.
    const auto full = fou_rate_limit(p, 6, 1.0, {6});
    const GaussianLaw sys = fou_system_covariance(p, 6, 1.0);
    GaussianLaw prod = sys;
    prod.cov = fou_xi_eta(p, 1.0).xi * Eigen::MatrixXd::Identity(6, 6);
    CHECK(full[0].w2_scaled == doctest::Approx(std::pow(gaussian_wasserstein2(sys, prod), 2)).epsilon(1e-10));
    CHECK(full[0].entropy == doctest::Approx(gaussian_entropy(sys, prod)).epsilon(1e-10));
}

TEST_CASE("hierarchy base cases") {
    for (double gamma : {0.5, 1.0})
        for (int k : {1, 2, 4})
            for (double t : {0.5, 1.0, 2.0}) {
                const HierarchyAB ab = hierarchy_AB(gamma, k, k, t);
                CHECK(std::abs(ab.A - (1 - std::exp(-gamma * k * t))) <= 1e-10);
                CHECK(std::abs(ab.B - std::exp(-gamma * k * t)) <= 1e-10);
            }
}

TEST_CASE("hierarchy recursion against the pure-birth closed forms") {
    for (double gamma : {0.5, 1.0})
        for (int k : {1, 2})
            for (int l : {k + 1, k + 5, 20}) {
                const HierarchyAB num = hierarchy_AB(gamma, k, l, 1.0);
                const HierarchyAB cf = hierarchy_AB_closed_form(gamma, k, l, 1.0);
                CHECK(std::abs(num.A - cf.A) < 1e-6);
                CHECK(std::abs(num.B - cf.B) < 1e-6);
            }
}

TEST_CASE("hierarchy bounds on the full grid") {
    const HierarchyCheck c = hierarchy_check({1, 2, 4}, 64, {0.5, 1.0, 2.0}, {0.5, 1.0});
    CHECK(c.max_a_excess <= 1e-12);
    CHECK(c.max_sum_ratio <= 1.0);
    CHECK(c.base_case_error <= 1e-10);
    CHECK(c.pass);
}

TEST_CASE("chaos bound") {
    HierarchyInputs zero;
    zero.n = 16;
    zero.k = 2;
    const ChaosBound z = chaos_bound(zero);
    CHECK(z.bound == 0.0);
    HierarchyInputs in = zero;
    in.M = 0.1;
    in.C0 = 0.0;
    const ChaosBound b = chaos_bound(in);
    CHECK(b.bound > 0);
    CHECK(b.initial_terms.size() == 14);
    double sum = b.top_term;
    for (std::size_t i = 0; i < b.initial_terms.size(); ++i) sum += b.initial_terms[i] + b.forcing_terms[i];
    CHECK(b.bound == doctest::Approx(sum));
    HierarchyInputs bad = in;
    bad.k = 20;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("relative entropy between drifted laws") {
    const TimeGrid g(1.0, 64);
    const DriftSpec same = markov_drift([](double, double x) { return -x; });
    const EntropyEstimate zero = entropy_between_laws(same, same, HurstParam(0.7), g, 200, 1);
    CHECK(zero.estimate == 0.0);
    const EntropyCheck bm = entropy_check(HurstParam(0.5), 1.0, 0.25, 1.0, 64, 2000, 3);
    CHECK(bm.oracle == doctest::Approx(0.5 * 0.75 * 0.75));
    CHECK(bm.pass);
    const EntropyEstimate pos = entropy_between_laws(same, markov_drift([](double, double x) { return -2 * x; }),
                                                     HurstParam(0.3), g, 500, 4);
    CHECK(pos.estimate > 0);
}

TEST_CASE("fOU chaos constants are positive and the bound dominates") {
    const ChaosRate r = chaos_rate(FouParams{}, 2, 1.0, {16, 32}, 64, 500, 7);
    CHECK(r.constants.gamma > 0);
    CHECK(r.constants.M > 0);
    CHECK(r.dominance_pass);
}
}
