#include <doctest.h>

#include <cmath>

#include "volterra/experiments.hpp"
#include "volterra/stats.hpp"
#include "volterra/tree.hpp"

using namespace volterra;

namespace {

// b0(x) = -x with an interaction that is identically zero.
DriftSpec no_interaction() {
    DriftSpec d = markov_drift([](double, double x) { return -x; });
    d.kind = DriftSpec::Kind::pairwise;
    d.b = [](double, const PathPrefix&, const PathPrefix&, double* out) { out[0] = 0.0; };
    return d;
}

}  // namespace

TEST_SUITE("tree_local") {
TEST_CASE("tree construction") {
    const TruncatedTree path = TruncatedTree::build(2, 4);
    CHECK(path.size() == 9);
    const TruncatedTree t = TruncatedTree::build(3, 3);
    CHECK(t.size() == 1 + 3 + 6 + 12);
    CHECK(t.parent[0] == -1);
    CHECK(t.neighbors[0] == std::vector<int>{1, 2, 3});
    for (int v = 0; v < t.size(); ++v) {
        if (t.on_boundary(v))
            CHECK(t.neighbors[v].size() == 1);
        else
            CHECK(t.neighbors[v].size() == 3);
        if (v > 0) CHECK(t.level[v] == t.level[t.parent[v]] + 1);
    }
    CHECK_THROWS(TruncatedTree::build(1, 3));
}

TEST_CASE("no interaction: every vertex solves its own equation") {
    const TimeGrid g(1.0, 16);
    const FbmNoise noise(HurstParam(0.7), g);
    const DriftSpec d = no_interaction();
    const TruncatedTree tree = TruncatedTree::build(2, 3);
    const TreeSample s = simulate_tree(tree, d, noise, 4, 9, 0.5);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.5);
    for (int v = 0; v < tree.size(); ++v) {
        const SamplePath alone = euler_solve(d, x0, noise.sample(1, 4, (std::uint64_t(9) << 32) | std::uint64_t(v)));
        CHECK((s[v].values - alone.values).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("root children are exchangeable") {
    const TimeGrid g(1.0, 32);
    const FbmNoise noise(HurstParam(0.5), g);
    const TruncatedTree tree = TruncatedTree::build(2, 4);
    const auto reps = simulate_tree_replications(tree, linear_tree_drift(1.0, 0.8), noise, 3, 2000);
    std::vector<double> a, b;
    for (const auto& s : reps) {
        a.push_back(s[1].values(g.n, 0));
        b.push_back(s[2].values(g.n, 0));
    }
    CHECK(ks_two_sample(a, b).p_value >= 0.01);
}

TEST_CASE("root variance settles as the depth grows") {
    const TimeGrid g(1.0, 32);
    const FbmNoise noise(HurstParam(0.7), g);
    std::vector<double> var;
    std::vector<double> se;
    for (int depth : {2, 3, 4}) {
        const auto reps = simulate_tree_replications(TruncatedTree::build(2, depth), linear_tree_drift(1.0, 0.8),
                                                     noise, 5, 4000);
        std::vector<double> root;
        for (const auto& s : reps) root.push_back(s[0].values(g.n, 0));
        const MeanVar mv = mean_var(root);
        var.push_back(mv.var);
        se.push_back(mv.var_se);
    }
    // Common noise across depths: the change from 3 to 4 is below the change from 2 to 3.
    CHECK(std::abs(var[2] - var[1]) <= std::abs(var[1] - var[0]) + 3 * se[2]);
    CHECK(std::abs(var[2] - var[1]) <= 3 * se[2]);
}

TEST_CASE("identical inputs compare to zero") {
    const TimeGrid g(1.0, 16);
    const FbmNoise noise(HurstParam(0.5), g);
    const auto reps = simulate_tree_replications(TruncatedTree::build(2, 3), linear_tree_drift(1.0, 0.8), noise, 1, 50);
    for (const auto& row : compare_root_ball(reps, reps, 2)) {
        if (row.statistic == "ks")
            CHECK(row.value == 0.0);
        else
            CHECK(row.value == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
    }
    const AgreementReport rep = root_ball_agreement(compare_root_ball(reps, reps, 2), {});
    CHECK(rep.failed == 0);
    CHECK(rep.checked > 0);
}

TEST_CASE("gamma: interaction-free drift fits zero, coefficients stable across halves") {
    const TimeGrid g(1.0, 32);
    const HurstParam h(0.5);
    const FbmNoise noise(h, g);
    const TruncatedTree tree = TruncatedTree::build(2, 4);

    const DriftSpec free = no_interaction();
    const auto fr = simulate_tree_replications(tree, free, noise, 2, 1000);
    const GammaModel zero = estimate_gamma(fr, tree, free, h, g);
    for (int i : {8, 32}) {
        CHECK(zero.fits[i].intercept == 0.0);
        CHECK(zero.fits[i].coef.cwiseAbs().maxCoeff() == 0.0);
    }

    const DriftSpec lin = linear_tree_drift(1.0, 0.8);
    const auto a = simulate_tree_replications(tree, lin, noise, 10, 1500);
    const auto b = simulate_tree_replications(tree, lin, noise, 11, 1500);
    const GammaModel ga = estimate_gamma(a, tree, lin, h, g), gb = estimate_gamma(b, tree, lin, h, g);
    for (int i : {16, 32}) {
        for (int c = 0; c < ga.fits[i].coef.size(); ++c) {
            const double gap = ga.fits[i].coef(c) - gb.fits[i].coef(c);
            CHECK(std::abs(gap) <= 3 * std::hypot(ga.fits[i].coef_se(c), gb.fits[i].coef_se(c)));
        }
        CHECK(std::abs(ga.tower_gap[i]) < 1e-10);
        CHECK(ga.fitted_var[i] <= ga.target_var[i] * (1 + 1e-12));
    }
    CHECK_THROWS(estimate_gamma(std::vector<TreeSample>(a.begin(), a.begin() + 400), tree, lin, h, g));
}

TEST_CASE("local equation: decoupling and neighbour exchangeability") {
    const TimeGrid g(1.0, 32);
    const HurstParam h(0.7);
    const FbmNoise noise(h, g);
    const TruncatedTree tree = TruncatedTree::build(2, 4);
    const DriftSpec lin = linear_tree_drift(1.0, 0.8);
    const GammaModel gamma = estimate_gamma(simulate_tree_replications(tree, lin, noise, 1, 1200), tree, lin, h, g);

    LocalConfig cfg;
    cfg.seed = 6;
    cfg.streams = {50, 51, 52};
    const TreeSample a = simulate_local_equation(gamma, lin, 2, noise, cfg);
    cfg.streams = {50, 52, 51};
    const TreeSample b = simulate_local_equation(gamma, lin, 2, noise, cfg);
    CHECK(a[0].values == b[0].values);
    CHECK(a[1].values == b[2].values);
    CHECK(a[2].values == b[1].values);

    const auto reps = simulate_local_replications(gamma, lin, 2, noise, 8, 2000);
    std::vector<double> n1, n2;
    for (const auto& s : reps) {
        n1.push_back(s[1].values(g.n, 0));
        n2.push_back(s[2].values(g.n, 0));
    }
    CHECK(ks_two_sample(n1, n2).p_value >= 0.01);

    // No interaction: the local coordinates are independent single equations.
    const DriftSpec free = no_interaction();
    const GammaModel g0 = estimate_gamma(simulate_tree_replications(tree, free, noise, 1, 1000), tree, free, h, g);
    const TreeSample s = simulate_local_equation(g0, free, 2, noise, cfg);
    for (int c = 0; c < 3; ++c) {
        const SamplePath alone = euler_solve(free, Eigen::VectorXd::Zero(1), noise.sample(1, 6, cfg.streams[c]));
        CHECK((s[c].values - alone.values).cwiseAbs().maxCoeff() < 1e-14);
    }
}
}
