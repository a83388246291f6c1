#include "volterra/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "volterra/parallel.hpp"
#include "volterra/stats.hpp"
#include "volterra/transforms.hpp"

namespace volterra {

KernelsCheck kernels_check(HurstParam h, double T, int steps) {
    KernelsCheck out;
    const double maxR = std::pow(T, 2 * h.value());
    for (int n : {steps, 2 * steps}) {
        const TimeGrid grid(T, n);
        const double d = verify_isometry(kernel_matrix_K(h, grid), h);
        out.rows.push_back({n, d, d / maxR});
    }
    const double d1 = out.rows[0].defect, d2 = out.rows[1].defect;
    out.shrink = d2 > 0 ? d1 / d2 : std::numeric_limits<double>::infinity();
    out.pass = out.rows[0].relative_defect <= 1e-2 && (d1 == 0.0 || out.shrink >= 1.5);
    return out;
}

std::vector<TestDrift> roundtrip_drifts() {
    return {
        {"constant", [](double) { return 1.0; }},
        {"linear", [](double t) { return t; }},
        {"sine", [](double t) { return std::sin(2 * std::numbers::pi * t); }},
        {"path", [](double t) { return std::exp(-t) * std::cos(5 * t) + 0.3 * std::sin(11 * t); }},
    };
}

TransformRoundtrip transform_roundtrip(HurstParam h, double T, int steps, int paths, std::uint64_t seed) {
    TransformRoundtrip out;
    const auto drifts = roundtrip_drifts();
    out.q_pass = true;
    for (const auto& d : drifts) {
        double err[2];
        for (int r = 0; r < 2; ++r) {
            const TimeGrid grid(T, steps << r);
            Eigen::VectorXd b(grid.n + 1);
            for (int i = 0; i <= grid.n; ++i) b(i) = d.b(grid.t(i));
            const Eigen::VectorXd back = inverse_q(h, q_transform(h, b, grid).q, grid);
            err[r] = (back - b).norm() / b.norm();
            out.rows.push_back({d.name, grid.n, err[r]});
        }
        const bool halving = err[0] < 1e-10 || err[0] / err[1] >= 1.6;
        out.q_pass = out.q_pass && err[0] <= 5e-2 && halving;
    }

    const TimeGrid grid(T, steps);
    const KernelMatrix K = kernel_matrix_K(h, grid);
    const KernelMatrix L = kernel_matrix_L(h, grid);
    const KernelMatrix Lhat = discrete_inverse_L(K);
    const double dt = grid.dt();
    std::vector<FundamentalRoundtrip> per(paths);
    parallel_for(paths, [&](int p) {
        const SamplePath W = sample_bm(grid, 1, seed, std::uint64_t(p));
        const SamplePath Z = volterra_from_bm(K, W);
        SamplePath X(grid, 1, 0.3);
        double drift = 0.0;
        for (int i = 1; i <= grid.n; ++i) {
            drift += std::sin(2 * std::numbers::pi * grid.t(i - 1)) * dt;
            X.values(i, 0) = 0.3 + drift + Z.values(i, 0);
        }
        const double xs = X.values.cwiseAbs().maxCoeff(), ws = W.values.cwiseAbs().maxCoeff();
        per[p].exact_error = (from_fundamental(K, to_fundamental(Lhat, X)).values - X.values).cwiseAbs().maxCoeff();
        per[p].analytic_error =
            (from_fundamental(K, to_fundamental(L, X)).values - X.values).cwiseAbs().maxCoeff() / xs;
        per[p].noise_error = (to_fundamental(L, Z).values - W.values).cwiseAbs().maxCoeff() / ws;
    });
    for (const auto& f : per) {
        out.fundamental.exact_error = std::max(out.fundamental.exact_error, f.exact_error);
        out.fundamental.analytic_error = std::max(out.fundamental.analytic_error, f.analytic_error);
        out.fundamental.noise_error = std::max(out.fundamental.noise_error, f.noise_error);
    }
    out.fundamental_pass = out.fundamental.exact_error <= 1e-8 && out.fundamental.analytic_error <= 5e-2 &&
                           out.fundamental.noise_error <= 5e-2;
    return out;
}

MimicVerify mimic_verify(HurstParam h, const MimicSettings& s) {
    MimicVerify out;
    for (int n : {s.steps / 4, s.steps / 2, s.steps}) {
        const auto o = linear_gaussian_oracle(s.theta, h, TimeGrid(s.T, n));
        out.oracle.push_back({n, o.relative_gap, o.condition_number});
    }
    out.oracle_pass = out.oracle.back().relative_gap <= 0.02;
    for (std::size_t r = 1; r < out.oracle.size(); ++r)
        out.oracle_pass = out.oracle_pass && out.oracle[r].relative_gap < out.oracle[r - 1].relative_gap;
    if (!s.run_monte_carlo) return out;

    const TimeGrid grid(s.T, s.mc_steps);
    FeatureMap features;
    features.full_prefix = true;
    const auto est = fit_conditional_q(linear_gaussian_training(s.theta, h, grid, 0.0, s.train, s.seed), features);
    const KernelMatrix kdens = kernel_matrix_K(h, grid, ActionMode::density);
    const auto original = linear_gaussian_training(s.theta, h, grid, 0.0, s.samples, s.seed + 1);
    const FbmNoise noise(h, grid, NoiseMethod::kernel);
    std::vector<SamplePath> a(s.samples), b(s.samples);
    parallel_for(s.samples, [&](int m) {
        a[m] = original[m].x;
        b[m] = simulate_mimicked(est, kdens, 0.0, noise.sample(1, s.seed + 2, std::uint64_t(m)));
    });
    out.checkpoints = law_distance(a, b);
    out.ks_pass = true;
    for (const auto& c : out.checkpoints) out.ks_pass = out.ks_pass && c.ks_p_value >= 0.01;
    return out;
}

EntropyCheck entropy_check(HurstParam h, double c1, double c2, double T, int steps, int samples,
                           std::uint64_t seed) {
    EntropyCheck out;
    const TimeGrid grid(T, steps);
    const DriftSpec b1 = markov_drift([c1](double, double) { return c1; });
    const DriftSpec b2 = markov_drift([c2](double, double) { return c2; });
    out.estimate = entropy_between_laws(b1, b2, h, grid, samples, seed);
    const double dc = c1 - c2;
    if (h.brownian()) {
        out.oracle = out.continuum = 0.5 * T * dc * dc;
        out.allowance = 1e-12;
    } else {
        const double H = h.value();
        const double kappa = q_of_constant(h, 1.0);
        out.continuum = 0.5 * dc * dc * kappa * kappa * std::pow(T, 2 - 2 * H) / (2 - 2 * H);
        GaussianLaw p1, p2;
        p1.mean.resize(grid.n);
        for (int i = 0; i < grid.n; ++i) p1.mean(i) = dc * grid.t(i + 1);
        p1.cov = fbm_grid_covariance(h, grid);
        p2.mean = Eigen::VectorXd::Zero(grid.n);
        p2.cov = p1.cov;
        out.oracle = gaussian_entropy(p1, p2);
        out.allowance = 1e-2 * out.oracle;
    }
    out.pass = std::abs(out.estimate.estimate - out.oracle) <= 3 * out.estimate.std_error + out.allowance;
    return out;
}

ChaosRate chaos_rate(const FouParams& p, int k, double t, const std::vector<int>& n_list, int steps, int samples,
                     std::uint64_t seed) {
    ChaosRate out;
    out.constants = fou_chaos_constants(p, TimeGrid(t, steps), samples, seed);
    std::vector<double> ns, hs;
    out.dominance_pass = true;
    for (int n : n_list) {
        const FouRateRow r = fou_rate_limit(p, k, t, {n}).front();
        HierarchyInputs in;
        in.gamma = std::max(out.constants.gamma, 1e-12);
        in.M = out.constants.M;
        in.C0 = 0.0;
        in.T = t;
        in.n = n;
        in.k = k;
        const double bound = chaos_bound(in).bound;
        out.rows.push_back({n, k, t, r.w2_scaled, r.limit, r.entropy, bound});
        out.dominance_pass = out.dominance_pass && r.entropy <= bound;
        ns.push_back(n);
        hs.push_back(r.entropy);
    }
    out.entropy_slope = ns.size() >= 2 ? loglog_slope(ns, hs) : 0.0;
    out.slope_pass = out.entropy_slope >= -2.2 && out.entropy_slope <= -1.8;
    return out;
}

FouLimit fou_limit(const FouParams& p, int k, double t, const std::vector<int>& n_list) {
    FouLimit out;
    out.rows = fou_rate_limit(p, k, t, n_list);
    if (out.rows.empty()) return out;
    out.monotone = true;
    for (std::size_t r = 1; r < out.rows.size(); ++r) {
        const double prev = std::abs(out.rows[r - 1].w2_scaled - out.rows[r - 1].limit);
        const double cur = std::abs(out.rows[r].w2_scaled - out.rows[r].limit);
        out.monotone = out.monotone && cur <= prev;
    }
    const auto& last = out.rows.back();
    out.last_ratio = last.limit != 0.0 ? last.w2_scaled / last.limit : (last.w2_scaled == 0.0 ? 1.0 : INFINITY);
    out.pass = out.monotone && out.last_ratio >= 0.95 && out.last_ratio <= 1.05;
    return out;
}

HierarchyCheck hierarchy_check(const std::vector<int>& ks, int l_max, const std::vector<double>& ts,
                               const std::vector<double>& gammas) {
    HierarchyCheck out;
    out.max_a_excess = -std::numeric_limits<double>::infinity();
    for (double g : gammas)
        for (double t : ts) {
            const HierarchyTable tab = hierarchy_table(g, l_max, t);
            for (int k : ks) {
                if (k > l_max) throw std::invalid_argument("hierarchy_check: k above l_max");
                out.base_case_error = std::max({out.base_case_error, std::abs(tab.A[k][k] + std::expm1(-g * k * t)),
                                                std::abs(tab.B[k][k] - std::exp(-g * k * t))});
                double sum = 0.0;
                for (int l = k; l <= l_max; ++l) {
                    const double gap = std::max(0.0, std::exp(-g * t) - double(k) / (l + 1));
                    out.max_a_excess = std::max(out.max_a_excess, tab.A[k][l] - std::exp(-2.0 * (l + 1) * gap * gap));
                    sum += double(l) * l * tab.B[k][l];
                    const HierarchyAB c = hierarchy_AB_closed_form(g, k, l, t);
                    out.closed_form_gap =
                        std::max({out.closed_form_gap, std::abs(c.A - tab.A[k][l]), std::abs(c.B - tab.B[k][l])});
                }
                out.max_sum_ratio = std::max(out.max_sum_ratio, sum / (2.0 * k * k * std::exp(2 * g * t)));
            }
        }
    out.pass = out.max_a_excess <= 1e-12 && out.max_sum_ratio <= 1.0 && out.base_case_error <= 1e-10;
    return out;
}

DriftSpec linear_tree_drift(double self_rate, double coupling) {
    DriftSpec d;
    d.kind = DriftSpec::Kind::pairwise;
    d.b0 = [self_rate](double, const PathPrefix& x, double* out) { out[0] = -self_rate * x.now(); };
    d.b = [coupling](double, const PathPrefix&, const PathPrefix& y, double* out) { out[0] = coupling * y.now(); };
    return d;
}

TreeLocal tree_local(HurstParam h, const TreeSettings& s) {
    TreeLocal out;
    const TimeGrid grid(s.T, s.steps);
    const DriftSpec drift = linear_tree_drift(s.self_rate, s.coupling);
    const FbmNoise noise(h, grid);
    const TruncatedTree deep = TruncatedTree::build(s.kappa, s.depth, s.boundary);
    const TruncatedTree shallow = TruncatedTree::build(s.kappa, s.depth - 1, s.boundary);
    // vertices are numbered breadth first, so the shallow tree reuses the deep tree's noise
    const auto tree = simulate_tree_replications(deep, drift, noise, s.seed, s.replications);
    const auto cut = simulate_tree_replications(shallow, drift, noise, s.seed, s.replications);
    const auto train = simulate_tree_replications(deep, drift, noise, s.seed + 1, s.train);
    out.gamma = estimate_gamma(train, deep, drift, h, grid);
    const auto local = simulate_local_replications(out.gamma, drift, s.kappa, noise, s.seed + 2, s.replications);
    out.gaps = compare_root_ball(tree, local, s.kappa);
    out.allowance = compare_root_ball(tree, cut, s.kappa);
    out.agreement = root_ball_agreement(out.gaps, out.allowance);
    out.pass = out.agreement.failed == 0;
    return out;
}

FbmLawCheck fbm_law_check(HurstParam h, double T, int steps, int samples, std::uint64_t seed) {
    FbmLawCheck out;
    out.samples = samples;
    const TimeGrid grid(T, steps);
    const KernelMatrix K = kernel_matrix_K(h, grid);
    std::vector<SamplePath> paths(samples);
    parallel_for(samples, [&](int m) { paths[m] = volterra_from_bm(K, sample_bm(grid, 1, seed, std::uint64_t(m))); });
    const GaussianLaw emp = empirical_covariance(paths);
    const Eigen::MatrixXd se = covariance_standard_errors(paths);
    std::vector<int> idx;
    for (int c = 1; c <= 4; ++c) idx.push_back(int(std::lround(c * steps / 4.0)));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b) {
            const int i = idx[a], j = idx[b];
            const double r = fbm_covariance(h, grid.t(i), grid.t(j));
            const double z = std::abs(emp.cov(i, j) - r) / se(i, j);
            out.worst_z = std::max(out.worst_z, z);
            ++out.checked;
            if (z > 3.0) ++out.failed;
        }
    out.pass = out.failed == 0;
    return out;
}

}  // namespace volterra
