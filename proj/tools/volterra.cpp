// Command line front end: one subcommand per experiment, CSV results plus a manifest.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "volterra/config.hpp"
#include "volterra/csv.hpp"
#include "volterra/experiments.hpp"
#include "volterra/parallel.hpp"

namespace fs = std::filesystem;
using namespace volterra;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
    int steps = 0;
    double hurst = 0.0;
    bool sequential = false;
};

void progress(const std::string& msg) { std::cerr << "[volterra] " << msg << std::endl; }

// Files written by the current run; removed again if the run fails.
class Outputs {
public:
    explicit Outputs(const fs::path& dir) : dir_(dir) {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_dir_ = true;
        }
    }
    std::string file(const std::string& name) {
        const fs::path p = dir_ / name;
        files_.push_back(p);
        return p.string();
    }
    void discard() {
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    }
    const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool created_dir_ = false;
};

void write_manifest(Outputs& out, const ExperimentConfig& cfg, const Manifest& m) {
    std::ofstream f(out.file("manifest.txt"));
    for (const auto& l : m.lines()) f << l << '\n';
    f << "workers=" << worker_count() << '\n';
    f << "sequential=" << (cfg.sequential ? 1 : 0) << '\n';
    if (!f) throw std::runtime_error("cannot write manifest");
}

bool run_kernels_check(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    const HurstParam h(c.hurst);
    progress("isometry defect at " + std::to_string(c.steps) + " and " + std::to_string(2 * c.steps) + " steps");
    const KernelsCheck r = kernels_check(h, c.T, c.steps);
    CsvWriter w(out.file("isometry.csv"), m, {"steps", "defect", "relative_defect"});
    for (const auto& row : r.rows) {
        w << row.steps << row.defect << row.relative_defect;
        w.end_row();
    }
    w.close();
    write_kernel_matrix(out.file("kernel_K.csv"), kernel_matrix_K(h, TimeGrid(c.T, c.steps)), m);
    std::cout << "kernels-check relative_defect=" << r.rows[0].relative_defect << " shrink=" << r.shrink
              << " pass=" << r.pass << '\n';
    return r.pass;
}

bool run_transform_roundtrip(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    progress("Q roundtrip and fundamental roundtrip");
    const TransformRoundtrip r = transform_roundtrip(HurstParam(c.hurst), c.T, c.steps, c.paths, c.seed);
    CsvWriter w(out.file("q_roundtrip.csv"), m, {"drift", "steps", "relative_error"});
    for (const auto& row : r.rows) {
        w << row.drift << row.steps << row.relative_error;
        w.end_row();
    }
    w.close();
    CsvWriter f(out.file("fundamental.csv"), m, {"quantity", "value", "tolerance"});
    f << "exact_roundtrip" << r.fundamental.exact_error << 1e-8;
    f.end_row();
    f << "analytic_roundtrip" << r.fundamental.analytic_error << 5e-2;
    f.end_row();
    f << "noise_recovery" << r.fundamental.noise_error << 5e-2;
    f.end_row();
    f.close();
    std::cout << "transform-roundtrip q_pass=" << r.q_pass << " fundamental_pass=" << r.fundamental_pass << '\n';
    return r.q_pass && r.fundamental_pass;
}

bool run_mimic_verify(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    MimicSettings s;
    s.theta = c.theta;
    s.T = c.T;
    s.steps = c.steps;
    s.mc_steps = c.mc_steps;
    s.train = c.train;
    s.samples = c.samples;
    s.seed = c.seed;
    progress("linear-Gaussian oracle and Monte Carlo mimicking");
    const MimicVerify r = mimic_verify(HurstParam(c.hurst), s);
    CsvWriter w(out.file("oracle.csv"), m, {"steps", "relative_gap", "condition_number"});
    for (const auto& row : r.oracle) {
        w << row.steps << row.relative_gap << row.condition_number;
        w.end_row();
    }
    w.close();
    CsvWriter k(out.file("checkpoints.csv"), m,
                {"time", "ks_statistic", "ks_p_value", "mean_gap", "mean_gap_se", "var_gap", "var_gap_se"});
    for (const auto& cp : r.checkpoints) {
        k << cp.time << cp.ks_statistic << cp.ks_p_value << cp.mean_gap << cp.mean_gap_se << cp.var_gap
          << cp.var_gap_se;
        k.end_row();
    }
    k.close();
    std::cout << "mimic-verify oracle_pass=" << r.oracle_pass << " ks_pass=" << r.ks_pass << '\n';
    return r.oracle_pass && r.ks_pass;
}

bool run_entropy_check(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    progress("entropy between constant-drift laws");
    const EntropyCheck r = entropy_check(HurstParam(c.hurst), c.c1, c.c2, c.T, c.steps, c.samples, c.seed);
    CsvWriter w(out.file("entropy.csv"), m,
                {"estimate", "std_error", "samples", "excluded", "oracle", "continuum", "allowance"});
    w << r.estimate.estimate << r.estimate.std_error << r.estimate.samples << r.estimate.excluded << r.oracle
      << r.continuum << r.allowance;
    w.end_row();
    w.close();
    std::cout << "entropy-check estimate=" << r.estimate.estimate << " oracle=" << r.oracle << " pass=" << r.pass
              << '\n';
    return r.pass;
}

FouParams fou_params(const ExperimentConfig& c) {
    FouParams p;
    p.h = HurstParam(c.hurst);
    p.a = c.a;
    p.b = c.b;
    return p;
}

bool run_chaos_rate(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    progress("fOU chaos rate, constants from " + std::to_string(c.samples) + " paths");
    const ChaosRate r = chaos_rate(fou_params(c), c.k, c.t, c.n_list, c.steps, c.samples, c.seed);
    CsvWriter w(out.file("chaos_rate.csv"), m,
                {"n", "k", "t", "w2_scaled", "limit", "gaussian_entropy", "chaos_bound"});
    for (const auto& row : r.rows) {
        w << row.n << row.k << row.t << row.w2_scaled << row.limit << row.gaussian_entropy << row.chaos_bound;
        w.end_row();
    }
    w.close();
    CsvWriter k(out.file("chaos_constants.csv"), m, {"gamma", "M", "M_std_error", "samples", "entropy_slope"});
    k << r.constants.gamma << r.constants.M << r.constants.M_std_error << r.constants.samples << r.entropy_slope;
    k.end_row();
    k.close();
    std::cout << "chaos-rate entropy_slope=" << r.entropy_slope << " slope_pass=" << r.slope_pass
              << " dominance_pass=" << r.dominance_pass << '\n';
    return r.slope_pass && r.dominance_pass;
}

bool run_fou_limit(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    progress("fOU scaled Wasserstein distance");
    const FouLimit r = fou_limit(fou_params(c), c.k, c.t, c.n_list);
    CsvWriter w(out.file("fou_limit.csv"), m, {"n", "k", "t", "w2_scaled", "w2_display", "limit", "ratio", "entropy"});
    for (const auto& row : r.rows) {
        w << row.n << row.k << row.t << row.w2_scaled << row.w2_display << row.limit
          << (row.limit != 0 ? row.w2_scaled / row.limit : 1.0) << row.entropy;
        w.end_row();
    }
    w.close();
    std::cout << "fou-limit last_ratio=" << r.last_ratio << " monotone=" << r.monotone << " pass=" << r.pass << '\n';
    return r.pass;
}

bool run_tree_local(const ExperimentConfig& c, const Manifest& m, Outputs& out) {
    TreeSettings s;
    s.kappa = c.kappa;
    s.depth = c.depth;
    s.T = c.T;
    s.steps = c.steps;
    s.replications = c.replications;
    s.train = c.train;
    s.self_rate = c.self_rate;
    s.coupling = c.coupling;
    s.seed = c.seed;
    s.boundary = c.boundary == "free" ? BoundaryPolicy::free : BoundaryPolicy::frozen;
    progress("tree and local equation, " + std::to_string(c.replications) + " replications each");
    const TreeLocal r = tree_local(HurstParam(c.hurst), s);
    CsvWriter w(out.file("tree_local.csv"), m, {"time", "coordinate", "statistic", "value", "std_error"});
    for (const auto& row : r.gaps) {
        w << row.time << row.coordinate << row.statistic << row.value << row.std_error;
        w.end_row();
    }
    for (const auto& row : r.allowance) {
        if (row.statistic == "ks") continue;
        w << row.time << row.coordinate << "truncation_" + row.statistic << row.value << row.std_error;
        w.end_row();
    }
    w.close();
    std::cout << "tree-local checked=" << r.agreement.checked << " failed=" << r.agreement.failed
              << " worst_ratio=" << r.agreement.worst_ratio << " pass=" << r.pass << '\n';
    return r.pass;
}

int run(const std::string& kind, const Options& o) {
    ExperimentConfig cfg = ExperimentConfig::defaults_for(kind);
    if (!o.config.empty()) cfg.load_file(o.config);
    cfg.kind = kind;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.seed_given) cfg.seed = o.seed;
    if (o.steps > 0) cfg.steps = o.steps;
    if (o.hurst != 0.0) cfg.hurst = o.hurst;
    if (!o.out.empty()) cfg.out = o.out;
    cfg.sequential = o.sequential;
    cfg.validate();
    set_worker_count(cfg.sequential ? 1 : cfg.workers);

    Manifest m;
    m.config_text = cfg.canonical();
    m.seed = cfg.seed;
    Outputs out(cfg.out);
    try {
        write_manifest(out, cfg, m);
        bool pass = false;
        if (kind == "kernels-check") pass = run_kernels_check(cfg, m, out);
        if (kind == "transform-roundtrip") pass = run_transform_roundtrip(cfg, m, out);
        if (kind == "mimic-verify") pass = run_mimic_verify(cfg, m, out);
        if (kind == "entropy-check") pass = run_entropy_check(cfg, m, out);
        if (kind == "chaos-rate") pass = run_chaos_rate(cfg, m, out);
        if (kind == "fou-limit") pass = run_fou_limit(cfg, m, out);
        if (kind == "tree-local") pass = run_tree_local(cfg, m, out);
        progress(pass ? "thresholds met" : "threshold failure");
        return pass ? 0 : 2;
    } catch (...) {
        out.discard();
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra-kernel calculus for fractional Brownian motion: checks and experiments"};
    app.require_subcommand(1);
    Options o;
    std::string chosen;
    for (const auto& kind : ExperimentConfig::kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed")->each([&](const std::string&) { o.seed_given = true; });
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--steps", o.steps, "number of time steps");
        sub->add_option("--hurst", o.hurst, "Hurst parameter");
        sub->add_option("--set", o.sets, "override any config key (key=value), repeatable");
        sub->add_flag("--sequential", o.sequential, "single worker, bit-identical reruns");
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        return run(chosen, o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
