#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "volterra/config.hpp"
#include "volterra/csv.hpp"
#include "volterra/parallel.hpp"
#include "volterra/regression.hpp"
#include "volterra/stats.hpp"

using namespace volterra;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "volterra_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("stats") {
TEST_CASE("kolmogorov distribution") {
    // Tabulated critical values: Q(1.3581) = 0.05, Q(1.6276) = 0.01.
    CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("ks tests") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> a(5000), b(5000), c(5000);
    for (auto& v : a) v = nd(rng);
    for (auto& v : b) v = nd(rng);
    for (auto& v : c) v = nd(rng) + 0.2;
    CHECK(ks_one_sample(a, normal_cdf).p_value > 0.01);
    CHECK(ks_two_sample(a, b).p_value > 0.01);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
    CHECK(ks_one_sample({0.5}, [](double x) { return x; }).statistic == doctest::Approx(0.5));
}

TEST_CASE("moments and distances") {
    const MeanVar mv = mean_var({1, 2, 3, 4});
    CHECK(mv.mean == 2.5);
    CHECK(mv.var == doctest::Approx(5.0 / 3));
    CHECK(covariance({1, 2, 3}, {2, 4, 6}).cov == doctest::Approx(2.0));
    CHECK(wasserstein1({0, 1, 2}, {0.5, 1.5, 2.5}) == doctest::Approx(0.5));
    CHECK(loglog_slope({1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625}) == doctest::Approx(-2.0));
    CHECK(normal_cdf(0.0) == 0.5);
}
}

TEST_SUITE("regression") {
TEST_CASE("ridge recovers an exact linear model") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    RowMatrix X(500, 3);
    Eigen::VectorXd y(500);
    for (int r = 0; r < 500; ++r) {
        for (int c = 0; c < 3; ++c) X(r, c) = nd(rng);
        y(r) = 0.7 + 2 * X(r, 0) - X(r, 1) + 0.5 * X(r, 2);
    }
    const RidgeFit f = ridge_fit(X, y, 1e-10);
    CHECK(f.intercept == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(f.coef(0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(f.coef(1) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.predict(X.row(3)) == doctest::Approx(y(3)));
}

TEST_CASE("collinear design raises the penalty") {
    Eigen::MatrixXd X(100, 2);
    Eigen::VectorXd y(100);
    for (int r = 0; r < 100; ++r) {
        X(r, 0) = r;
        X(r, 1) = 2.0 * r;
        y(r) = r;
    }
    const RidgeFit f = ridge_fit(X, y, 0.0);
    CHECK(f.penalty_raised);
    CHECK(f.predict(X.row(10)) == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("parallel loop covers every index once and rethrows") {
    set_worker_count(3);
    std::vector<int> hits(1000, 0);
    parallel_for(1000, [&](int i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS(parallel_for(10, [](int i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
    set_worker_count(0);
}
}

TEST_SUITE("csv") {
TEST_CASE("manifest lines start with the config hash") {
    Manifest m;
    m.config_text = "hurst=0.7\nsteps=64\n";
    m.seed = 9;
    const auto lines = m.lines();
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "config_hash=" + m.config_hash());
    CHECK(m.config_hash().size() == 16);
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("writer checks the column count") {
    Manifest m;
    const fs::path p = scratch("cols.csv");
    CsvWriter w(p.string(), m, {"a", "b"});
    w << 1.5 << "x";
    w.end_row();
    w << 2;
    CHECK_THROWS(w.end_row());
    w << 3;
    w.end_row();
    w.close();
    const std::string text = read_all(p);
    CHECK(text.rfind("# config_hash=", 0) == 0);
    CHECK(text.find("a,b\n1.5,x\n2,3\n") != std::string::npos);
}

TEST_CASE("kernel matrix roundtrip") {
    const KernelMatrix k = kernel_matrix_K(HurstParam(0.3), TimeGrid(2.0, 12), ActionMode::density);
    const fs::path p = scratch("kernel.csv");
    write_kernel_matrix(p.string(), k, Manifest{});
    const KernelMatrix back = read_kernel_matrix(p.string());
    CHECK(back.grid == k.grid);
    CHECK(back.mode == ActionMode::density);
    CHECK(back.entries == k.entries);
}

TEST_CASE("paths roundtrip") {
    const TimeGrid g(1.0, 10);
    std::vector<SamplePath> paths{sample_bm(g, 2, 1, 0), sample_bm(g, 2, 1, 1)};
    const fs::path p = scratch("paths.csv");
    write_paths(p.string(), paths, Manifest{});
    const auto back = read_paths(p.string());
    REQUIRE(back.size() == 2);
    CHECK(back[1].values == paths[1].values);
    CHECK(back[0].grid == g);
}
}

TEST_SUITE("config") {
TEST_CASE("hurst outside the unit interval is rejected by name") {
    ExperimentConfig c = ExperimentConfig::defaults_for("kernels-check");
    c.set("hurst", "1.2");
    try {
        c.validate();
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("hurst") != std::string::npos);
    }
}

TEST_CASE("keys and values are checked") {
    ExperimentConfig c = ExperimentConfig::defaults_for("fou-limit");
    CHECK_THROWS_WITH_AS(c.set("hurts", "0.3"), doctest::Contains("hurts"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(c.set("steps", "12x"), doctest::Contains("steps"), std::invalid_argument);
    CHECK_THROWS(ExperimentConfig::defaults_for("nope"));
    c.set("hurst", "0.4");
    CHECK_THROWS_WITH(c.validate(), doctest::Contains("hurst"));
    c.set("n_list", "8, 16,32");
    CHECK(c.n_list == std::vector<int>{8, 16, 32});
}

TEST_CASE("file loading and canonical text") {
    const fs::path p = scratch("exp.cfg");
    {
        std::ofstream out(p);
        out << "# tree run\nhurst = 0.5   # brownian\n\nsteps=32\nboundary = free\n";
    }
    ExperimentConfig c = ExperimentConfig::defaults_for("tree-local");
    c.load_file(p.string());
    CHECK(c.hurst == 0.5);
    CHECK(c.steps == 32);
    CHECK(c.boundary == "free");
    c.validate();
    ExperimentConfig d = c;
    d.out = "elsewhere";
    d.workers = 3;
    CHECK(c.canonical() == d.canonical());
    d.seed += 1;
    CHECK(c.canonical() != d.canonical());
    CHECK(c.canonical().find("hurst=0.5\n") != std::string::npos);
}
}
