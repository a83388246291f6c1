#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace volterra {

// Settings of one command line experiment. The text format is one `key = value` per line with
// '#' comments; lists are comma separated. Keys (defaults in config.cpp):
//   hurst, T, steps, theta, a, b, c1, c2, t, k, n_list, kappa, depth, boundary (frozen|free),
//   coupling, self_rate, samples, train, replications, paths, mc_steps, seed, workers
struct ExperimentConfig {
    std::string kind;
    double hurst = 0.7;
    double T = 1.0;
    int steps = 256;
    double theta = 1.0;
    double a = 1.0;
    double b = 0.5;
    double c1 = 1.0;
    double c2 = 0.0;
    double t = 1.0;
    int k = 2;
    std::vector<int> n_list{8, 16, 32, 64};
    int kappa = 2;
    int depth = 4;
    std::string boundary = "frozen";
    double coupling = 0.8;
    double self_rate = 1.0;
    int samples = 10000;
    int train = 6000;
    int replications = 2000;
    int paths = 20;
    int mc_steps = 32;
    std::uint64_t seed = 20240601;
    int workers = 0;  // 0 means available parallelism
    std::string out = "out";
    bool sequential = false;

    static const std::vector<std::string>& kinds();
    // Defaults that differ per experiment (grid sizes, n lists, sample counts).
    static ExperimentConfig defaults_for(const std::string& kind);

    // Throws std::invalid_argument naming the key on unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    // Sorted key=value lines of everything that affects results (not out, workers, sequential).
    std::string canonical() const;
};

}  // namespace volterra
