#include "volterra/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace volterra {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* expected) {
    throw std::invalid_argument(key + ": expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad(key, v, "a number");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad(key, v, "an integer");
    return x;
}

std::string num(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::kinds() {
    static const std::vector<std::string> k{"kernels-check", "transform-roundtrip", "mimic-verify", "entropy-check",
                                            "chaos-rate",    "fou-limit",           "tree-local"};
    return k;
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& kind) {
    if (std::find(kinds().begin(), kinds().end(), kind) == kinds().end())
        throw std::invalid_argument("experiment: unknown kind '" + kind + "'");
    ExperimentConfig c;
    c.kind = kind;
    if (kind == "transform-roundtrip") c.steps = 512;
    if (kind == "entropy-check") c.hurst = 0.5;
    if (kind == "chaos-rate") {
        c.steps = 128;
        c.samples = 2000;
    }
    if (kind == "fou-limit") c.n_list = {8, 16, 32, 64, 100, 200, 400, 800};
    if (kind == "tree-local") {
        c.steps = 64;
        c.train = 2000;
    }
    if (kind == "mimic-verify") c.samples = 4000;
    return c;
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in), v = trim(value_in);
    if (key == "kind") {
        kind = v;
    } else if (key == "hurst") {
        hurst = to_double(key, v);
    } else if (key == "T") {
        T = to_double(key, v);
    } else if (key == "steps") {
        steps = int(to_int(key, v));
    } else if (key == "theta") {
        theta = to_double(key, v);
    } else if (key == "a") {
        a = to_double(key, v);
    } else if (key == "b") {
        b = to_double(key, v);
    } else if (key == "c1") {
        c1 = to_double(key, v);
    } else if (key == "c2") {
        c2 = to_double(key, v);
    } else if (key == "t") {
        t = to_double(key, v);
    } else if (key == "k") {
        k = int(to_int(key, v));
    } else if (key == "n_list") {
        n_list.clear();
        std::istringstream in(v);
        for (std::string part; std::getline(in, part, ',');) n_list.push_back(int(to_int(key, trim(part))));
    } else if (key == "kappa") {
        kappa = int(to_int(key, v));
    } else if (key == "depth") {
        depth = int(to_int(key, v));
    } else if (key == "boundary") {
        if (v != "frozen" && v != "free") bad(key, v, "frozen or free");
        boundary = v;
    } else if (key == "coupling") {
        coupling = to_double(key, v);
    } else if (key == "self_rate") {
        self_rate = to_double(key, v);
    } else if (key == "samples") {
        samples = int(to_int(key, v));
    } else if (key == "train") {
        train = int(to_int(key, v));
    } else if (key == "replications") {
        replications = int(to_int(key, v));
    } else if (key == "paths") {
        paths = int(to_int(key, v));
    } else if (key == "mc_steps") {
        mc_steps = int(to_int(key, v));
    } else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) bad(key, v, "a nonnegative integer");
        seed = std::uint64_t(s);
    } else if (key == "workers") {
        workers = int(to_int(key, v));
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path);
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void ExperimentConfig::validate() const {
    require(std::find(kinds().begin(), kinds().end(), kind) != kinds().end(), "kind: unknown experiment '" + kind + "'");
    require(hurst > 0.0 && hurst < 1.0, "hurst must lie in (0, 1), got " + num(hurst));
    require(T > 0.0, "T must be positive");
    require(steps >= 16, "steps must be at least 16, got " + std::to_string(steps));
    require(mc_steps >= 16, "mc_steps must be at least 16");
    require(t > 0.0, "t must be positive");
    require(k >= 1, "k must be at least 1");
    require(!n_list.empty(), "n_list must not be empty");
    for (int n : n_list) require(n >= k && n >= 2, "n_list entries must be at least max(k, 2)");
    require(kappa >= 2, "kappa must be at least 2");
    require(depth >= 3, "depth must be at least 3 (the truncation allowance uses depth - 1)");
    require(samples >= 2, "samples must be at least 2");
    require(paths >= 1, "paths must be positive");
    require(workers >= 0, "workers must be nonnegative");
    if (kind == "chaos-rate" || kind == "fou-limit") {
        require(hurst > 0.5, "hurst must exceed 1/2 for the fOU example, got " + num(hurst));
        require(a + b != 0.0, "a + b must be nonzero");
    }
    if (kind == "mimic-verify") {
        require(train >= 500, "train must be at least 500");
        require(steps % 4 == 0, "steps must be divisible by 4 for mimic-verify");
    }
    if (kind == "tree-local") {
        require(train >= 1000, "train must be at least 1000");
        require(replications >= 2, "replications must be at least 2");
    }
}

std::string ExperimentConfig::canonical() const {
    std::map<std::string, std::string> kv{
        {"kind", kind},          {"hurst", num(hurst)},
        {"T", num(T)},           {"steps", std::to_string(steps)},
        {"theta", num(theta)},   {"a", num(a)},
        {"b", num(b)},           {"c1", num(c1)},
        {"c2", num(c2)},         {"t", num(t)},
        {"k", std::to_string(k)}, {"kappa", std::to_string(kappa)},
        {"depth", std::to_string(depth)}, {"boundary", boundary},
        {"coupling", num(coupling)}, {"self_rate", num(self_rate)},
        {"samples", std::to_string(samples)}, {"train", std::to_string(train)},
        {"replications", std::to_string(replications)}, {"paths", std::to_string(paths)},
        {"mc_steps", std::to_string(mc_steps)}, {"seed", std::to_string(seed)},
    };
    std::string nl;
    for (std::size_t i = 0; i < n_list.size(); ++i) nl += (i ? "," : "") + std::to_string(n_list[i]);
    kv["n_list"] = nl;
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

}  // namespace volterra
