#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "volterra/kernels.hpp"
#include "volterra/mimic.hpp"
#include "volterra/paths.hpp"
#include "volterra/sde.hpp"

namespace volterra {

const char* library_version();

// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

// Written as '#'-prefixed lines at the top of every CSV; the first line always carries the hash
// of the canonical config text.
struct Manifest {
    std::string config_text;  // canonical key=value lines
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> extra;

    std::string config_hash() const { return hex64(fnv1a(config_text)); }
    std::vector<std::string> lines() const;
};

class CsvWriter {
public:
    CsvWriter(const std::string& path, const Manifest& manifest, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(std::uint64_t v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(const std::string& v);
    CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
    void end_row();
    void close();
    const std::string& path() const { return path_; }

private:
    void sep();
    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0, filled_ = 0;
};

// Row-major entries; the grid and action mode go in a '#' line before the header.
void write_kernel_matrix(const std::string& path, const KernelMatrix& k, const Manifest& m);
KernelMatrix read_kernel_matrix(const std::string& path);

// Long format: path_id, time, dim_0 .. dim_{d-1}.
void write_paths(const std::string& path, const std::vector<SamplePath>& paths, const Manifest& m);
std::vector<SamplePath> read_paths(const std::string& path);

// replication_id, particle_id, time, value_0 ...
void write_ensembles(const std::string& path, const std::vector<Ensemble>& reps, const Manifest& m);

// One row per fitted term: time_index, time, term (intercept or feature index), value, std_error.
void write_estimator(const std::string& path, const ConditionalDriftEstimator& est, const Manifest& m);

}  // namespace volterra
