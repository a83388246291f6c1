#include "volterra/csv.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace volterra {

const char* library_version() { return "0.1.0"; }

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::string> Manifest::lines() const {
    std::vector<std::string> out;
    out.push_back("config_hash=" + config_hash());
    out.push_back("library_version=" + std::string(library_version()));
    out.push_back("seed=" + std::to_string(seed));
    std::istringstream in(config_text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back("config." + line);
    for (const auto& [k, v] : extra) out.push_back(k + "=" + v);
    return out;
}

CsvWriter::CsvWriter(const std::string& path, const Manifest& manifest, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& l : manifest.lines()) out_ << "# " << l << '\n';
    for (std::size_t c = 0; c < header.size(); ++c) out_ << (c ? "," : "") << header[c];
    out_ << '\n';
}

void CsvWriter::sep() {
    if (filled_ > 0) out_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
    sep();
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out_.write(buf, r.ptr - buf);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        std::ostringstream os;
        os << path_ << ": row has " << filled_ << " fields, header has " << columns_;
        throw std::logic_error(os.str());
    }
    out_ << '\n';
    filled_ = 0;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write to " + path_ + " failed");
    out_.close();
}

namespace {

std::string num(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) end = line.size();
        double x = 0.0;
        auto r = std::from_chars(line.data() + pos, line.data() + end, x);
        if (r.ec != std::errc()) throw std::runtime_error("bad number in CSV row: " + line);
        v.push_back(x);
        pos = end + 1;
    }
    return v;
}

// Returns the '#' lines (without the marker) and numeric rows after the header.
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> comments;
    std::vector<std::vector<double>> rows;
    bool header = false;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
            continue;
        }
        if (!header) {
            header = true;
            continue;
        }
        rows.push_back(parse_row(line));
    }
    return {comments, rows};
}

}  // namespace

void write_kernel_matrix(const std::string& path, const KernelMatrix& k, const Manifest& m) {
    Manifest mm = m;
    mm.extra.emplace_back("grid", "T=" + num(k.grid.T) + ";n=" + std::to_string(k.grid.n) + ";mode=" +
                                      (k.mode == ActionMode::density ? "density" : "increment"));
    std::vector<std::string> header;
    for (int j = 0; j < k.entries.cols(); ++j) header.push_back("cell_" + std::to_string(j));
    CsvWriter w(path, mm, header);
    for (int r = 0; r < k.entries.rows(); ++r) {
        for (int j = 0; j < k.entries.cols(); ++j) w << k.entries(r, j);
        w.end_row();
    }
    w.close();
}

KernelMatrix read_kernel_matrix(const std::string& path) {
    auto [comments, rows] = read_numeric(path);
    KernelMatrix k;
    bool found = false;
    for (const auto& c : comments) {
        if (c.rfind("grid=", 0) != 0) continue;
        std::map<std::string, std::string> kv;
        std::istringstream in(c.substr(5));
        for (std::string part; std::getline(in, part, ';');) {
            const auto eq = part.find('=');
            if (eq != std::string::npos) kv[part.substr(0, eq)] = part.substr(eq + 1);
        }
        k.grid = TimeGrid(std::stod(kv.at("T")), std::stoi(kv.at("n")));
        k.mode = kv.at("mode") == "density" ? ActionMode::density : ActionMode::increment;
        found = true;
    }
    if (!found) throw std::runtime_error(path + ": missing grid line");
    if (int(rows.size()) != k.grid.n) throw std::runtime_error(path + ": row count differs from grid");
    k.entries.resize(k.grid.n, k.grid.n);
    for (int r = 0; r < k.grid.n; ++r) {
        if (int(rows[r].size()) != k.grid.n) throw std::runtime_error(path + ": ragged row");
        for (int j = 0; j < k.grid.n; ++j) k.entries(r, j) = rows[r][j];
    }
    return k;
}

void write_paths(const std::string& path, const std::vector<SamplePath>& paths, const Manifest& m) {
    if (paths.empty()) throw std::invalid_argument("write_paths: nothing to write");
    const int dim = paths.front().dim();
    std::vector<std::string> header{"path_id", "time"};
    for (int d = 0; d < dim; ++d) header.push_back("dim_" + std::to_string(d));
    Manifest mm = m;
    mm.extra.emplace_back("grid", "T=" + num(paths.front().grid.T) + ";n=" + std::to_string(paths.front().grid.n));
    CsvWriter w(path, mm, header);
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const SamplePath& s = paths[p];
        for (int i = 0; i <= s.grid.n; ++i) {
            w << int(p) << s.grid.t(i);
            for (int d = 0; d < dim; ++d) w << s.values(i, d);
            w.end_row();
        }
    }
    w.close();
}

std::vector<SamplePath> read_paths(const std::string& path) {
    auto [comments, rows] = read_numeric(path);
    std::vector<SamplePath> out;
    std::vector<std::vector<std::vector<double>>> grouped;
    for (const auto& r : rows) {
        if (r.size() < 3) throw std::runtime_error(path + ": path rows need path_id, time and a value");
        const auto id = std::size_t(r[0]);
        if (id >= grouped.size()) grouped.resize(id + 1);
        grouped[id].push_back(r);
    }
    for (const auto& g : grouped) {
        if (g.size() < 2) throw std::runtime_error(path + ": path with fewer than two points");
        const int n = int(g.size()) - 1, dim = int(g.front().size()) - 2;
        SamplePath s(TimeGrid(g.back()[1], n), dim);
        for (int i = 0; i <= n; ++i)
            for (int d = 0; d < dim; ++d) s.values(i, d) = g[i][2 + d];
        out.push_back(std::move(s));
    }
    return out;
}

void write_ensembles(const std::string& path, const std::vector<Ensemble>& reps, const Manifest& m) {
    if (reps.empty() || reps.front().particles.empty()) throw std::invalid_argument("write_ensembles: nothing to write");
    const int dim = reps.front().particles.front().dim();
    std::vector<std::string> header{"replication_id", "particle_id", "time"};
    for (int d = 0; d < dim; ++d) header.push_back("value_" + std::to_string(d));
    CsvWriter w(path, m, header);
    for (std::size_t r = 0; r < reps.size(); ++r)
        for (std::size_t p = 0; p < reps[r].particles.size(); ++p) {
            const SamplePath& s = reps[r].particles[p];
            for (int i = 0; i <= s.grid.n; ++i) {
                w << int(r) << int(p) << s.grid.t(i);
                for (int d = 0; d < dim; ++d) w << s.values(i, d);
                w.end_row();
            }
        }
    w.close();
}

void write_estimator(const std::string& path, const ConditionalDriftEstimator& est, const Manifest& m) {
    CsvWriter w(path, m, {"time_index", "time", "term", "value", "std_error"});
    for (int i = 0; i < int(est.fits.size()); ++i) {
        const RidgeFit& f = est.fits[i];
        w << i << est.grid.t(i) << "intercept" << f.intercept << f.intercept_se;
        w.end_row();
        for (int c = 0; c < f.coef.size(); ++c) {
            w << i << est.grid.t(i) << std::to_string(c) << f.coef(c) << f.coef_se(c);
            w.end_row();
        }
    }
    w.close();
}

}  // namespace volterra
