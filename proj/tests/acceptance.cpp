// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "volterra/experiments.hpp"
#include "volterra/parallel.hpp"

using namespace volterra;

namespace {

int failures = 0;

void report(int id, const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!ok) ++failures;
    std::printf("criterion %d %s: %s (%s) [%.1fs]\n", id, name.c_str(), ok ? "PASS" : "FAIL", detail.str().c_str(),
                secs);
    std::fflush(stdout);
}

}  // namespace

int main() {
    set_worker_count(0);

    report(1, "kernel isometry", [](std::ostringstream& d) {
        bool ok = true;
        for (double h : {0.3, 0.7}) {
            const KernelsCheck r = kernels_check(HurstParam(h), 1.0, 256);
            d << "h=" << h << " rel=" << r.rows[0].relative_defect << " shrink=" << r.shrink << "; ";
            ok = ok && r.pass;
        }
        return ok;
    });

    std::vector<TransformRoundtrip> trips;
    for (double h : {0.3, 0.7}) trips.push_back(transform_roundtrip(HurstParam(h), 1.0, 512, 20, 11));

    report(2, "fundamental roundtrip", [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& r : trips) {
            d << "exact=" << r.fundamental.exact_error << " analytic=" << r.fundamental.analytic_error
              << " noise=" << r.fundamental.noise_error << "; ";
            ok = ok && r.fundamental_pass;
        }
        return ok;
    });

    report(3, "Q roundtrip", [&](std::ostringstream& d) {
        bool ok = true;
        double worst = 0;
        for (const auto& r : trips) {
            for (const auto& row : r.rows)
                if (row.steps == 512) worst = std::max(worst, row.relative_error);
            ok = ok && r.q_pass;
        }
        d << "worst relative error at 512 steps=" << worst;
        return ok;
    });

    report(4, "mimicking", [](std::ostringstream& d) {
        bool ok = true;
        for (double h : {0.3, 0.5, 0.7}) {
            const MimicVerify r = mimic_verify(HurstParam(h), MimicSettings{});
            double min_p = 1;
            for (const auto& c : r.checkpoints) min_p = std::min(min_p, c.ks_p_value);
            d << "h=" << h << " gap=" << r.oracle.back().relative_gap << " min KS p=" << min_p << "; ";
            ok = ok && r.oracle_pass && r.ks_pass;
        }
        return ok;
    });

    report(5, "entropy identity", [](std::ostringstream& d) {
        bool ok = true;
        for (double h : {0.5, 0.7}) {
            const EntropyCheck r = entropy_check(HurstParam(h), 1.0, 0.25, 1.0, 256, 10000, 21);
            d << "h=" << h << " estimate=" << r.estimate.estimate << " se=" << r.estimate.std_error
              << " oracle=" << r.oracle << "; ";
            ok = ok && r.pass;
        }
        return ok;
    });

    report(6, "fOU rate", [](std::ostringstream& d) {
        const FouLimit lim = fou_limit(FouParams{}, 2, 1.0, {8, 16, 32, 64, 100, 200, 400, 800});
        const ChaosRate rate = chaos_rate(FouParams{}, 2, 1.0, {8, 16, 32, 64}, 128, 2000, 31);
        d << "ratio at n=800=" << lim.last_ratio << " monotone=" << lim.monotone << " entropy slope=" << rate.entropy_slope
          << " bound dominates=" << rate.dominance_pass;
        return lim.pass && rate.slope_pass && rate.dominance_pass;
    });

    report(7, "hierarchy bounds", [](std::ostringstream& d) {
        const HierarchyCheck c = hierarchy_check({1, 2, 4}, 64, {0.5, 1.0, 2.0}, {0.5, 1.0});
        d << "A excess=" << c.max_a_excess << " sum ratio=" << c.max_sum_ratio << " base error=" << c.base_case_error;
        return c.pass;
    });

    report(8, "tree and local equation", [](std::ostringstream& d) {
        bool ok = true;
        for (double h : {0.5, 0.7}) {
            const TreeLocal r = tree_local(HurstParam(h), TreeSettings{});
            d << "h=" << h << " checked=" << r.agreement.checked << " failed=" << r.agreement.failed
              << " worst ratio=" << r.agreement.worst_ratio << "; ";
            ok = ok && r.pass;
        }
        return ok;
    });

    report(9, "fBm law", [](std::ostringstream& d) {
        bool ok = true;
        for (double h : {0.3, 0.7}) {
            const FbmLawCheck r = fbm_law_check(HurstParam(h), 1.0, 64, 10000, 41);
            d << "h=" << h << " worst z=" << r.worst_z << " failed=" << r.failed << "/" << r.checked << "; ";
            ok = ok && r.pass;
        }
        return ok;
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
