#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "volterra/drift.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"

namespace volterra {

// KL(law1 | law2) between multivariate Gaussians. law2 may be jittered once (1e-12 trace / k);
// throws if it is still singular.
double gaussian_entropy(const GaussianLaw& law1, const GaussianLaw& law2);

// Bures-Wasserstein distance W2 (not squared). Commuting covariances skip the matrix square root.
double gaussian_wasserstein2(const GaussianLaw& law1, const GaussianLaw& law2);

struct EntropyEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int samples = 0;
    int excluded = 0;
};

// Monte Carlo under P^1 of H0 + 1/2 ∫_0^T |Q^{b1} - Q^{b2}|^2 ds along paths of the SDE with
// drift b1 and fBm noise from the kernel sampler. Drifts are single (b0 only), dimension one.
EntropyEstimate entropy_between_laws(const DriftSpec& b1, const DriftSpec& b2, HurstParam h, const TimeGrid& grid,
                                     int n_samples, std::uint64_t seed, double initial_entropy = 0.0,
                                     double x0 = 0.0);

struct FouParams {
    HurstParam h{0.7};
    double a = 1.0;
    double b = 0.5;
    void validate() const;  // h > 1/2, a + b != 0
};

struct XiEta {
    double xi = 0.0;
    double eta = 0.0;
};

// xi(t) = C_H ∬_{[0,t]^2} e^{-a(u+v)} |u-v|^{2H-2} du dv with C_H = H(2H-1), eta with rate a + b.
// The double integral is reduced to C_H ∫_0^t w^{2H-2} e^{-a w} (1 - e^{-2a(t-w)}) / a dw.
XiEta fou_xi_eta(const FouParams& p, double t);

// Sigma_t^n = xi I + (eta - xi) J / n over the n particles at time t.
GaussianLaw fou_system_covariance(const FouParams& p, int n, double t);

// e^{r A_n} for A_n = a I + (b/n) J in closed form, and by a generic matrix exponential.
Eigen::MatrixXd fou_exp_closed_form(double a, double b, int n, double r);
Eigen::MatrixXd fou_exp_numeric(double a, double b, int n, double r);

struct FouRateRow {
    int n = 0;
    int k = 0;
    double t = 0.0;
    double w2_scaled = 0.0;   // n^2/k^2 W2^2 from the Bures formula on the k-marginal
    double w2_display = 0.0;  // n^2/k^2 [(xi + (k/n)(eta - xi))^{1/2} - xi^{1/2}]^2
    double limit = 0.0;       // xi c^2 / 4, c = (eta - xi)/xi
    double entropy = 0.0;     // exact KL(P^{(n,k)}_t | mu_t^{⊗k})
};
std::vector<FouRateRow> fou_rate_limit(const FouParams& p, int k, double t, const std::vector<int>& n_list);

struct HierarchyAB {
    double A = 0.0;
    double B = 0.0;
};

// Each level is F_k(t) = gamma k ∫_0^t e^{-gamma k (t-s)} F_{k+1}(s) ds, started from
// A_l^l(s) = 1 - e^{-gamma l s} and B_l^l(s) = e^{-gamma l s}; the integral is taken exactly
// against the piecewise-linear interpolant of F_{k+1} on a uniform grid of `points` cells.
// All intermediate values stay in [0, 1], so the products of gamma j never form.
HierarchyAB hierarchy_AB(double gamma, int k, int l, double t, int points = 2048);

// A_k^l(t) and B_k^l(t) for all 1 <= k <= l <= l_max at once; index [k][l].
struct HierarchyTable {
    std::vector<std::vector<double>> A, B;
};
HierarchyTable hierarchy_table(double gamma, int l_max, double t, int points = 2048);

// Pure-birth closed forms used as independent checks: B_k^l = C(l-1, k-1) e^{-gamma k t}
// (1 - e^{-gamma t})^{l-k} and A_k^l = 1 - sum_{m=k}^{l} B_k^m.
HierarchyAB hierarchy_AB_closed_form(double gamma, int k, int l, double t);

struct HierarchyInputs {
    double gamma = 1.0;
    double M = 0.0;
    double C0 = 0.0;
    double T = 1.0;
    int n = 2;
    int k = 1;
    void validate() const;
};

struct ChaosBound {
    double bound = 0.0;               // iterated Gronwall sum
    std::vector<double> initial_terms;  // B_k^l(T) C0 l^2/n^2, l = k..n-1
    std::vector<double> forcing_terms;  // (l-1)^2 T M / (gamma (n-1)^2) A_k^l(T)
    double top_term = 0.0;            // A_k^{n-1}(T) (C0 + n M / 2)
    double packaged = 0.0;            // e^{3 gamma T}/n^2 (2 C0 k^2 + 5 M T k^3) + (C0 + M n T) e^{-2n(e^{-gamma T} - k/n)_+^2}
};
ChaosBound chaos_bound(const HierarchyInputs& in);

// Constants of the fOU system for chaos_bound. The interaction -b <mu, y_t> has Q-transform
// -b <mu, Q^y_t>, a linear functional of a Gaussian path law, so
// |<nu - mu, Q>|^2 <= 2 b^2 Var_mu(Q^Y_t) H(nu | mu) and gamma = 2 b^2 sup_t Var_mu(Q^Y_t);
// M = b^2 ∫_0^T E|Q^Y_s|^2 ds. Y is the mean-field solution, which for x0 = 0 is the fOU with
// rate a; both moments are Monte Carlo estimates over `samples` paths.
struct ChaosConstants {
    double gamma = 0.0;
    double M = 0.0;
    double M_std_error = 0.0;
    int samples = 0;
};
ChaosConstants fou_chaos_constants(const FouParams& p, const TimeGrid& grid, int samples, std::uint64_t seed);

}  // namespace volterra
