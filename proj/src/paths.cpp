#include "volterra/paths.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace volterra {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), std::uint32_t(sub), std::uint32_t(sub >> 32), 0x5eedu};
    return std::mt19937_64(seq);
}

SamplePath::SamplePath(const TimeGrid& g, int dim, double x0) : grid(g), values(g.n + 1, dim) {
    values.setConstant(x0);
}

Eigen::VectorXd SamplePath::increments(int d) const {
    const int n = grid.n;
    return values.col(d).tail(n) - values.col(d).head(n);
}

void GaussianLaw::validate() const {
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
        throw std::invalid_argument("GaussianLaw: mean and covariance sizes differ");
    const double tr = cov.trace();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, std::abs(tr)))
        throw std::invalid_argument("GaussianLaw: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::abs(tr))
        throw std::invalid_argument("GaussianLaw: covariance is not positive semidefinite");
}

SamplePath sample_bm(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t stream) {
    SamplePath p(grid, dim, 0.0);
    auto rng = make_stream(seed, stream);
    std::normal_distribution<double> nd(0.0, std::sqrt(grid.dt()));
    for (int d = 0; d < dim; ++d)
        for (int i = 0; i < grid.n; ++i) p.values(i + 1, d) = p.values(i, d) + nd(rng);
    return p;
}

SamplePath volterra_from_bm(const KernelMatrix& kmat, const SamplePath& bm) {
    if (!(kmat.grid == bm.grid)) throw std::invalid_argument("volterra_from_bm: grid mismatch");
    SamplePath z(bm.grid, bm.dim(), 0.0);
    for (int d = 0; d < bm.dim(); ++d) z.values.col(d) = kmat.apply_increments(bm.increments(d));
    return z;
}

Eigen::MatrixXd fbm_grid_covariance(HurstParam h, const TimeGrid& grid) {
    const int n = grid.n;
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) R(i, j) = R(j, i) = fbm_covariance(h, grid.t(i + 1), grid.t(j + 1));
    return R;
}

FbmCholeskySampler::FbmCholeskySampler(HurstParam h, const TimeGrid& grid) : grid_(grid) {
    Eigen::MatrixXd R = fbm_grid_covariance(h, grid);
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) {
        R.diagonal().array() += 1e-12 * R.trace() / grid.n;
        jittered_ = true;
        llt.compute(R);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
            std::ostringstream os;
            os << "fBm covariance Cholesky failed after jitter; smallest eigenvalue " << es.eigenvalues().minCoeff()
               << "; consider a larger jitter";
            throw std::runtime_error(os.str());
        }
    }
    chol_ = llt.matrixL();
}

SamplePath FbmCholeskySampler::sample(int dim, std::uint64_t seed, std::uint64_t stream) const {
    SamplePath p(grid_, dim, 0.0);
    auto rng = make_stream(seed, stream);
    std::normal_distribution<double> nd;
    Eigen::VectorXd xi(grid_.n);
    for (int d = 0; d < dim; ++d) {
        for (int i = 0; i < grid_.n; ++i) xi(i) = nd(rng);
        p.values.col(d).tail(grid_.n) = chol_.triangularView<Eigen::Lower>() * xi;
    }
    return p;
}

SamplePath sample_fbm_cholesky(HurstParam h, const TimeGrid& grid, int dim, std::uint64_t seed,
                               std::uint64_t stream) {
    return FbmCholeskySampler(h, grid).sample(dim, seed, stream);
}

double rkhs_norm(HurstParam h, const TimeGrid& grid, const Eigen::VectorXd& q, double up_to) {
    if (q.size() != grid.n + 1) throw std::invalid_argument("rkhs_norm: q must have n + 1 entries");
    const double dt = grid.dt();
    const int k = int(std::lround(up_to / dt));
    if (k < 0 || k > grid.n || std::abs(k * dt - up_to) > 1e-9 * grid.T)
        throw std::invalid_argument("rkhs_norm: up_to must be a grid point");
    if (k == 0) return 0.0;
    const double pe = 0.5 - h.value();
    double s = q(1) * q(1) * dt / (2.0 - 2.0 * h.value());
    const GaussRule& g = gauss_legendre(8);
    for (int i = 1; i < k; ++i) {
        const double t0 = grid.t(i), t1 = grid.t(i + 1);
        const double r0 = q(i) * std::pow(t0, -pe), r1 = q(i + 1) * std::pow(t1, -pe);
        double cell = 0.0;
        for (int m = 0; m < 8; ++m) {
            const double w = 0.5 * (1 + g.x[m]);
            const double r = r0 + (r1 - r0) * w;
            cell += g.w[m] * std::pow(t0 + w * dt, 2 * pe) * r * r;
        }
        s += 0.5 * dt * cell;
    }
    return std::sqrt(s);
}

namespace {
Eigen::MatrixXd stack(const std::vector<SamplePath>& paths, int coord) {
    if (paths.size() < 2) throw std::invalid_argument("empirical_covariance: need at least two paths");
    const int p = paths.front().grid.n + 1;
    Eigen::MatrixXd X(paths.size(), p);
    for (std::size_t r = 0; r < paths.size(); ++r) {
        if (!(paths[r].grid == paths.front().grid))
            throw std::invalid_argument("empirical_covariance: paths on different grids");
        X.row(r) = paths[r].values.col(coord).transpose();
    }
    return X;
}
}  // namespace

GaussianLaw empirical_covariance(const std::vector<SamplePath>& paths, int coord) {
    Eigen::MatrixXd X = stack(paths, coord);
    GaussianLaw law;
    law.mean = X.colwise().mean().transpose();
    X.rowwise() -= law.mean.transpose();
    law.cov = X.transpose() * X / double(X.rows() - 1);
    return law;
}

Eigen::MatrixXd covariance_standard_errors(const std::vector<SamplePath>& paths, int coord) {
    Eigen::MatrixXd X = stack(paths, coord);
    const double N = double(X.rows());
    X.rowwise() -= X.colwise().mean();
    const Eigen::MatrixXd C = X.transpose() * X / N;
    const Eigen::MatrixXd X2 = X.cwiseProduct(X);
    // E[(xa xb)^2] for all pairs in one product
    const Eigen::MatrixXd M4 = X2.transpose() * X2 / N;
    Eigen::MatrixXd se = (M4 - C.cwiseProduct(C)).cwiseMax(0.0) / N;
    return se.cwiseSqrt();
}

}  // namespace volterra
