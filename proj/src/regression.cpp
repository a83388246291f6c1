#include "volterra/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace volterra {

RidgeFit ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double penalty) {
    const int N = int(X.rows()), p = int(X.cols());
    if (y.size() != N) throw std::invalid_argument("ridge_fit: X and y disagree in length");
    if (N < 2) throw std::invalid_argument("ridge_fit: need at least two samples");
    RidgeFit fit;
    fit.samples = N;
    const Eigen::RowVectorXd xm = X.colwise().mean();
    const double ym = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;
    Eigen::MatrixXd G = Xc.transpose() * Xc;
    const double tr = p > 0 ? G.trace() / p : 0.0;

    auto solve = [&](double pen, Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
        Eigen::MatrixXd A = G;
        A.diagonal().array() += pen;
        ldlt.compute(A);
        const auto d = ldlt.vectorD().cwiseAbs();
        return p == 0 || (ldlt.info() == Eigen::Success && d.minCoeff() > 1e-12 * std::max(d.maxCoeff(), 1e-300));
    };
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    fit.penalty = penalty;
    if (!solve(penalty, ldlt)) {
        fit.penalty = std::max(penalty * 100, 1e-8 * std::max(tr, 1e-300));
        fit.penalty_raised = true;
        if (!solve(fit.penalty, ldlt)) fit.rank_deficient = true;
    }
    fit.coef = p > 0 ? Eigen::VectorXd(ldlt.solve(Xc.transpose() * yc)) : Eigen::VectorXd();
    fit.intercept = ym - (p > 0 ? xm.dot(fit.coef) : 0.0);
    const Eigen::VectorXd res = p > 0 ? Eigen::VectorXd(yc - Xc * fit.coef) : yc;
    const double sst = yc.squaredNorm(), sse = res.squaredNorm();
    fit.r2 = sst > 0 ? 1.0 - sse / sst : 1.0;
    fit.residual_var = sse / std::max(1, N - p - 1);
    if (p > 0) {
        const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
        fit.coef_se = (fit.residual_var * inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
        fit.intercept_se = std::sqrt(fit.residual_var * (1.0 / N + xm * inv * xm.transpose()));
    } else {
        fit.intercept_se = std::sqrt(fit.residual_var / N);
    }
    return fit;
}

}  // namespace volterra
