#pragma once

#include <Eigen/Dense>
#include <string>

namespace volterra {

// Design matrices are filled row by row through raw pointers, so they are stored row-major.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RidgeFit {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    Eigen::VectorXd coef_se;  // homoscedastic standard errors
    double intercept_se = 0.0;
    double r2 = 0.0;
    double residual_var = 0.0;
    double penalty = 0.0;  // the penalty actually used
    int samples = 0;
    bool penalty_raised = false;
    bool rank_deficient = false;  // still deficient after raising the penalty once

    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return intercept + x.dot(coef); }
};

// Least squares of y on [1, X] with penalty * |coef|^2 (the intercept is not penalized).
// A near-singular design raises the penalty once to 1e-8 * trace / p before giving up.
RidgeFit ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double penalty);

}  // namespace volterra
