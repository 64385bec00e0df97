#pragma once

#include <Eigen/Dense>

namespace cdtrade {

struct LeastSquares {
    Eigen::MatrixXd coef;       // regressors x targets
    Eigen::MatrixXd residuals;  // rows x targets
};

// Ordinary least squares via column-pivoting QR. Throws SingularDesign when
// the design matrix is numerically rank deficient.
LeastSquares ols(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets);

// Solves (X'X + lambda I) b = X'y. Used only as a fallback for singular fits.
Eigen::VectorXd ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double lambda);

// Spectral radius of a (not necessarily symmetric) square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace cdtrade
