#pragma once

// Hot loops of the causal-order search. Each kernel has a plain serial
// reference and an OpenMP production version; tests hold the two
// against each other and bench/ times them.

#include "cdtrade/resources.hpp"

#include <Eigen/Dense>

#include <span>

namespace cdtrade::kernels {

// Maximum-entropy approximation of differential entropy for a unit-variance
// sample (Hyvarinen 1998):
//   H(u) ~ (1 + log 2pi)/2 - k1 (E[log cosh u] - gamma)^2 - k2 (E[u exp(-u^2/2)])^2
// with k1 = 79.047, k2 = 7.4129, gamma = 0.37457.
inline constexpr double kEntropyK1 = 79.047;
inline constexpr double kEntropyK2 = 7.4129;
inline constexpr double kEntropyGamma = 0.37457;

double entropy(std::span<const double> unit_variance_sample);

// Pairwise likelihood-ratio exogeneity score. For columns x_i, x_j (any
// scale) with standardised versions z_i, z_j and regression residuals
// r_{i|j} = z_i - cov(z_i,z_j)/var(z_j) z_j (rescaled to unit variance):
//   D(i,j) = H(z_j) + H(r_{i|j}) - H(z_i) - H(r_{j|i}).
// D(i,j) > 0 is evidence that x_i is upstream of x_j; D is antisymmetric.
// Column pairs with |corr| numerically 1 score 0.

// Reference: evaluates every ordered pair independently, scalar libm calls.
Eigen::MatrixXd pairwise_scores_serial(const Eigen::MatrixXd& data);

// Production: one evaluation per unordered pair using the closed-form
// residual variance 1 - rho^2, tabulated contrasts (abs error < 4e-12) and an
// OpenMP loop over pairs. Result does not depend on the thread count.
Eigen::MatrixXd pairwise_scores(const Eigen::MatrixXd& data, const Deadline& deadline = {});

// Exogeneity deficit of each column: sum_j min(0, D(i,j))^2. The most
// exogenous column has the smallest deficit.
Eigen::VectorXd exogeneity_deficit(const Eigen::MatrixXd& scores);

// Column-wise centring and scaling to unit population variance. Constant
// columns are left centred with scale 1.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& data);

}  // namespace cdtrade::kernels
