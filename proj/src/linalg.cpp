#include "cdtrade/linalg.hpp"

#include "cdtrade/error.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace cdtrade {

LeastSquares ols(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets) {
    if (design.rows() != targets.rows()) throw Error(ErrorCode::LengthMismatch, "design/target row mismatch");
    if (design.rows() < design.cols()) {
        throw Error(ErrorCode::SingularDesign, std::to_string(design.rows()) + " rows for " +
                                                   std::to_string(design.cols()) + " regressors");
    }
    if (!design.allFinite() || !targets.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite regression input");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw Error(ErrorCode::SingularDesign, "design matrix rank " + std::to_string(qr.rank()) + " < " +
                                                   std::to_string(design.cols()));
    }
    LeastSquares out;
    out.coef = qr.solve(targets);
    out.residuals = targets - design * out.coef;
    return out;
}

Eigen::VectorXd ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double lambda) {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += lambda;
    return gram.ldlt().solve(design.transpose() * target);
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace cdtrade
