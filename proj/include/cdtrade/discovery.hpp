#pragma once

#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"
#include "cdtrade/resources.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cdtrade {

// Reduced-form VAR(tau) with intercept: X(t) = c + sum_i M_i X(t-i) + n(t).
struct VarModel {
    int tau = 0;
    Eigen::VectorXd intercept;
    std::vector<Eigen::MatrixXd> lag_coefs;  // M_1..M_tau, [effect, cause]
    Eigen::MatrixXd residuals;               // (T - tau) x N
};

// Least-squares VAR fit. Requires T > tau*N + tau + 1; a rank-deficient
// design (constant or duplicated series) throws SingularDesign.
VarModel fit_var(const Eigen::MatrixXd& data, int tau);

struct LingamOptions {
    Eigen::Index min_samples = 50;
    // A disturbance whose Jarque-Bera p-value exceeds this is treated as
    // indistinguishable from Gaussian.
    double gaussian_pvalue = 0.01;
    bool use_serial_kernel = false;
    Deadline deadline;
};

struct LingamResult {
    std::vector<Index> order;        // causal order, most exogenous first
    Eigen::MatrixXd b0;              // [effect, cause], strictly lower triangular under `order`
    Eigen::MatrixXd disturbances;    // samples x variables
    std::vector<double> gaussianity_pvalues;
    // More than one disturbance looks Gaussian: the order is not identifiable.
    bool low_confidence = false;
};

// DirectLiNGAM: repeatedly pick the variable with the smallest exogeneity
// deficit (see kernels::exogeneity_deficit), regress it out of the remaining
// variables, and recurse. B0 then comes from least squares of each variable
// on its predecessors in the order.
LingamResult direct_lingam(const Eigen::MatrixXd& samples, const LingamOptions& options = {});

struct VarLingamOptions {
    // Discovery runs on per-series standardised data so one pruning threshold
    // means the same thing for every ticker.
    bool standardize = true;
    LingamOptions lingam;
};

struct VarLingamModel {
    int tau = 0;
    std::vector<std::string> tickers;
    std::vector<Eigen::MatrixXd> b;  // B_0..B_tau, [effect, cause]
    std::vector<Index> order;
    Eigen::MatrixXd disturbances;
    bool low_confidence = false;
    bool standardized = false;
};

VarLingamModel varlingam(const Eigen::MatrixXd& data, int tau, const VarLingamOptions& options = {});
VarLingamModel varlingam(const PricePanel& panel, int tau, const VarLingamOptions& options = {});

// Edge u -> v iff |B_i(v, u)| > threshold for some lag i; the B_0 diagonal is
// never considered.
SummaryGraph summary_graph(const VarLingamModel& model, double threshold);

// Rough upper bound on the bytes varlingam() allocates for an N x T panel.
double estimate_discovery_bytes(Eigen::Index n_series, Eigen::Index days, int tau);

}  // namespace cdtrade
