#include "cdtrade/discovery.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/kernels.hpp"
#include "cdtrade/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cdtrade {

namespace {

double jarque_bera_pvalue(const Eigen::VectorXd& x) {
    const double n = static_cast<double>(x.size());
    const Eigen::ArrayXd c = x.array() - x.mean();
    const double m2 = c.square().mean();
    if (m2 <= 0) return 1.0;
    const double skew = c.cube().mean() / std::pow(m2, 1.5);
    const double kurt = c.square().square().mean() / (m2 * m2) - 3.0;
    const double jb = n / 6.0 * (skew * skew + 0.25 * kurt * kurt);
    return std::exp(-0.5 * jb);  // chi-square with 2 dof
}

}  // namespace

VarModel fit_var(const Eigen::MatrixXd& data, int tau) {
    if (tau < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    const Index T = data.rows();
    const Index N = data.cols();
    if (N < 1) throw Error(ErrorCode::EmptyPanel, "no series");
    if (T <= tau * N + tau + 1) {
        throw Error(ErrorCode::PanelTooShort, std::to_string(T) + " rows cannot identify a VAR(" + std::to_string(tau) +
                                                  ") on " + std::to_string(N) + " series");
    }
    const Index rows = T - tau;
    Eigen::MatrixXd design(rows, 1 + tau * N);
    design.col(0).setOnes();
    for (int lag = 1; lag <= tau; ++lag) {
        design.middleCols(1 + (lag - 1) * N, N) = data.middleRows(tau - lag, rows);
    }
    auto fit = ols(design, data.bottomRows(rows));

    VarModel model;
    model.tau = tau;
    model.intercept = fit.coef.row(0).transpose();
    for (int lag = 1; lag <= tau; ++lag) {
        model.lag_coefs.push_back(fit.coef.middleRows(1 + (lag - 1) * N, N).transpose());
    }
    model.residuals = std::move(fit.residuals);
    return model;
}

LingamResult direct_lingam(const Eigen::MatrixXd& samples, const LingamOptions& options) {
    const Index n = samples.cols();
    const Index T = samples.rows();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "no variables");
    if (!samples.allFinite()) throw Error(ErrorCode::NonFinite, "non-finite sample");
    if (T < options.min_samples) {
        throw Error(ErrorCode::InsufficientSamples,
                    std::to_string(T) + " samples, need at least " + std::to_string(options.min_samples));
    }

    LingamResult result;
    std::vector<Index> remaining(static_cast<std::size_t>(n));
    std::iota(remaining.begin(), remaining.end(), Index{0});
    Eigen::MatrixXd work = samples;

    while (!remaining.empty()) {
        options.deadline.check("causal order search");
        Index chosen = remaining.front();
        if (remaining.size() > 1) {
            Eigen::MatrixXd sub(T, static_cast<Index>(remaining.size()));
            for (std::size_t k = 0; k < remaining.size(); ++k) sub.col(static_cast<Index>(k)) = work.col(remaining[k]);
            const Eigen::MatrixXd scores = options.use_serial_kernel ? kernels::pairwise_scores_serial(sub)
                                                                     : kernels::pairwise_scores(sub, options.deadline);
            const Eigen::VectorXd deficit = kernels::exogeneity_deficit(scores);
            Index best = 0;
            for (Index k = 1; k < deficit.size(); ++k)
                if (deficit(k) < deficit(best)) best = k;
            chosen = remaining[static_cast<std::size_t>(best)];
        }
        result.order.push_back(chosen);
        remaining.erase(std::find(remaining.begin(), remaining.end(), chosen));

        const Eigen::VectorXd xm = work.col(chosen).array() - work.col(chosen).mean();
        const double var_m = xm.squaredNorm();
        if (var_m <= 0) continue;
        for (Index i : remaining) {
            const double cov = (work.col(i).array() - work.col(i).mean()).matrix().dot(xm);
            work.col(i) -= (cov / var_m) * work.col(chosen);
        }
    }

    result.b0 = Eigen::MatrixXd::Zero(n, n);
    result.disturbances.resize(T, n);
    for (std::size_t p = 0; p < result.order.size(); ++p) {
        const Index target = result.order[p];
        Eigen::MatrixXd design(T, static_cast<Index>(p) + 1);
        design.col(0).setOnes();
        for (std::size_t k = 0; k < p; ++k) design.col(static_cast<Index>(k) + 1) = samples.col(result.order[k]);
        auto fit = ols(design, samples.col(target));
        for (std::size_t k = 0; k < p; ++k) result.b0(target, result.order[k]) = fit.coef(static_cast<Index>(k) + 1, 0);
        result.disturbances.col(target) = fit.residuals.col(0);
    }

    std::size_t gaussian_like = 0;
    for (Index c = 0; c < n; ++c) {
        const double p = jarque_bera_pvalue(result.disturbances.col(c));
        result.gaussianity_pvalues.push_back(p);
        gaussian_like += p > options.gaussian_pvalue;
    }
    result.low_confidence = n > 1 && gaussian_like > 1;
    return result;
}

VarLingamModel varlingam(const Eigen::MatrixXd& data, int tau, const VarLingamOptions& options) {
    const Eigen::MatrixXd input = options.standardize ? kernels::standardize(data) : data;
    const VarModel var = fit_var(input, tau);
    options.lingam.deadline.check("VAR fit");
    LingamResult lingam = direct_lingam(var.residuals, options.lingam);

    VarLingamModel model;
    model.tau = tau;
    model.standardized = options.standardize;
    model.order = std::move(lingam.order);
    model.disturbances = std::move(lingam.disturbances);
    model.low_confidence = lingam.low_confidence;
    const Index N = data.cols();
    const Eigen::MatrixXd i_minus_b0 = Eigen::MatrixXd::Identity(N, N) - lingam.b0;
    model.b.push_back(std::move(lingam.b0));
    for (const auto& m : var.lag_coefs) model.b.push_back(i_minus_b0 * m);
    return model;
}

VarLingamModel varlingam(const PricePanel& panel, int tau, const VarLingamOptions& options) {
    panel.validate(false);
    VarLingamModel model = varlingam(panel.prices, tau, options);
    model.tickers = panel.tickers;
    return model;
}

SummaryGraph summary_graph(const VarLingamModel& model, double threshold) {
    if (threshold < 0) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
    const Index N = model.b.empty() ? 0 : model.b.front().rows();
    std::vector<std::string> tickers = model.tickers;
    if (tickers.empty()) {
        for (Index i = 0; i < N; ++i) tickers.push_back("x" + std::to_string(i));
    }
    SummaryGraph g(tickers);
    for (std::size_t lag = 0; lag < model.b.size(); ++lag) {
        const auto& b = model.b[lag];
        for (Index dst = 0; dst < N; ++dst) {
            for (Index src = 0; src < N; ++src) {
                if (lag == 0 && src == dst) continue;
                if (std::abs(b(dst, src)) > threshold) g.add_edge(src, dst, static_cast<int>(lag));
            }
        }
    }
    return g;
}

double estimate_discovery_bytes(Index n_series, Index days, int tau) {
    const double N = static_cast<double>(n_series);
    const double T = static_cast<double>(days);
    const double k = 1.0 + tau * N;
    // data + standardised copy, VAR design + QR workspace, residuals and the
    // order-search working copies, plus the per-lag coefficient matrices.
    const double doubles = 2 * T * N + 2 * T * k + 4 * T * N + (tau + 3) * N * N + k * N;
    return 8.0 * doubles;
}

}  // namespace cdtrade
