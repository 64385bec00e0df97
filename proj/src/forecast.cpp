#include "cdtrade/forecast.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/linalg.hpp"

#include <cmath>
#include <string>

namespace cdtrade {

std::string_view to_string(FitKind kind) noexcept {
    switch (kind) {
        case FitKind::Parents: return "parents";
        case FitKind::SelfLags: return "self_lags";
        case FitKind::Ridge: return "ridge";
        case FitKind::CarryForward: return "carry_forward";
    }
    return "unknown";
}

namespace {

Eigen::MatrixXd lagged_design(const PricePanel& panel, const std::vector<Index>& parents, int tau, Index first_row,
                              Index last_row) {
    const Index rows = last_row - first_row + 1;
    Eigen::MatrixXd design(rows, 1 + static_cast<Index>(parents.size()) * tau);
    design.col(0).setOnes();
    Index col = 1;
    for (Index p : parents) {
        for (int lag = 1; lag <= tau; ++lag) {
            design.col(col++) = panel.prices.col(p).segment(first_row - lag, rows);
        }
    }
    return design;
}

}  // namespace

ParentModel fit_parent_model(const PricePanel& panel, const SummaryGraph& graph, Index target, int tau, Index end) {
    if (tau < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    if (target < 0 || target >= panel.series()) throw Error(ErrorCode::UnknownTicker, "target out of range");
    if (end < 0 || end >= panel.days()) throw Error(ErrorCode::InvalidArgument, "end row outside the panel");

    ParentModel model;
    model.target = target;
    model.tau = tau;
    model.fitted_through = end;
    model.parents = graph.parents(target);
    model.kind = FitKind::Parents;
    if (model.parents.empty()) {
        model.parents = {target};
        model.kind = FitKind::SelfLags;
    }
    const Index k = 1 + static_cast<Index>(model.parents.size()) * tau;
    const Index usable = end - tau + 1;
    if (usable < k + 1) {
        throw Error(ErrorCode::PanelTooShort, panel.tickers[static_cast<std::size_t>(target)] + ": " +
                                                  std::to_string(usable) + " usable rows for " + std::to_string(k) +
                                                  " coefficients");
    }
    const Eigen::MatrixXd design = lagged_design(panel, model.parents, tau, tau, end);
    const Eigen::VectorXd y = panel.prices.col(target).segment(tau, usable);
    model.coefficients = ols(design, y).coef.col(0);
    return model;
}

ParentModel fit_with_fallback(const PricePanel& panel, const SummaryGraph& graph, Index target, int tau, Index end) {
    try {
        return fit_parent_model(panel, graph, target, tau, end);
    } catch (const Error& e) {
        ParentModel model;
        model.target = target;
        model.tau = tau;
        model.fitted_through = end;
        if (e.code() == ErrorCode::SingularDesign || e.code() == ErrorCode::NonFinite) {
            model.parents = graph.parents(target);
            if (model.parents.empty()) model.parents = {target};
            const Index usable = end - tau + 1;
            const Eigen::MatrixXd design = lagged_design(panel, model.parents, tau, tau, end);
            const Eigen::VectorXd y = panel.prices.col(target).segment(tau, usable);
            Eigen::VectorXd coef = ridge(design, y, kRidgeFallback);
            if (coef.allFinite()) {
                model.coefficients = std::move(coef);
                model.kind = FitKind::Ridge;
                return model;
            }
        } else if (e.code() != ErrorCode::PanelTooShort) {
            throw;
        }
        model.parents.clear();
        model.coefficients.resize(0);
        model.kind = FitKind::CarryForward;
        return model;
    }
}

double predict_next(const ParentModel& model, const PricePanel& panel, Index t) {
    if (t < 0 || t >= panel.days()) throw Error(ErrorCode::InvalidArgument, "prediction day outside the panel");
    if (model.fitted_through > t) throw Error(ErrorCode::InvalidArgument, "model was fit on data after the prediction day");
    if (model.kind == FitKind::CarryForward) return panel.prices(t, model.target);
    if (t - model.tau + 1 < 0) {
        throw Error(ErrorCode::PanelTooShort, "lag history before row " + std::to_string(t) + " is missing");
    }
    double value = model.coefficients(0);
    Index k = 1;
    for (Index p : model.parents) {
        for (int lag = 1; lag <= model.tau; ++lag) value += model.coefficients(k++) * panel.prices(t + 1 - lag, p);
    }
    return value;
}

std::vector<double> predicted_returns(std::span<const double> today, std::span<const double> predicted) {
    if (today.size() != predicted.size()) throw Error(ErrorCode::LengthMismatch, "price and prediction counts differ");
    std::vector<double> out(today.size());
    for (std::size_t i = 0; i < today.size(); ++i) {
        if (!(today[i] > 0.0)) throw Error(ErrorCode::NonPositivePrice, "today's price must be positive");
        out[i] = (predicted[i] - today[i]) / today[i];
    }
    return out;
}

std::map<std::string, double> predicted_returns(const std::map<std::string, double>& today,
                                                const std::map<std::string, double>& predicted) {
    std::map<std::string, double> out;
    for (const auto& [ticker, rho] : predicted) {
        auto it = today.find(ticker);
        if (it == today.end()) throw Error(ErrorCode::UnknownTicker, ticker);
        if (!(it->second > 0.0)) throw Error(ErrorCode::NonPositivePrice, ticker);
        out[ticker] = (rho - it->second) / it->second;
    }
    return out;
}

ExpandingForecaster::ExpandingForecaster(SummaryGraph graph, int tau, int refit_every)
    : graph_(std::move(graph)), tau_(tau), refit_every_(refit_every) {
    if (tau_ < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    if (refit_every_ < 1) throw Error(ErrorCode::InvalidArgument, "refit interval must be >= 1");
}

PredictionSet ExpandingForecaster::predict(const PricePanel& panel, Index t) {
    const Index n = panel.series();
    if (graph_.size() != n) throw Error(ErrorCode::TickerMismatch, "graph and panel disagree on ticker count");
    if (first_day_ < 0) first_day_ = t;
    const bool refit = models_.empty() || (t - first_day_) % refit_every_ == 0;
    if (refit) {
        models_.assign(static_cast<std::size_t>(n), ParentModel{});
        // Exceptions cannot cross the OpenMP region; stash the first one.
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (Index i = 0; i < n; ++i) {
            try {
                models_[static_cast<std::size_t>(i)] = fit_with_fallback(panel, graph_, i, tau_, t);
            } catch (...) {
#pragma omp critical(cdtrade_forecast_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    PredictionSet out;
    out.as_of = t;
    out.today = panel.prices.row(t).transpose();
    out.predicted_price.resize(n);
    out.predicted_return.resize(n);
    out.kinds.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto& m = models_[static_cast<std::size_t>(i)];
        out.predicted_price(i) = predict_next(m, panel, t);
        out.kinds[static_cast<std::size_t>(i)] = m.kind;
        const double today = out.today(i);
        if (!(today > 0.0)) throw Error(ErrorCode::NonPositivePrice, panel.tickers[static_cast<std::size_t>(i)]);
        out.predicted_return(i) = (out.predicted_price(i) - today) / today;
    }
    return out;
}

}  // namespace cdtrade
