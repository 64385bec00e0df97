#pragma once

#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"

#include <Eigen/Dense>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cdtrade {

enum class FitKind {
    Parents,         // OLS on summary-graph parents
    SelfLags,        // no parents in the graph: own lags only
    Ridge,           // singular OLS stabilised with a tiny ridge term
    CarryForward,    // nothing fit; predicts today's price (return 0)
};

std::string_view to_string(FitKind kind) noexcept;

// Linear model P^X_t = c + sum_{p, l} w_{p,l} P^p_{t-l}, l = 1..tau.
struct ParentModel {
    Index target = 0;
    std::vector<Index> parents;
    int tau = 1;
    // [c, w_{p0,1}..w_{p0,tau}, w_{p1,1}, ...]; empty for CarryForward.
    Eigen::VectorXd coefficients;
    Index fitted_through = -1;  // last panel row used
    FitKind kind = FitKind::Parents;
};

inline constexpr double kRidgeFallback = 1e-8;

// OLS on all rows up to and including `end` (expanding window). A target
// without parents falls back to its own lags. Throws SingularDesign for a
// collinear design and PanelTooShort when fewer than |parents|*tau + 2 rows
// are usable.
ParentModel fit_parent_model(const PricePanel& panel, const SummaryGraph& graph, Index target, int tau, Index end);

// fit_parent_model, then ridge, then carry-forward. Never throws for data
// reasons.
ParentModel fit_with_fallback(const PricePanel& panel, const SummaryGraph& graph, Index target, int tau, Index end);

// One-step-ahead price for row t + 1 from rows t, t-1, ..., t-tau+1.
double predict_next(const ParentModel& model, const PricePanel& panel, Index t);

// (predicted - today) / today per element; throws NonPositivePrice.
std::vector<double> predicted_returns(std::span<const double> today, std::span<const double> predicted);
std::map<std::string, double> predicted_returns(const std::map<std::string, double>& today,
                                                const std::map<std::string, double>& predicted);

struct PredictionSet {
    Index as_of = -1;
    Eigen::VectorXd today;
    Eigen::VectorXd predicted_price;
    Eigen::VectorXd predicted_return;
    std::vector<FitKind> kinds;
};

// Expanding-window forecaster. Every `refit_every` calls the per-ticker models
// are refit on all rows through the current day (OpenMP across tickers).
class ExpandingForecaster {
public:
    ExpandingForecaster(SummaryGraph graph, int tau, int refit_every = 1);

    PredictionSet predict(const PricePanel& panel, Index t);
    const std::vector<ParentModel>& models() const { return models_; }

private:
    SummaryGraph graph_;
    int tau_;
    int refit_every_;
    Index first_day_ = -1;
    std::vector<ParentModel> models_;
};

}  // namespace cdtrade
