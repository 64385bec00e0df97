#pragma once

#include "cdtrade/forecast.hpp"
#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"
#include "cdtrade/strategy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cdtrade {

inline constexpr int kTradingDaysPerYear = 252;

struct BacktestConfig {
    int tau = 1;
    StrategyConfig strategy;
    int refit_every = 1;
    double train_frac = 0.8;
    // Echoed only; the graph is built before the backtest.
    double threshold = 0.05;
    std::uint64_t seed = 0;
    bool run_control = true;
    bool record_predictions = false;
};

struct TradeRecord {
    Date date;
    bool is_long = true;
    std::string ticker;
    double predicted_return = 0;
    double realized_return = 0;
};

struct PredictionRecord {
    Date date;
    std::string ticker;
    double price_actual = 0;
    double price_predicted = 0;
    double return_predicted = 0;
    FitKind kind = FitKind::Parents;
};

struct CumulativeResult {
    double value = 0;         // prod(1 + r) - 1
    bool bankrupt = false;    // some r <= -1; series truncated there
    std::size_t periods = 0;  // returns actually compounded
};

CumulativeResult cumulative(std::span<const double> daily);

// (1 + cum)^(days_per_year / test_days) - 1.
double annualize(double cumulative_return, std::size_t test_days, int days_per_year = kTradingDaysPerYear);

struct SeriesSummary {
    std::vector<double> daily;
    std::vector<double> curve;  // running compounded return after each day
    double cumulative = 0;
    double annualized = 0;
    bool bankrupt = false;
};

SeriesSummary summarize(std::vector<double> daily, std::size_t test_days);

struct PortfolioRun {
    SeriesSummary series;
    std::vector<bool> traded;  // false when too few tickers were tradable that day
    std::vector<TradeRecord> blotter;
    std::vector<PredictionRecord> predictions;
};

struct BenchmarkSeries {
    std::string name;
    std::vector<Date> dates;  // trade dates the benchmark covers
    SeriesSummary series;
    std::size_t missing = 0;  // trade dates without a benchmark return
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<std::string> tickers;
    std::size_t split_index = 0;
    std::size_t test_days = 0;       // T - split_index
    std::vector<Date> trade_dates;   // every test day but the last
    PortfolioRun strategy;
    PortfolioRun control;
    std::optional<BenchmarkSeries> benchmark;
    std::map<std::string, double> timing_seconds;
    double peak_rss_mb = 0;
    std::vector<std::string> warnings;
};

// Walk-forward loop over trade rows [first, last] of `panel`: refit, predict
// row t + 1, pick winners and losers, close out at t + 1.
PortfolioRun run_portfolio(const PricePanel& panel, const SummaryGraph& graph, const BacktestConfig& config, Index first,
                           Index last);

// Splits `panel`, trades the test period with `graph` and with the self-cause
// control graph, and aligns an optional benchmark price series (first column
// of `benchmark`) to the trade dates.
BacktestReport run_backtest(const PricePanel& panel, const SummaryGraph& graph, const BacktestConfig& config,
                            const PricePanel* benchmark = nullptr);

struct ComparisonRow {
    std::string name;
    double cumulative = 0;
    double annualized = 0;
    bool bankrupt = false;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::vector<Date> dates;
    std::vector<double> excess_vs_control;
    std::vector<Date> benchmark_dates;
    std::vector<double> excess_vs_benchmark;
    std::vector<std::string> warnings;
};

Comparison compare(const BacktestReport& report);

}  // namespace cdtrade
