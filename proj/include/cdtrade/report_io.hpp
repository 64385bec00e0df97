#pragma once

#include "cdtrade/backtest.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace cdtrade {

// Shortest round-trip decimal form of a double.
std::string format_number(double value);

// Deterministic content only; wall-clock figures go to timing_json().
nlohmann::json summary_json(const BacktestReport& report, const nlohmann::json& config_echo);
nlohmann::json timing_json(const BacktestReport& report);

// date,strategy,self_cause_control[,benchmark]
void write_daily_csv(const BacktestReport& report, std::ostream& out);
// date,strategy_cum,self_cause_control_cum[,benchmark_cum]
void write_plot_csv(const BacktestReport& report, std::ostream& out);
// date,side,ticker,predicted_return,realized_return
void write_blotter_csv(const std::vector<TradeRecord>& blotter, std::ostream& out);
// date,ticker,price_actual,price_predicted,return_predicted
void write_predictions_csv(const std::vector<PredictionRecord>& predictions, std::ostream& out);

struct ReportFiles {
    std::filesystem::path summary, timing, daily, plot, blotter, predictions;
};

// Writes every report file atomically into `dir`.
ReportFiles write_report(const BacktestReport& report, const nlohmann::json& config_echo,
                         const std::filesystem::path& dir);

}  // namespace cdtrade
