#include "cdtrade/report_io.hpp"

#include "cdtrade/resources.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cdtrade {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

nlohmann::json series_json(const SeriesSummary& s) {
    return {{"cumulative_return", s.cumulative},
            {"annualized_return", s.annualized},
            {"bankrupt", s.bankrupt},
            {"days", s.daily.size()}};
}

}  // namespace

nlohmann::json summary_json(const BacktestReport& report, const nlohmann::json& config_echo) {
    const auto& cfg = report.config;
    nlohmann::json doc;
    doc["config"] = config_echo;
    doc["parameters"] = {{"tau", cfg.tau},
                         {"eta", cfg.strategy.eta},
                         {"cost", cfg.strategy.cost},
                         {"threshold", cfg.threshold},
                         {"train_frac", cfg.train_frac},
                         {"refit_every", cfg.refit_every},
                         {"seed", cfg.seed},
                         {"days_per_year", kTradingDaysPerYear}};
    doc["tickers"] = report.tickers.size();
    doc["split_index"] = report.split_index;
    doc["test_days"] = report.test_days;
    doc["trade_days"] = report.trade_dates.size();
    if (!report.trade_dates.empty()) {
        doc["first_trade_date"] = format_date(report.trade_dates.front());
        doc["last_trade_date"] = format_date(report.trade_dates.back());
    }
    doc["series"]["strategy"] = series_json(report.strategy.series);
    if (cfg.run_control) doc["series"]["self_cause_control"] = series_json(report.control.series);
    if (report.benchmark) {
        doc["series"]["benchmark"] = series_json(report.benchmark->series);
        doc["series"]["benchmark"]["name"] = report.benchmark->name;
        doc["series"]["benchmark"]["missing_days"] = report.benchmark->missing;
    }
    const Comparison cmp = compare(report);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : cmp.rows) {
        rows.push_back({{"name", r.name}, {"cumulative", r.cumulative}, {"annualized", r.annualized}, {"bankrupt", r.bankrupt}});
    }
    doc["comparison"] = rows;
    doc["warnings"] = report.warnings;
    return doc;
}

nlohmann::json timing_json(const BacktestReport& report) {
    nlohmann::json doc;
    doc["seconds"] = report.timing_seconds;
    doc["peak_rss_mb"] = report.peak_rss_mb;
    return doc;
}

void write_daily_csv(const BacktestReport& report, std::ostream& out) {
    const bool control = report.config.run_control;
    const Comparison cmp = compare(report);
    out << "date,strategy" << (control ? ",self_cause_control" : "") << (report.benchmark ? ",benchmark" : "")
        << (control ? ",excess_vs_control" : "") << (report.benchmark ? ",excess_vs_benchmark" : "") << '\n';
    std::size_t b = 0;
    for (std::size_t i = 0; i < report.strategy.series.daily.size(); ++i) {
        const Date d = report.trade_dates[i];
        out << format_date(d) << ',' << format_number(report.strategy.series.daily[i]);
        if (control) out << ',' << format_number(report.control.series.daily[i]);
        std::optional<std::size_t> bench_k;
        if (report.benchmark) {
            const auto& bd = report.benchmark->dates;
            while (b < bd.size() && bd[b] < d) ++b;
            if (b < bd.size() && bd[b] == d) bench_k = b;
            out << ',' << (bench_k ? format_number(report.benchmark->series.daily[*bench_k]) : "");
        }
        if (control) out << ',' << format_number(cmp.excess_vs_control[i]);
        if (report.benchmark) {
            out << ',';
            if (bench_k) out << format_number(report.strategy.series.daily[i] - report.benchmark->series.daily[*bench_k]);
        }
        out << '\n';
    }
}

void write_plot_csv(const BacktestReport& report, std::ostream& out) {
    const bool control = report.config.run_control;
    out << "date,strategy_cum" << (control ? ",self_cause_control_cum" : "") << (report.benchmark ? ",benchmark_cum" : "")
        << '\n';
    std::size_t b = 0;
    for (std::size_t i = 0; i < report.trade_dates.size(); ++i) {
        const Date d = report.trade_dates[i];
        auto at = [i](const SeriesSummary& s) { return i < s.curve.size() ? format_number(s.curve[i]) : std::string(); };
        out << format_date(d) << ',' << at(report.strategy.series);
        if (control) out << ',' << at(report.control.series);
        if (report.benchmark) {
            const auto& bd = report.benchmark->dates;
            while (b < bd.size() && bd[b] < d) ++b;
            out << ',';
            if (b < bd.size() && bd[b] == d && b < report.benchmark->series.curve.size()) {
                out << format_number(report.benchmark->series.curve[b]);
            }
        }
        out << '\n';
    }
}

void write_blotter_csv(const std::vector<TradeRecord>& blotter, std::ostream& out) {
    out << "date,side,ticker,predicted_return,realized_return\n";
    for (const auto& r : blotter) {
        out << format_date(r.date) << ',' << (r.is_long ? "long" : "short") << ',' << r.ticker << ','
            << format_number(r.predicted_return) << ',' << format_number(r.realized_return) << '\n';
    }
}

void write_predictions_csv(const std::vector<PredictionRecord>& predictions, std::ostream& out) {
    out << "date,ticker,price_actual,price_predicted,return_predicted\n";
    for (const auto& p : predictions) {
        out << format_date(p.date) << ',' << p.ticker << ',' << format_number(p.price_actual) << ','
            << format_number(p.price_predicted) << ',' << format_number(p.return_predicted) << '\n';
    }
}

ReportFiles write_report(const BacktestReport& report, const nlohmann::json& config_echo,
                         const std::filesystem::path& dir) {
    ReportFiles f{dir / "summary.json", dir / "timing.json", dir / "daily_returns.csv",
                  dir / "cumulative.csv", dir / "blotter.csv", {}};
    atomic_write(f.summary, [&](std::ostream& o) { o << summary_json(report, config_echo).dump(2) << '\n'; });
    atomic_write(f.timing, [&](std::ostream& o) { o << timing_json(report).dump(2) << '\n'; });
    atomic_write(f.daily, [&](std::ostream& o) { write_daily_csv(report, o); });
    atomic_write(f.plot, [&](std::ostream& o) { write_plot_csv(report, o); });
    atomic_write(f.blotter, [&](std::ostream& o) { write_blotter_csv(report.strategy.blotter, o); });
    if (report.config.record_predictions) {
        f.predictions = dir / "predictions.csv";
        atomic_write(f.predictions, [&](std::ostream& o) { write_predictions_csv(report.strategy.predictions, o); });
    }
    return f;
}

}  // namespace cdtrade
