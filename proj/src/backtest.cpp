#include "cdtrade/backtest.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/resources.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdtrade {

CumulativeResult cumulative(std::span<const double> daily) {
    CumulativeResult out;
    double growth = 1.0;
    for (double r : daily) {
        if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "non-finite daily return");
        ++out.periods;
        if (r <= -1.0) {
            out.bankrupt = true;
            out.value = -1.0;
            return out;
        }
        growth *= 1.0 + r;
    }
    out.value = growth - 1.0;
    return out;
}

double annualize(double cumulative_return, std::size_t test_days, int days_per_year) {
    if (!(cumulative_return > -1.0)) throw Error(ErrorCode::Domain, "cumulative return must exceed -1");
    if (test_days < 1) throw Error(ErrorCode::Domain, "test period must be at least one day");
    return std::pow(1.0 + cumulative_return, static_cast<double>(days_per_year) / static_cast<double>(test_days)) - 1.0;
}

SeriesSummary summarize(std::vector<double> daily, std::size_t test_days) {
    SeriesSummary s;
    s.daily = std::move(daily);
    const CumulativeResult cum = cumulative(s.daily);
    s.bankrupt = cum.bankrupt;
    s.cumulative = cum.value;
    double growth = 1.0;
    for (std::size_t i = 0; i < cum.periods; ++i) {
        growth *= 1.0 + s.daily[i];
        s.curve.push_back(cum.bankrupt && i + 1 == cum.periods ? -1.0 : growth - 1.0);
    }
    s.annualized = s.bankrupt ? -1.0 : annualize(s.cumulative, test_days);
    return s;
}

namespace {

void assert_dollar_neutral(const Selection& s, int eta) {
    // Equal weights 1/eta per side: both legs must total exactly one.
    const auto n = static_cast<std::size_t>(eta);
    if (s.winners.size() != n || s.losers.size() != n) throw std::logic_error("leg size differs from eta");
    const double w = 1.0 / static_cast<double>(eta);
    double long_w = 0, short_w = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long_w += w;
        short_w += w;
    }
    if (std::abs(long_w - 1.0) > 1e-12 || std::abs(short_w - 1.0) > 1e-12 || std::abs(long_w - short_w) > 1e-12) {
        throw std::logic_error("portfolio is not dollar neutral");
    }
    for (Index i : s.winners)
        if (std::find(s.losers.begin(), s.losers.end(), i) != s.losers.end())
            throw std::logic_error("ticker held long and short");
}

}  // namespace

PortfolioRun run_portfolio(const PricePanel& panel, const SummaryGraph& graph, const BacktestConfig& config, Index first,
                           Index last) {
    if (first < config.tau - 1 || last + 1 >= panel.days() || first > last) {
        throw Error(ErrorCode::InvalidArgument, "trade range outside the panel");
    }
    config.strategy.validate(static_cast<std::size_t>(panel.series()));
    ExpandingForecaster forecaster(graph, config.tau, config.refit_every);
    PortfolioRun run;
    std::vector<double> daily;
    for (Index t = first; t <= last; ++t) {
        const PredictionSet pred = forecaster.predict(panel, t);
        const Date date = panel.dates[static_cast<std::size_t>(t)];
        if (config.record_predictions) {
            for (Index i = 0; i < panel.series(); ++i) {
                run.predictions.push_back({date, panel.tickers[static_cast<std::size_t>(i)], pred.today(i),
                                           pred.predicted_price(i), pred.predicted_return(i),
                                           pred.kinds[static_cast<std::size_t>(i)]});
            }
        }
        std::vector<bool> eligible(static_cast<std::size_t>(panel.series()));
        std::size_t n_eligible = 0;
        for (std::size_t i = 0; i < eligible.size(); ++i) {
            eligible[i] = pred.kinds[i] != FitKind::CarryForward && std::isfinite(pred.predicted_return(static_cast<Index>(i)));
            n_eligible += eligible[i];
        }
        if (n_eligible < 2 * static_cast<std::size_t>(config.strategy.eta)) {
            daily.push_back(0.0);
            run.traded.push_back(false);
            continue;
        }
        const std::vector<double> gamma(pred.predicted_return.data(), pred.predicted_return.data() + pred.predicted_return.size());
        const Selection sel = select(gamma, panel.tickers, config.strategy.eta, eligible);
        assert_dollar_neutral(sel, config.strategy.eta);
        const MarkedPositions marked = mark_to_market(panel, sel, t);
        daily.push_back(realized_return(marked.long_returns, marked.short_returns, config.strategy.cost));
        run.traded.push_back(true);
        for (std::size_t k = 0; k < sel.winners.size(); ++k) {
            const Index i = sel.winners[k];
            run.blotter.push_back({date, true, panel.tickers[static_cast<std::size_t>(i)], gamma[static_cast<std::size_t>(i)],
                                   marked.long_returns[k]});
        }
        for (std::size_t k = 0; k < sel.losers.size(); ++k) {
            const Index i = sel.losers[k];
            run.blotter.push_back({date, false, panel.tickers[static_cast<std::size_t>(i)], gamma[static_cast<std::size_t>(i)],
                                   marked.short_returns[k]});
        }
    }
    const auto test_days = static_cast<std::size_t>(panel.days() - first);
    run.series = summarize(std::move(daily), test_days);
    return run;
}

BacktestReport run_backtest(const PricePanel& panel, const SummaryGraph& graph, const BacktestConfig& config,
                            const PricePanel* benchmark) {
    panel.validate(false);
    if (graph.tickers() != panel.tickers) throw Error(ErrorCode::TickerMismatch, "graph tickers differ from panel tickers");
    if (config.refit_every < 1) throw Error(ErrorCode::InvalidArgument, "refit interval must be >= 1");
    const SplitPanel parts = split(panel, config.train_frac, config.tau);
    config.strategy.validate(static_cast<std::size_t>(panel.series()));

    BacktestReport report;
    report.config = config;
    report.tickers = panel.tickers;
    report.split_index = parts.split_index;
    report.test_days = static_cast<std::size_t>(panel.days()) - parts.split_index;
    if (report.test_days < 2) throw Error(ErrorCode::PanelTooShort, "test period needs at least two days");
    const Index first = static_cast<Index>(parts.split_index);
    const Index last = panel.days() - 2;
    for (Index t = first; t <= last; ++t) report.trade_dates.push_back(panel.dates[static_cast<std::size_t>(t)]);

    Stopwatch total;
    {
        Stopwatch sw;
        report.strategy = run_portfolio(panel, graph, config, first, last);
        report.timing_seconds["strategy"] = sw.seconds();
    }
    if (config.run_control) {
        Stopwatch sw;
        BacktestConfig control_cfg = config;
        control_cfg.record_predictions = false;
        report.control = run_portfolio(panel, self_cause_graph(panel.tickers, config.tau), control_cfg, first, last);
        report.timing_seconds["control"] = sw.seconds();
    }
    auto skipped = std::count(report.strategy.traded.begin(), report.strategy.traded.end(), false);
    if (skipped > 0) report.warnings.push_back(std::to_string(skipped) + " trade days skipped: too few tradable tickers");

    if (benchmark) {
        if (benchmark->series() < 1) throw Error(ErrorCode::EmptyPanel, "benchmark file has no price column");
        BenchmarkSeries bench;
        bench.name = benchmark->tickers.front();
        std::vector<double> daily;
        for (Index t = first; t <= last; ++t) {
            const auto d0 = benchmark->date_index(panel.dates[static_cast<std::size_t>(t)]);
            const auto d1 = benchmark->date_index(panel.dates[static_cast<std::size_t>(t + 1)]);
            const double p0 = d0 ? benchmark->prices(*d0, 0) : std::nan("");
            const double p1 = d1 ? benchmark->prices(*d1, 0) : std::nan("");
            if (!(p0 > 0.0) || !(p1 > 0.0)) {
                ++bench.missing;
                continue;
            }
            bench.dates.push_back(panel.dates[static_cast<std::size_t>(t)]);
            daily.push_back((p1 - p0) / p0);
        }
        bench.series = summarize(std::move(daily), report.test_days);
        if (bench.missing > 0) {
            report.warnings.push_back("benchmark " + bench.name + " lacks prices for " + std::to_string(bench.missing) +
                                      " trade days; aligned on common dates");
        }
        report.benchmark = std::move(bench);
    }
    report.timing_seconds["backtest_total"] = total.seconds();
    report.peak_rss_mb = peak_rss_mb();
    return report;
}

Comparison compare(const BacktestReport& report) {
    Comparison out;
    auto row = [](std::string name, const SeriesSummary& s) {
        return ComparisonRow{std::move(name), s.cumulative, s.annualized, s.bankrupt};
    };
    out.rows.push_back(row("strategy", report.strategy.series));
    const auto& strat = report.strategy.series.daily;
    if (report.config.run_control) {
        out.rows.push_back(row("self_cause_control", report.control.series));
        const auto& ctrl = report.control.series.daily;
        const std::size_t n = std::min(strat.size(), ctrl.size());
        for (std::size_t i = 0; i < n; ++i) {
            out.dates.push_back(report.trade_dates[i]);
            out.excess_vs_control.push_back(strat[i] - ctrl[i]);
        }
    }
    if (report.benchmark) {
        const auto& b = *report.benchmark;
        out.rows.push_back(row("benchmark:" + b.name, b.series));
        for (std::size_t k = 0; k < b.dates.size() && k < b.series.daily.size(); ++k) {
            auto it = std::lower_bound(report.trade_dates.begin(), report.trade_dates.end(), b.dates[k]);
            if (it == report.trade_dates.end() || *it != b.dates[k]) continue;
            const auto i = static_cast<std::size_t>(it - report.trade_dates.begin());
            if (i >= strat.size()) continue;
            out.benchmark_dates.push_back(b.dates[k]);
            out.excess_vs_benchmark.push_back(strat[i] - b.series.daily[k]);
        }
        if (b.missing > 0) {
            out.warnings.push_back("benchmark misaligned: " + std::to_string(b.missing) + " trade days dropped");
        }
    }
    return out;
}

}  // namespace cdtrade
