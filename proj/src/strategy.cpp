#include "cdtrade/strategy.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdtrade {

void StrategyConfig::validate(std::size_t n_tickers) const {
    if (eta < 1) throw Error(ErrorCode::InvalidArgument, "eta must be >= 1");
    if (2 * static_cast<std::size_t>(eta) > n_tickers) {
        throw Error(ErrorCode::TooFewTickers, "2 * eta = " + std::to_string(2 * eta) + " exceeds " +
                                                  std::to_string(n_tickers) + " tickers");
    }
    if (!(cost >= 0.0 && cost < 1.0)) throw Error(ErrorCode::InvalidArgument, "cost must lie in [0, 1)");
}

int eta_from_fraction(double frac, std::size_t n_tickers) {
    if (!(frac > 0.0 && frac <= 0.5)) throw Error(ErrorCode::InvalidArgument, "eta fraction must lie in (0, 0.5]");
    return std::max(1, static_cast<int>(std::lround(frac * static_cast<double>(n_tickers))));
}

Selection select(std::span<const double> predicted, const std::vector<std::string>& tickers, int eta,
                 const std::vector<bool>& eligible) {
    if (predicted.size() != tickers.size()) throw Error(ErrorCode::LengthMismatch, "predictions vs tickers");
    if (eta < 1) throw Error(ErrorCode::InvalidArgument, "eta must be >= 1");
    std::vector<Index> pool;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (eligible.empty() || eligible[i]) pool.push_back(static_cast<Index>(i));
    }
    if (pool.size() < 2 * static_cast<std::size_t>(eta)) {
        throw Error(ErrorCode::TooFewTickers, std::to_string(pool.size()) + " tradable tickers for eta = " +
                                                  std::to_string(eta));
    }
    auto name = [&](Index i) -> const std::string& { return tickers[static_cast<std::size_t>(i)]; };
    auto value = [&](Index i) { return predicted[static_cast<std::size_t>(i)]; };

    Selection out;
    std::vector<Index> by_desc = pool;
    std::partial_sort(by_desc.begin(), by_desc.begin() + eta, by_desc.end(), [&](Index a, Index b) {
        return value(a) != value(b) ? value(a) > value(b) : name(a) < name(b);
    });
    out.winners.assign(by_desc.begin(), by_desc.begin() + eta);

    std::vector<Index> rest;
    for (Index i : pool)
        if (std::find(out.winners.begin(), out.winners.end(), i) == out.winners.end()) rest.push_back(i);
    std::partial_sort(rest.begin(), rest.begin() + eta, rest.end(), [&](Index a, Index b) {
        return value(a) != value(b) ? value(a) < value(b) : name(a) < name(b);
    });
    out.losers.assign(rest.begin(), rest.begin() + eta);
    return out;
}

NamedSelection select(const std::map<std::string, double>& predicted, int eta) {
    std::vector<std::string> tickers;
    std::vector<double> values;
    for (const auto& [t, v] : predicted) {
        tickers.push_back(t);
        values.push_back(v);
    }
    const Selection s = select(values, tickers, eta);
    NamedSelection out;
    for (Index i : s.winners) out.winners.push_back(tickers[static_cast<std::size_t>(i)]);
    for (Index i : s.losers) out.losers.push_back(tickers[static_cast<std::size_t>(i)]);
    return out;
}

double realized_return(std::span<const double> long_returns, std::span<const double> short_returns, double cost) {
    if (long_returns.size() != short_returns.size() || long_returns.empty()) {
        throw Error(ErrorCode::LengthMismatch, "long and short legs must have the same non-zero length");
    }
    const double eta = static_cast<double>(long_returns.size());
    const double longs = std::accumulate(long_returns.begin(), long_returns.end(), 0.0);
    const double shorts = std::accumulate(short_returns.begin(), short_returns.end(), 0.0);
    return longs / eta - shorts / eta - cost;
}

MarkedPositions mark_to_market(const PricePanel& panel, const Selection& selection, Index t) {
    if (t < 0 || t >= panel.days()) throw Error(ErrorCode::InvalidArgument, "trade day outside the panel");
    if (t + 1 >= panel.days()) {
        throw Error(ErrorCode::EndOfData, "no price after " + format_date(panel.dates[static_cast<std::size_t>(t)]));
    }
    auto simple = [&](Index i) {
        const double p0 = panel.prices(t, i);
        const double p1 = panel.prices(t + 1, i);
        if (!(p0 > 0.0) || std::isnan(p1)) {
            throw Error(ErrorCode::NonPositivePrice, panel.tickers[static_cast<std::size_t>(i)] + " on " +
                                                         format_date(panel.dates[static_cast<std::size_t>(t)]));
        }
        return (p1 - p0) / p0;
    };
    MarkedPositions out;
    for (Index i : selection.winners) out.long_returns.push_back(simple(i));
    for (Index i : selection.losers) out.short_returns.push_back(simple(i));
    return out;
}

}  // namespace cdtrade
