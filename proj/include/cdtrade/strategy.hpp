#pragma once

#include "cdtrade/market_data.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cdtrade {

struct StrategyConfig {
    int eta = 1;          // names per side
    double cost = 0.001;  // flat daily haircut on the portfolio return
    void validate(std::size_t n_tickers) const;
};

// Nearest integer to frac * n, at least 1.
int eta_from_fraction(double frac, std::size_t n_tickers);

struct Selection {
    std::vector<Index> winners;  // long, highest predicted return first
    std::vector<Index> losers;   // short, lowest predicted return first
};

// Top-eta and bottom-eta by predicted return. Ties go to the lexicographically
// smaller ticker on both sides. Entries with eligible[i] == false are skipped.
Selection select(std::span<const double> predicted, const std::vector<std::string>& tickers, int eta,
                 const std::vector<bool>& eligible = {});

struct NamedSelection {
    std::vector<std::string> winners;
    std::vector<std::string> losers;
};
NamedSelection select(const std::map<std::string, double>& predicted, int eta);

// mean(long) - mean(short) - cost.
double realized_return(std::span<const double> long_returns, std::span<const double> short_returns, double cost);

struct MarkedPositions {
    std::vector<double> long_returns;
    std::vector<double> short_returns;
};

// Simple returns from row t to row t + 1 for every position. Throws EndOfData
// when t is the last row.
MarkedPositions mark_to_market(const PricePanel& panel, const Selection& selection, Index t);

}  // namespace cdtrade
