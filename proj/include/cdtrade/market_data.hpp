#pragma once

#include "cdtrade/date.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdtrade {

using Index = Eigen::Index;

// Date-indexed matrix of prices, one column per ticker. Missing entries are NaN
// until the panel has been through impute().
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;  // rows = dates, cols = tickers

    Index days() const { return prices.rows(); }
    Index series() const { return prices.cols(); }
    bool has_missing() const;
    std::optional<Index> ticker_index(std::string_view ticker) const;
    std::optional<Index> date_index(Date date) const;

    // Rows [begin, end).
    PricePanel rows(Index begin, Index end) const;
    PricePanel columns(const std::vector<Index>& keep) const;

    // Throws on broken structural invariants (shape, ordering, duplicates,
    // non-positive prices). NaN is allowed unless `allow_missing` is false.
    void validate(bool allow_missing = true) const;
};

struct SplitPanel {
    PricePanel train;
    PricePanel test;
    std::size_t split_index = 0;
};

PricePanel load_csv(const std::filesystem::path& path);
PricePanel parse_csv(std::istream& in, std::string_view source = "<stream>");
void write_csv(const PricePanel& panel, std::ostream& out);

struct ImputeResult {
    PricePanel panel;
    std::vector<std::string> dropped;
};

// Fills interior gaps by linear interpolation between the nearest known
// neighbours of the same series, then drops every series that still has a gap
// (leading or trailing). Throws EmptyPanel if nothing survives.
ImputeResult impute(const PricePanel& panel);

std::size_t split_index(std::size_t days, double train_frac);

// Earliest floor(train_frac * T) rows become the training panel. The training
// panel must hold at least tau + 2 rows.
SplitPanel split(const PricePanel& panel, double train_frac = 0.8, int tau = 1);

}  // namespace cdtrade
