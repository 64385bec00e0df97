#include "cdtrade/market_data.hpp"

#include "cdtrade/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace cdtrade {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string where(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

}  // namespace

bool PricePanel::has_missing() const {
    return prices.size() > 0 && prices.array().isNaN().any();
}

std::optional<Index> PricePanel::ticker_index(std::string_view ticker) const {
    auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) return std::nullopt;
    return static_cast<Index>(it - tickers.begin());
}

std::optional<Index> PricePanel::date_index(Date date) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), date);
    if (it == dates.end() || *it != date) return std::nullopt;
    return static_cast<Index>(it - dates.begin());
}

PricePanel PricePanel::rows(Index begin, Index end) const {
    if (begin < 0 || end > days() || begin > end) {
        throw Error(ErrorCode::InvalidArgument, "row range out of bounds");
    }
    PricePanel out;
    out.dates.assign(dates.begin() + begin, dates.begin() + end);
    out.tickers = tickers;
    out.prices = prices.middleRows(begin, end - begin);
    return out;
}

PricePanel PricePanel::columns(const std::vector<Index>& keep) const {
    PricePanel out;
    out.dates = dates;
    out.prices.resize(days(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.tickers.push_back(tickers.at(static_cast<std::size_t>(keep[k])));
        out.prices.col(static_cast<Index>(k)) = prices.col(keep[k]);
    }
    return out;
}

void PricePanel::validate(bool allow_missing) const {
    if (static_cast<Index>(dates.size()) != prices.rows() || static_cast<Index>(tickers.size()) != prices.cols()) {
        throw Error(ErrorCode::LengthMismatch, "panel shape does not match dates/tickers");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] == dates[i - 1]) throw Error(ErrorCode::DuplicateDate, format_date(dates[i]));
        if (dates[i] < dates[i - 1]) throw Error(ErrorCode::MalformedRow, "dates not increasing at " + format_date(dates[i]));
    }
    std::set<std::string> seen;
    for (const auto& t : tickers) {
        if (!seen.insert(t).second) throw Error(ErrorCode::MalformedRow, "duplicate ticker " + t);
    }
    for (Index c = 0; c < prices.cols(); ++c) {
        for (Index r = 0; r < prices.rows(); ++r) {
            double v = prices(r, c);
            if (std::isnan(v)) {
                if (!allow_missing) {
                    throw Error(ErrorCode::NonFinite,
                                "missing price for " + tickers[static_cast<std::size_t>(c)] + " on " +
                                    format_date(dates[static_cast<std::size_t>(r)]));
                }
                continue;
            }
            if (!std::isfinite(v) || v <= 0.0) {
                throw Error(ErrorCode::NonPositivePrice,
                            tickers[static_cast<std::size_t>(c)] + " on " + format_date(dates[static_cast<std::size_t>(r)]));
            }
        }
    }
}

PricePanel load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Unreadable, "cannot open " + path.string());
    return parse_csv(in, path.string());
}

PricePanel parse_csv(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedRow, std::string(source) + ": empty file");
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    auto header = split_fields(line);
    if (header.empty() || header[0] != "date") {
        throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": first header must be 'date'");
    }
    PricePanel panel;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < header.size(); ++i) {
        std::string ticker(header[i]);
        if (ticker.empty()) throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": empty ticker header");
        if (!seen.insert(ticker).second) {
            throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": duplicate ticker " + ticker);
        }
        panel.tickers.push_back(std::move(ticker));
    }
    const std::size_t n = panel.tickers.size();

    std::vector<std::pair<Date, std::vector<double>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != n + 1) {
            throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": expected " + std::to_string(n + 1) +
                                                     " fields, got " + std::to_string(fields.size()));
        }
        auto date = parse_date(fields[0]);
        if (!date) throw Error(ErrorCode::MalformedRow, where(source, line_no) + ": bad date '" + std::string(fields[0]) + "'");
        std::vector<double> values(n, kMissing);
        for (std::size_t i = 0; i < n; ++i) {
            auto cell = fields[i + 1];
            if (cell.empty()) continue;
            auto v = parse_double(cell);
            if (!v || !std::isfinite(*v)) {
                throw Error(ErrorCode::MalformedRow,
                            where(source, line_no) + ": bad price '" + std::string(cell) + "' for " + panel.tickers[i]);
            }
            if (*v <= 0.0) {
                throw Error(ErrorCode::NonPositivePrice,
                            where(source, line_no) + ": " + panel.tickers[i] + " on " +
                                std::string(fields[0]) + " = " + std::string(cell));
            }
            values[i] = *v;
        }
        rows.emplace_back(*date, std::move(values));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first) {
            throw Error(ErrorCode::DuplicateDate, std::string(source) + ": " + format_date(rows[i].first));
        }
    }
    panel.prices.resize(static_cast<Index>(rows.size()), static_cast<Index>(n));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        panel.dates.push_back(rows[r].first);
        for (std::size_t c = 0; c < n; ++c) panel.prices(static_cast<Index>(r), static_cast<Index>(c)) = rows[r].second[c];
    }
    return panel;
}

void write_csv(const PricePanel& panel, std::ostream& out) {
    out << "date";
    for (const auto& t : panel.tickers) out << ',' << t;
    out << '\n';
    char buf[64];
    for (Index r = 0; r < panel.days(); ++r) {
        out << format_date(panel.dates[static_cast<std::size_t>(r)]);
        for (Index c = 0; c < panel.series(); ++c) {
            out << ',';
            double v = panel.prices(r, c);
            if (std::isnan(v)) continue;
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

ImputeResult impute(const PricePanel& panel) {
    const Index T = panel.days();
    Eigen::MatrixXd filled = panel.prices;
    std::vector<Index> keep;
    ImputeResult result;
    for (Index c = 0; c < panel.series(); ++c) {
        auto col = filled.col(c);
        Index prev_known = -1;
        for (Index r = 0; r < T; ++r) {
            if (std::isnan(col(r))) continue;
            if (prev_known >= 0 && r - prev_known > 1) {
                const double a = col(prev_known);
                const double b = col(r);
                const double span = static_cast<double>(r - prev_known);
                for (Index k = prev_known + 1; k < r; ++k) {
                    col(k) = a + (b - a) * static_cast<double>(k - prev_known) / span;
                }
            }
            prev_known = r;
        }
        if (T > 0 && !col.array().isNaN().any()) {
            keep.push_back(c);
        } else {
            result.dropped.push_back(panel.tickers[static_cast<std::size_t>(c)]);
        }
    }
    if (keep.empty()) throw Error(ErrorCode::EmptyPanel, "every series has an uninterpolatable gap");
    PricePanel interpolated = panel;
    interpolated.prices = std::move(filled);
    result.panel = interpolated.columns(keep);
    return result;
}

std::size_t split_index(std::size_t days, double train_frac) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
    }
    // The epsilon absorbs representation error in train_frac (0.8 * 5 must be 4).
    return static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(days) + 1e-9));
}

SplitPanel split(const PricePanel& panel, double train_frac, int tau) {
    const auto T = static_cast<std::size_t>(panel.days());
    const std::size_t s = split_index(T, train_frac);
    if (tau < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    if (s < static_cast<std::size_t>(tau) + 2) {
        throw Error(ErrorCode::PanelTooShort, "training window of " + std::to_string(s) + " rows is shorter than tau + 2");
    }
    if (s >= T) throw Error(ErrorCode::PanelTooShort, "no rows left for the test period");
    SplitPanel out;
    out.split_index = s;
    out.train = panel.rows(0, static_cast<Index>(s));
    out.test = panel.rows(static_cast<Index>(s), static_cast<Index>(T));
    return out;
}

}  // namespace cdtrade
