#include "cdtrade/fetch.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/resources.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace cdtrade {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string safe_name(const std::string& ticker) {
    std::string out;
    for (char c : ticker) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
    return out;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
}

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string target;  // /path?query
};

Url split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::InvalidArgument, "endpoint must be an absolute URL: " + url);
    const auto path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

std::string serialize_series(const std::vector<Date>& dates, const std::vector<double>& prices) {
    std::ostringstream out;
    out << "date,price\n";
    char buf[64];
    for (std::size_t i = 0; i < dates.size(); ++i) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), prices[i]);
        out << format_date(dates[i]) << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
    }
    return out.str();
}

}  // namespace

std::string expand_url_template(const std::string& url_template, const std::string& ticker, Date start, Date end) {
    std::string url = url_template;
    replace_all(url, "{ticker}", ticker);
    replace_all(url, "{start}", format_date(start));
    replace_all(url, "{end}", format_date(end));
    return url;
}

std::pair<std::vector<Date>, std::vector<double>> parse_price_response(const std::string& body) {
    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedResponse, "empty response body");
    auto header = split_commas(line);
    std::size_t date_col = header.size(), price_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (lower(header[i]) == "date") date_col = i;
    }
    for (const char* name : {"adj_close", "adj close", "adjclose", "close", "price"}) {
        for (std::size_t i = 0; i < header.size() && price_col == header.size(); ++i) {
            if (lower(header[i]) == name) price_col = i;
        }
    }
    if (price_col == header.size() && header.size() == 2 && date_col < 2) price_col = 1 - date_col;
    if (date_col == header.size() || price_col == header.size()) {
        throw Error(ErrorCode::MalformedResponse, "response lacks date/price columns: " + line);
    }

    std::vector<std::pair<Date, double>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_commas(line);
        if (cells.size() <= std::max(date_col, price_col)) throw Error(ErrorCode::MalformedResponse, "short row: " + line);
        auto date = parse_date(cells[date_col]);
        if (!date) throw Error(ErrorCode::MalformedResponse, "bad date: " + cells[date_col]);
        const std::string& cell = cells[price_col];
        if (cell.empty() || lower(cell) == "null" || lower(cell) == "nan") continue;
        double v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size() || !(v > 0.0)) {
            throw Error(ErrorCode::MalformedResponse, "bad price: " + cell);
        }
        rows.emplace_back(*date, v);
    }
    std::sort(rows.begin(), rows.end());
    std::pair<std::vector<Date>, std::vector<double>> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first) throw Error(ErrorCode::MalformedResponse, "duplicate date");
        out.first.push_back(rows[i].first);
        out.second.push_back(rows[i].second);
    }
    return out;
}

FetchReport fetch_remote(const std::vector<std::string>& tickers, const FetchOptions& options,
                         const std::filesystem::path& output) {
    FetchReport report;
    report.output = output;
    std::map<std::string, std::pair<std::vector<Date>, std::vector<double>>> series;
    std::vector<std::string> ordered;

    for (const auto& ticker : tickers) {
        if (std::find(ordered.begin(), ordered.end(), ticker) != ordered.end() || report.failed.count(ticker)) continue;
        const auto cache_file = options.cache_dir / (safe_name(ticker) + "_" + format_date(options.start) + "_" +
                                                     format_date(options.end) + ".csv");
        if (std::filesystem::exists(cache_file)) {
            std::ifstream in(cache_file);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                series[ticker] = parse_price_response(ss.str());
                ordered.push_back(ticker);
                report.from_cache.push_back(ticker);
                continue;
            } catch (const Error&) {
                std::filesystem::remove(cache_file);  // corrupt cache entry; fetch again
            }
        }

        const Url url = split_url(expand_url_template(options.url_template, ticker, options.start, options.end));
        httplib::Client client(url.origin);
        client.set_connection_timeout(options.timeout);
        client.set_read_timeout(options.timeout);
        std::string failure;
        std::optional<std::string> body;
        auto backoff = options.base_backoff;
        for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
            ++report.network_calls;
            auto res = client.Get(url.target);
            if (res && res->status == 200) {
                body = res->body;
                break;
            }
            const bool transient = !res || res->status >= 500 || res->status == 429;
            failure = res ? "HTTP " + std::to_string(res->status) : "network error: " + httplib::to_string(res.error());
            if (!transient || attempt == options.max_attempts) break;
            std::this_thread::sleep_for(backoff);
            backoff = std::min(backoff * 2, options.max_backoff);
        }
        if (!body) {
            report.failed[ticker] = failure;
            continue;
        }
        try {
            auto parsed = parse_price_response(*body);
            atomic_write(cache_file, [&](std::ostream& o) { o << serialize_series(parsed.first, parsed.second); });
            series[ticker] = std::move(parsed);
            ordered.push_back(ticker);
            report.downloaded.push_back(ticker);
        } catch (const Error& e) {
            report.failed[ticker] = e.what();
        }
    }

    std::set<Date> all_dates;
    for (const auto& t : ordered)
        for (Date d : series[t].first) all_dates.insert(d);
    PricePanel merged;
    merged.tickers = ordered;
    merged.dates.assign(all_dates.begin(), all_dates.end());
    merged.prices = Eigen::MatrixXd::Constant(static_cast<Index>(merged.dates.size()), static_cast<Index>(ordered.size()),
                                              std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < ordered.size(); ++c) {
        const auto& [dates, prices] = series[ordered[c]];
        for (std::size_t k = 0; k < dates.size(); ++k) {
            merged.prices(*merged.date_index(dates[k]), static_cast<Index>(c)) = prices[k];
        }
    }
    atomic_write(output, [&](std::ostream& o) { write_csv(merged, o); });
    return report;
}

}  // namespace cdtrade
