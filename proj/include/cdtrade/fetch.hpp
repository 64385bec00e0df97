#pragma once

#include "cdtrade/date.hpp"
#include "cdtrade/market_data.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cdtrade {

struct FetchOptions {
    // e.g. "http://127.0.0.1:8080/prices/{ticker}?start={start}&end={end}"
    std::string url_template;
    std::filesystem::path cache_dir = ".cdtrade-cache";
    Date start{};
    Date end{};
    int max_attempts = 4;
    std::chrono::milliseconds base_backoff{100};
    std::chrono::milliseconds max_backoff{2000};
    std::chrono::seconds timeout{15};
};

struct FetchReport {
    std::filesystem::path output;
    std::vector<std::string> downloaded;
    std::vector<std::string> from_cache;
    std::map<std::string, std::string> failed;  // ticker -> reason
    std::size_t network_calls = 0;
};

// Parses one ticker's response: a CSV with a `date` column and a price column
// (adj_close, adj close, close or price; otherwise the second column).
// Returns (dates, prices); rows with an empty or "null" price are skipped.
std::pair<std::vector<Date>, std::vector<double>> parse_price_response(const std::string& body);

// Downloads every ticker not already cached for [start, end], merges all
// successful series into the load_csv layout at `output`. A ticker that fails
// (HTTP error, malformed body, retries exhausted) is reported and skipped.
FetchReport fetch_remote(const std::vector<std::string>& tickers, const FetchOptions& options,
                         const std::filesystem::path& output);

std::string expand_url_template(const std::string& url_template, const std::string& ticker, Date start, Date end);

}  // namespace cdtrade
