#pragma once

#include "cdtrade/date.hpp"
#include "cdtrade/market_data.hpp"

#include <Eigen/Dense>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using cdtrade::Date;
using cdtrade::Index;
using cdtrade::PricePanel;

inline std::vector<Date> business_days(Index n) {
    std::vector<Date> out;
    Date d = *cdtrade::parse_date("2020-01-01");
    for (Index i = 0; i < n; ++i) {
        out.push_back(d);
        d = cdtrade::next_weekday(d);
    }
    return out;
}

inline std::vector<std::string> names(Index n) {
    std::vector<std::string> out;
    for (Index i = 0; i < n; ++i) out.push_back("T" + std::to_string(100 + i));
    return out;
}

inline PricePanel make_panel(const Eigen::MatrixXd& prices, std::vector<std::string> tickers = {}) {
    PricePanel p;
    p.dates = business_days(prices.rows());
    p.tickers = tickers.empty() ? names(prices.cols()) : std::move(tickers);
    p.prices = prices;
    return p;
}

inline PricePanel parse(const std::string& text) {
    std::istringstream in(text);
    return cdtrade::parse_csv(in);
}

// Geometric random walks around 100.
inline Eigen::MatrixXd random_walk_prices(Index days, Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 0.01);
    Eigen::MatrixXd p(days, n);
    for (Index c = 0; c < n; ++c) {
        double v = 100.0 + static_cast<double>(c);
        for (Index r = 0; r < days; ++r) {
            p(r, c) = v;
            v *= std::exp(step(rng));
        }
    }
    return p;
}

// Least squares through the normal equations, solved independently of the
// library's QR route.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("cdtrade_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testing
