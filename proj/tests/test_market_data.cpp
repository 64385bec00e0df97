#include "cdtrade/error.hpp"
#include "cdtrade/market_data.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace cdtrade;
using testing::parse;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("load: complete three-day panel") {
    const auto p = parse("date,AAA,BBB\n2021-01-04,10,20\n2021-01-05,11,21\n2021-01-06,12,22\n");
    CHECK(p.days() == 3);
    CHECK(p.series() == 2);
    CHECK_FALSE(p.has_missing());
    CHECK(p.tickers == std::vector<std::string>{"AAA", "BBB"});
    CHECK(p.prices(2, 1) == 22.0);
    CHECK(format_date(p.dates[0]) == "2021-01-04");
}

TEST_CASE("load: CRLF, BOM, unsorted rows and empty cells") {
    const auto p = parse("\xEF\xBB\xBF" "date,A,B\r\n2021-01-06,3,\r\n2021-01-04,1,5\r\n2021-01-05,,6\r\n");
    REQUIRE(p.days() == 3);
    CHECK(format_date(p.dates[0]) == "2021-01-04");
    CHECK(format_date(p.dates[2]) == "2021-01-06");
    CHECK(std::isnan(p.prices(1, 0)));
    CHECK(std::isnan(p.prices(2, 1)));
    CHECK(p.has_missing());
}

TEST_CASE("load: rejected inputs") {
    CHECK(code_of([] { parse("date,A\n2021-01-04,1\n2021-01-04,2\n"); }) == ErrorCode::DuplicateDate);
    CHECK(code_of([] { parse("date,A\n2021-01-04,-1.0\n"); }) == ErrorCode::NonPositivePrice);
    CHECK(code_of([] { parse("date,A\n2021-01-04,0\n"); }) == ErrorCode::NonPositivePrice);
    CHECK(code_of([] { parse("day,A\n2021-01-04,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse("date,A\n2021-13-04,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse("date,A\n2021-01-04,abc\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { parse("date,A,B\n2021-01-04,1\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { load_csv("/nonexistent/prices.csv"); }) == ErrorCode::Unreadable);
}

TEST_CASE("load: error messages name the ticker and date") {
    try {
        parse("date,A,BAD\n2021-01-04,1,2\n2021-01-05,1,-3\n");
        FAIL("expected NonPositivePrice");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("BAD") != std::string::npos);
        CHECK(msg.find("2021-01-05") != std::string::npos);
    }
}

TEST_CASE("csv round trip keeps every bit") {
    Eigen::MatrixXd prices = testing::random_walk_prices(20, 3, 7);
    prices(4, 1) = std::nan("");
    const auto p = testing::make_panel(prices);
    std::stringstream ss;
    write_csv(p, ss);
    const auto q = parse(ss.str());
    CHECK(q.tickers == p.tickers);
    CHECK(q.dates == p.dates);
    for (Index r = 0; r < 20; ++r)
        for (Index c = 0; c < 3; ++c) {
            if (std::isnan(p.prices(r, c))) CHECK(std::isnan(q.prices(r, c)));
            else CHECK(q.prices(r, c) == p.prices(r, c));
        }
}

TEST_CASE("impute: interior gap is interpolated linearly") {
    const auto res = impute(parse("date,A\n2021-01-04,1.0\n2021-01-05,\n2021-01-06,3.0\n"));
    CHECK(res.dropped.empty());
    CHECK(res.panel.prices(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("impute: uneven gap uses distance weights") {
    const auto res = impute(parse("date,A\n2021-01-04,10\n2021-01-05,\n2021-01-06,\n2021-01-07,16\n"));
    CHECK(res.panel.prices(1, 0) == doctest::Approx(12.0));
    CHECK(res.panel.prices(2, 0) == doctest::Approx(14.0));
}

TEST_CASE("impute: leading and trailing gaps drop the series") {
    const auto res = impute(parse("date,A,B,C\n2021-01-04,,1,5\n2021-01-05,2,2,6\n2021-01-06,3,3,\n"));
    CHECK(res.dropped == std::vector<std::string>{"A", "C"});
    CHECK(res.panel.tickers == std::vector<std::string>{"B"});
    CHECK_FALSE(res.panel.has_missing());
}

TEST_CASE("impute: complete panel is unchanged") {
    const auto p = testing::make_panel(testing::random_walk_prices(30, 4, 1));
    const auto res = impute(p);
    CHECK(res.dropped.empty());
    CHECK(res.panel.prices == p.prices);
    CHECK(res.panel.tickers == p.tickers);
}

TEST_CASE("impute: nothing survives") {
    CHECK(code_of([] { impute(parse("date,A\n2021-01-04,\n2021-01-05,1\n")); }) == ErrorCode::EmptyPanel);
}

TEST_CASE("impute properties on random gappy panels") {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution hole(0.15);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd prices = testing::random_walk_prices(25, 6, static_cast<unsigned>(trial));
        for (Index r = 0; r < prices.rows(); ++r)
            for (Index c = 1; c < prices.cols(); ++c)
                if (hole(rng)) prices(r, c) = std::nan("");
        const auto raw = testing::make_panel(prices);
        const auto once = impute(raw);
        CHECK(once.dropped.size() + static_cast<std::size_t>(once.panel.series()) ==
              static_cast<std::size_t>(raw.series()));
        CHECK_FALSE(once.panel.has_missing());
        CHECK((once.panel.prices.array() > 0).all());
        const auto twice = impute(once.panel);
        CHECK(twice.dropped.empty());
        CHECK(twice.panel.prices == once.panel.prices);
        CHECK(twice.panel.tickers == once.panel.tickers);
    }
}

TEST_CASE("split reproduces the published train/test counts") {
    CHECK(split_index(2604, 0.8) == 2083);
    CHECK(split_index(1259, 0.8) == 1007);
    CHECK(split_index(2513, 0.8) == 2010);
    CHECK(split_index(5, 0.8) == 4);
    CHECK(code_of([] { split_index(10, 0.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { split_index(10, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("split preserves every price and concatenates back") {
    for (Index days : {10, 37, 1259}) {
        const auto p = testing::make_panel(testing::random_walk_prices(days, 3, 5));
        const auto s = split(p, 0.8, 1);
        CHECK(static_cast<Index>(s.split_index) == s.train.days());
        CHECK(s.train.days() + s.test.days() == p.days());
        Eigen::MatrixXd joined(p.days(), p.series());
        joined << s.train.prices, s.test.prices;
        CHECK(joined == p.prices);
        std::vector<Date> dates = s.train.dates;
        dates.insert(dates.end(), s.test.dates.begin(), s.test.dates.end());
        CHECK(dates == p.dates);
    }
}

TEST_CASE("split: training window shorter than tau + 2") {
    const auto p = testing::make_panel(testing::random_walk_prices(4, 2, 5));
    CHECK(code_of([&] { split(p, 0.8, 2); }) == ErrorCode::PanelTooShort);
    CHECK(split(p, 0.8, 1).train.days() == 3);
    CHECK(split(p, 0.8, 1).test.days() == 1);
    const auto tiny = testing::make_panel(testing::random_walk_prices(3, 2, 5));
    CHECK(code_of([&] { split(tiny, 0.8, 1); }) == ErrorCode::PanelTooShort);
}
