#include "cdtrade/error.hpp"
#include "cdtrade/fetch.hpp"
#include "cdtrade/market_data.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace cdtrade;

namespace {

// Local price server: /prices/<ticker>. BAD answers 404, FLAKY fails twice
// with 503 before answering.
class PriceServer {
public:
    PriceServer() {
        server_.Get(R"(/prices/([A-Za-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests;
            const std::string ticker = req.matches[1];
            if (ticker == "BAD") {
                res.status = 404;
                return;
            }
            if (ticker == "FLAKY" && flaky_failures++ < 2) {
                res.status = 503;
                return;
            }
            if (ticker == "JUNK") {
                res.set_content("<html>oops</html>", "text/html");
                return;
            }
            const double base = ticker == "AAA" ? 10.0 : 20.0;
            std::string body = "Date,Open,Close,Adj Close\n";
            body += "2024-01-03,1," + std::to_string(base + 1) + "," + std::to_string(base + 0.5) + "\n";
            body += "2024-01-02,1," + std::to_string(base) + "," + std::to_string(base - 0.5) + "\n";
            if (ticker != "AAA") body += "2024-01-04,1,null,null\n2024-01-05,1,30,29.5\n";
            res.set_content(body, "text/csv");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~PriceServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/prices/{ticker}?from={start}&to={end}"; }

    std::atomic<int> requests{0};
    std::atomic<int> flaky_failures{0};

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

FetchOptions options(const PriceServer& s, const testing::TempDir& dir) {
    FetchOptions o;
    o.url_template = s.url();
    o.cache_dir = dir / "cache";
    o.start = *parse_date("2024-01-01");
    o.end = *parse_date("2024-01-31");
    o.base_backoff = std::chrono::milliseconds(1);
    o.max_backoff = std::chrono::milliseconds(4);
    o.timeout = std::chrono::seconds(5);
    return o;
}

}  // namespace

TEST_CASE("download, merge, then serve from cache") {
    PriceServer server;
    testing::TempDir dir;
    const auto opts = options(server, dir);
    const auto first = fetch_remote({"AAA", "BBB"}, opts, dir / "prices.csv");
    CHECK(first.downloaded == std::vector<std::string>{"AAA", "BBB"});
    CHECK(first.failed.empty());
    CHECK(first.network_calls == 2);

    const auto panel = load_csv(dir / "prices.csv");
    CHECK(panel.tickers == std::vector<std::string>{"AAA", "BBB"});
    REQUIRE(panel.days() == 3);
    CHECK(panel.prices(0, 0) == 9.5);   // adjusted close preferred
    CHECK(panel.prices(1, 1) == 20.5);
    CHECK(std::isnan(panel.prices(2, 0)));  // AAA has no 2024-01-05
    CHECK(format_date(panel.dates[2]) == "2024-01-05");

    const int before = server.requests;
    const auto second = fetch_remote({"AAA", "BBB"}, opts, dir / "again.csv");
    CHECK(second.network_calls == 0);
    CHECK(second.from_cache == std::vector<std::string>{"AAA", "BBB"});
    CHECK(server.requests == before);
    CHECK(testing::slurp(dir / "again.csv") == testing::slurp(dir / "prices.csv"));
}

TEST_CASE("a failing ticker is isolated") {
    PriceServer server;
    testing::TempDir dir;
    const auto r = fetch_remote({"AAA", "BAD", "JUNK", "BBB"}, options(server, dir), dir / "prices.csv");
    CHECK(r.failed.size() == 2);
    CHECK(r.failed.at("BAD").find("404") != std::string::npos);
    CHECK(r.failed.count("JUNK") == 1);
    CHECK(r.downloaded == std::vector<std::string>{"AAA", "BBB"});
    CHECK(r.network_calls == 4);  // no retries on 404
    CHECK(load_csv(dir / "prices.csv").tickers == std::vector<std::string>{"AAA", "BBB"});
}

TEST_CASE("transient errors are retried with backoff") {
    PriceServer server;
    testing::TempDir dir;
    const auto r = fetch_remote({"FLAKY"}, options(server, dir), dir / "prices.csv");
    CHECK(r.failed.empty());
    CHECK(r.network_calls == 3);

    auto opts = options(server, dir);
    opts.max_attempts = 1;
    server.flaky_failures = 0;
    opts.cache_dir = dir / "other";
    const auto once = fetch_remote({"FLAKY"}, opts, dir / "p2.csv");
    CHECK(once.failed.count("FLAKY") == 1);
}

TEST_CASE("unreachable endpoint fails every ticker without throwing") {
    testing::TempDir dir;
    FetchOptions o;
    o.url_template = "http://127.0.0.1:1/{ticker}";
    o.cache_dir = dir / "cache";
    o.start = o.end = *parse_date("2024-01-02");
    o.max_attempts = 2;
    o.base_backoff = std::chrono::milliseconds(1);
    o.timeout = std::chrono::seconds(1);
    const auto r = fetch_remote({"AAA"}, o, dir / "prices.csv");
    CHECK(r.failed.count("AAA") == 1);
    CHECK(r.network_calls == 2);
}

TEST_CASE("empty ticker list makes no requests") {
    testing::TempDir dir;
    FetchOptions o;
    o.url_template = "http://127.0.0.1:1/{ticker}";
    o.cache_dir = dir / "cache";
    const auto r = fetch_remote({}, o, dir / "prices.csv");
    CHECK(r.network_calls == 0);
    CHECK(testing::slurp(dir / "prices.csv") == "date\n");
}

TEST_CASE("response parsing") {
    const auto a = parse_price_response("date,price\n2024-01-03,2\n2024-01-02,1\n");
    CHECK(a.second == std::vector<double>{1.0, 2.0});
    const auto b = parse_price_response("timestamp_is_not_used,Date\n5,2024-01-02\n");
    CHECK(b.second == std::vector<double>{5.0});
    const auto c = parse_price_response("date,close,volume\n2024-01-02,NaN,1\n2024-01-03,7,2\n");
    CHECK(c.first.size() == 1);
    CHECK_THROWS_AS(parse_price_response(""), Error);
    CHECK_THROWS_AS(parse_price_response("date,open,high\n2024-01-02,1,2\n"), Error);
    CHECK_THROWS_AS(parse_price_response("date,close\n2024-01-02,-4\n"), Error);
    CHECK_THROWS_AS(parse_price_response("date,close\n2024-01-02,1\n2024-01-02,2\n"), Error);
}

TEST_CASE("url template expansion") {
    const auto url = expand_url_template("http://h/{ticker}?a={start}&b={end}&t={ticker}", "XYZ",
                                         *parse_date("2020-02-03"), *parse_date("2021-12-31"));
    CHECK(url == "http://h/XYZ?a=2020-02-03&b=2021-12-31&t=XYZ");
}
