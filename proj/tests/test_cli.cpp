#include "cli.hpp"

#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

using namespace cdtrade;
using nlohmann::json;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "cdtrade");
    args.push_back("--log-level");
    args.push_back("off");
    return cli::run(args);
}

void save_panel(const PricePanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    write_csv(panel, out);
}

json read_json(const std::filesystem::path& path) { return json::parse(testing::slurp(path)); }

std::vector<std::string> csv_lines(const std::filesystem::path& path) {
    std::istringstream in(testing::slurp(path));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

PricePanel cross_lag_panel(Index days) {
    Eigen::MatrixXd p(days, 2);
    p.row(0) << 100.0, 120.0;
    for (Index t = 1; t < days; ++t) {
        p(t, 0) = p(t - 1, 1);
        p(t, 1) = 200.0 - p(t - 1, 0);
    }
    return testing::make_panel(p, {"X", "Y"});
}

}  // namespace

TEST_CASE("duration and memory parsing") {
    CHECK(cli::parse_duration("30") == 30.0);
    CHECK(cli::parse_duration("500ms") == doctest::Approx(0.5));
    CHECK(cli::parse_duration("2m") == 120.0);
    CHECK(cli::parse_duration("1h") == 3600.0);
    CHECK_THROWS(cli::parse_duration("soon"));
    CHECK_THROWS(cli::parse_duration("-1s"));
    CHECK(cli::parse_memory("16GB") == 16.0 * 1073741824.0);
    CHECK(cli::parse_memory("512") == 512.0 * 1048576.0);
    CHECK(cli::parse_memory("64k") == 64.0 * 1024.0);
    CHECK_THROWS(cli::parse_memory("lots"));
}

TEST_CASE("discover writes graph files and reruns byte-identically") {
    testing::TempDir dir;
    save_panel(testing::make_panel(testing::random_walk_prices(120, 5, 21)), dir / "prices.csv");
    const std::string in = (dir / "prices.csv").string();
    REQUIRE(run({"discover", "--input", in, "--out-dir", (dir / "a").string(), "--seed", "7"}) == 0);
    REQUIRE(run({"discover", "--input", in, "--out-dir", (dir / "b").string(), "--seed", "7"}) == 0);
    for (const char* name : {"graph.txt", "graph.json"}) {
        CHECK(std::filesystem::exists(dir / "a" / name));
        CHECK(testing::slurp(dir / "a" / name) == testing::slurp(dir / "b" / name));
    }
    auto a = read_json(dir / "a" / "discover_summary.json");
    auto b = read_json(dir / "b" / "discover_summary.json");
    a["config"].erase("out_dir");
    b["config"].erase("out_dir");
    CHECK(a == b);
    CHECK(a["rows_used"] == 96);
    CHECK(a["config"]["tau"] == 1);
    CHECK(std::filesystem::exists(dir / "a" / "discover_timing.json"));
}

TEST_CASE("discover exit codes") {
    testing::TempDir dir;
    save_panel(testing::make_panel(testing::random_walk_prices(60, 3, 1)), dir / "ok.csv");
    CHECK(run({"discover", "--input", (dir / "ok.csv").string(), "--tau", "0", "--out-dir", dir.path().string()}) == 1);
    CHECK(run({"discover", "--out-dir", dir.path().string()}) == 1);
    CHECK(run({"discover", "--input", (dir / "ok.csv").string(), "--train-frac", "1.5"}) == 1);

    save_panel(testing::make_panel(testing::random_walk_prices(2, 3, 1)), dir / "short.csv");
    CHECK(run({"discover", "--input", (dir / "short.csv").string(), "--out-dir", dir.path().string()}) == 2);
    CHECK(run({"discover", "--input", (dir / "missing.csv").string(), "--out-dir", dir.path().string()}) == 2);
    testing::write_file(dir / "bad.csv", "date,A,B\n2020-01-01,1,-2\n2020-01-02,1,2\n2020-01-03,1,2\n");
    CHECK(run({"discover", "--input", (dir / "bad.csv").string(), "--out-dir", dir.path().string()}) == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "graph.txt"));
}

TEST_CASE("backtest on the two-ticker exact-lag panel matches the hand trace") {
    testing::TempDir dir;
    const PricePanel panel = cross_lag_panel(50);
    save_panel(panel, dir / "prices.csv");
    SummaryGraph g({"X", "Y"});
    g.add_edge(1, 0, 1);
    g.add_edge(0, 1, 1);
    {
        std::ofstream out(dir / "graph.txt");
        write_edge_list(g, out);
    }
    REQUIRE(run({"backtest", "--input", (dir / "prices.csv").string(), "--graph", (dir / "graph.txt").string(),
                 "--eta", "1", "--cost", "0", "--out-dir", (dir / "out").string()}) == 0);

    // Trades on days 40..48; day 49 has no next price. Each day earns the
    // better of the two possible long/short assignments.
    double growth = 1.0;
    for (Index t = 40; t <= 48; ++t) {
        const double rx = panel.prices(t + 1, 0) / panel.prices(t, 0) - 1.0;
        const double ry = panel.prices(t + 1, 1) / panel.prices(t, 1) - 1.0;
        growth *= 1.0 + std::abs(rx - ry);
    }
    const double cumulative = growth - 1.0;
    const double annualized = std::pow(growth, 252.0 / 10.0) - 1.0;

    const json doc = read_json(dir / "out" / "summary.json");
    CHECK(doc["test_days"] == 10);
    const double got_cum = doc["series"]["strategy"]["cumulative_return"].get<double>();
    const double got_ann = doc["series"]["strategy"]["annualized_return"].get<double>();
    CHECK(std::abs(got_cum - cumulative) <= 1e-10 * std::abs(cumulative));
    CHECK(std::abs(got_ann - annualized) <= 1e-10 * std::abs(annualized));
    CHECK(doc["config"]["cost"] == 0.0);
    for (const char* name : {"timing.json", "daily_returns.csv", "cumulative.csv", "blotter.csv"}) {
        CHECK(std::filesystem::exists(dir / "out" / name));
    }
    CHECK_FALSE(std::filesystem::exists(dir / "out" / "predictions.csv"));
}

TEST_CASE("backtest with the self-cause graph reproduces the control") {
    testing::TempDir dir;
    save_panel(testing::make_panel(testing::random_walk_prices(100, 6, 5)), dir / "prices.csv");
    REQUIRE(run({"backtest", "--input", (dir / "prices.csv").string(), "--graph", "self", "--eta", "2", "--out-dir",
                 dir.path().string(), "--dump-predictions"}) == 0);
    const auto lines = csv_lines(dir / "daily_returns.csv");
    REQUIRE(lines.size() > 1);
    CHECK(lines.front().rfind("date,strategy,self_cause_control", 0) == 0);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string date, strategy, control;
        std::getline(row, date, ',');
        std::getline(row, strategy, ',');
        std::getline(row, control, ',');
        CHECK(strategy == control);
    }
    CHECK(std::filesystem::exists(dir / "predictions.csv"));
}

TEST_CASE("backtest exit codes") {
    testing::TempDir dir;
    save_panel(testing::make_panel(testing::random_walk_prices(80, 4, 2)), dir / "prices.csv");
    const std::string in = (dir / "prices.csv").string();
    CHECK(run({"backtest", "--input", in, "--graph", "self", "--benchmark", (dir / "nope.csv").string(), "--out-dir",
               dir.path().string()}) == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "summary.json"));
    CHECK(run({"backtest", "--input", in, "--out-dir", dir.path().string()}) == 1);
    CHECK(run({"backtest", "--input", in, "--graph", "self", "--eta", "1", "--eta-frac", "0.2"}) == 1);
    CHECK(run({"backtest", "--input", in, "--graph", "self", "--discover"}) == 1);
    CHECK(run({"backtest", "--input", in, "--graph", "self", "--cost", "-0.1"}) == 1);
}

TEST_CASE("backtest with inline discovery and a benchmark") {
    testing::TempDir dir;
    const PricePanel panel = testing::make_panel(testing::random_walk_prices(90, 5, 8));
    save_panel(panel, dir / "prices.csv");
    PricePanel bench = panel;
    bench.tickers = {"IDX"};
    bench.prices = panel.prices.col(0);
    save_panel(bench, dir / "bench.csv");
    REQUIRE(run({"backtest", "--input", (dir / "prices.csv").string(), "--discover", "--benchmark",
                 (dir / "bench.csv").string(), "--eta-frac", "0.2", "--out-dir", dir.path().string()}) == 0);
    CHECK(std::filesystem::exists(dir / "graph.txt"));
    const json doc = read_json(dir / "summary.json");
    CHECK(doc["series"].contains("benchmark"));
    CHECK(doc["config"]["eta_frac"] == 0.2);
}

TEST_CASE("synth-bench writes one row per seed") {
    testing::TempDir dir;
    REQUIRE(run({"synth-bench", "--n-vars", "4", "--days", "400", "--seeds", "3", "--out-dir", dir.path().string()}) ==
            0);
    const auto lines = csv_lines(dir / "synth_bench.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "n_vars,T,tau,noise,seed,precision,recall,f1,shd,wall_seconds,peak_mem_mb,status");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CHECK(lines[i].rfind("4,400,1,uniform," + std::to_string(i - 1) + ",", 0) == 0);
        CHECK(lines[i].substr(lines[i].size() - 3) == ",ok");
    }
    const json summary = read_json(dir / "synth_bench_summary.json");
    REQUIRE(summary["cells"].size() == 1);
    CHECK(summary["cells"][0]["completed"] == 3);
    CHECK(summary["cells"][0]["mean_f1"].is_number());
}

TEST_CASE("synth-bench with an empty grid writes only the header") {
    testing::TempDir dir;
    REQUIRE(run({"synth-bench", "--seeds", "0", "--out-dir", dir.path().string()}) == 0);
    const auto lines = csv_lines(dir / "synth_bench.csv");
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].rfind("n_vars,", 0) == 0);
}

TEST_CASE("synth-bench marks a cell past its time budget and still exits 0") {
    testing::TempDir dir;
    REQUIRE(run({"synth-bench", "--n-vars", "200", "--days", "3000", "--seeds", "1", "--time-budget", "1s",
                 "--out-dir", dir.path().string()}) == 0);
    const auto lines = csv_lines(dir / "synth_bench.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].substr(lines[1].size() - 8) == ",timeout");
}

TEST_CASE("synth-bench rejects an unknown noise family") {
    testing::TempDir dir;
    CHECK(run({"synth-bench", "--noise", "cauchy", "--out-dir", dir.path().string()}) == 1);
}

TEST_CASE("profile reports n/a for a single size and records MemoryLimit") {
    testing::TempDir dir;
    REQUIRE(run({"profile", "--n-vars", "6", "--days", "300", "--out-dir", dir.path().string()}) == 0);
    json doc = read_json(dir / "profile.json");
    REQUIRE(doc["rows"].size() == 1);
    CHECK(doc["rows"][0]["status"] == "ok");
    CHECK(doc["fits"][0]["exponent"] == "n/a");

    REQUIRE(run({"profile", "--n-vars", "6,12", "--days", "300", "--mem-cap", "0.01MB", "--out-dir",
                 dir.path().string()}) == 0);
    doc = read_json(dir / "profile.json");
    REQUIRE(doc["rows"].size() == 2);
    for (const auto& row : doc["rows"]) CHECK(row["status"] == "MemoryLimit");
    CHECK(doc["fits"][0]["exponent"] == "n/a");
    const auto lines = csv_lines(dir / "profile.csv");
    CHECK(lines.size() == 3);
}

TEST_CASE("profile fits an exponent across sizes") {
    testing::TempDir dir;
    REQUIRE(run({"profile", "--n-vars", "4,8,16", "--days", "400", "--out-dir", dir.path().string()}) == 0);
    const json doc = read_json(dir / "profile.json");
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["fits"][0]["exponent"].is_number());
}

TEST_CASE("config file values apply unless a flag overrides them") {
    testing::TempDir dir;
    save_panel(testing::make_panel(testing::random_walk_prices(80, 4, 3)), dir / "prices.csv");
    testing::write_file(dir / "run.cfg", "# discovery settings\ntau = 2\nthreshold=0.1\r\nall-rows=true\n");
    REQUIRE(run({"discover", "--config", (dir / "run.cfg").string(), "--input", (dir / "prices.csv").string(),
                 "--tau", "1", "--out-dir", dir.path().string()}) == 0);
    const json doc = read_json(dir / "discover_summary.json");
    CHECK(doc["config"]["tau"] == 1);
    CHECK(doc["config"]["threshold"] == 0.1);
    CHECK(doc["config"]["all_rows"] == true);
    CHECK(doc["rows_used"] == 80);

    testing::write_file(dir / "broken.cfg", "tau 2\n");
    CHECK(run({"discover", "--config", (dir / "broken.cfg").string(), "--input", (dir / "prices.csv").string()}) == 1);
    CHECK(run({"discover", "--config", (dir / "absent.cfg").string(), "--input", (dir / "prices.csv").string()}) == 1);
}

TEST_CASE("usage errors") {
    CHECK(run({}) == 1);
    CHECK(run({"trade"}) == 1);
    CHECK(run({"fetch", "--endpoint", "http://127.0.0.1:1/{ticker}", "--start", "2020-13-01", "--end", "2021-01-01"}) ==
          1);
}
