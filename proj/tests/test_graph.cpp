#include "cdtrade/discovery.hpp"
#include "cdtrade/error.hpp"
#include "cdtrade/graph.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace cdtrade;

namespace {

VarLingamModel model_with(int tau, Index n) {
    VarLingamModel m;
    m.tau = tau;
    m.tickers = testing::names(n);
    for (int i = 0; i <= tau; ++i) m.b.push_back(Eigen::MatrixXd::Zero(n, n));
    return m;
}

SummaryGraph random_graph(Index n, int tau, std::mt19937_64& rng) {
    SummaryGraph g(testing::names(n));
    std::bernoulli_distribution coin(0.3);
    for (int lag = 0; lag <= tau; ++lag)
        for (Index s = 0; s < n; ++s)
            for (Index d = 0; d < n; ++d)
                if (coin(rng) && !(lag == 0 && s == d)) g.add_edge(s, d, lag);
    return g;
}

}  // namespace

TEST_CASE("self-cause graph") {
    const auto g = self_cause_graph({"A", "B"}, 1);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 0));
    CHECK(g.has_edge(1, 1));
    CHECK_FALSE(g.has_edge(0, 1));
    CHECK(g.cross_edge_count() == 0);

    const auto one = self_cause_graph({"A"}, 3);
    REQUIRE(one.edges().size() == 1);
    CHECK(one.edges()[0].lags == std::set<int>{1, 2, 3});

    CHECK_THROWS_AS(self_cause_graph({}, 1), Error);
    try {
        self_cause_graph({}, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyPanel);
    }
}

TEST_CASE("edges: lag-0 self-loops rejected, lags merge") {
    SummaryGraph g({"A", "B", "C"});
    CHECK_THROWS_AS(g.add_edge(1, 1, 0), Error);
    g.add_edge(0, 2, 0);
    g.add_edge(0, 2, 2);
    g.add_edge(1, 2, 1);
    CHECK(g.edge_count() == 2);
    CHECK(g.parents(2) == std::vector<Index>{0, 1});
    CHECK(g.parents(0).empty());
    CHECK(g.edges()[0].lags == std::set<int>{0, 2});
    CHECK_THROWS_AS(g.add_edge(0, 3, 1), Error);
}

TEST_CASE("summary graph from coefficient matrices") {
    SUBCASE("single lagged entry above the threshold") {
        auto m = model_with(1, 2);
        m.b[1](1, 0) = 0.7;
        const auto g = summary_graph(m, 0.1);
        CHECK(g.edge_count() == 1);
        CHECK(g.has_edge(0, 1));
        CHECK_FALSE(g.has_edge(1, 0));
    }
    SUBCASE("nothing above the threshold") {
        auto m = model_with(2, 3);
        m.b[0](1, 0) = 0.05;
        m.b[1](2, 2) = -0.05;
        m.b[2](0, 1) = 0.01;
        CHECK(summary_graph(m, 0.05).edge_count() == 0);
    }
    SUBCASE("same pair at lag 0 and lag 2 is one edge") {
        auto m = model_with(2, 3);
        m.b[0](2, 1) = 0.4;
        m.b[2](2, 1) = -0.3;
        const auto g = summary_graph(m, 0.05);
        REQUIRE(g.edge_count() == 1);
        CHECK(g.edges()[0].lags == std::set<int>{0, 2});
    }
    SUBCASE("B0 diagonal is ignored, lagged diagonal is a self edge") {
        auto m = model_with(1, 2);
        m.b[0](0, 0) = 0.9;
        m.b[1](1, 1) = 0.9;
        const auto g = summary_graph(m, 0.05);
        CHECK(g.edge_count() == 1);
        CHECK(g.has_edge(1, 1));
    }
}

TEST_CASE("edge list and JSON round trips") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = random_graph(6, 2, rng);
        std::stringstream text;
        write_edge_list(g, text);
        CHECK(read_edge_list(text) == g);
        CHECK(graph_from_json(to_json(g)) == g);
    }
}

TEST_CASE("edge list without header uses fallback tickers") {
    std::istringstream in("# produced elsewhere\nB -> A [1]\n\nA -> A [1, 2]\n");
    const auto g = read_edge_list(in, {"A", "B"});
    CHECK(g.has_edge(1, 0));
    CHECK(g.has_edge(0, 0));
    CHECK(g.edges()[0].lags == std::set<int>{1, 2});

    std::istringstream bad("A => B\n");
    CHECK_THROWS_AS(read_edge_list(bad, {"A", "B"}), Error);
    std::istringstream unknown("A -> Z [1]\n");
    CHECK_THROWS_AS(read_edge_list(unknown, {"A", "B"}), Error);
}

TEST_CASE("remap onto another ticker order") {
    SummaryGraph g({"A", "B", "C"});
    g.add_edge(0, 1, 1);
    g.add_edge(2, 1, 0);
    std::size_t lost = 0;
    const auto r = g.remapped({"B", "A"}, &lost);
    CHECK(lost == 1);
    CHECK(r.edge_count() == 1);
    CHECK(r.has_edge(1, 0));
}

TEST_CASE("load_graph picks the reader by extension") {
    testing::TempDir dir;
    SummaryGraph g({"X", "Y"});
    g.add_edge(0, 1, 1);
    testing::write_file(dir / "g.json", to_json(g));
    std::stringstream text;
    write_edge_list(g, text);
    testing::write_file(dir / "g.txt", text.str());
    CHECK(load_graph(dir / "g.json") == g);
    CHECK(load_graph(dir / "g.txt") == g);
    CHECK_THROWS_AS(load_graph(dir / "missing.txt"), Error);
}
