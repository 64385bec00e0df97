#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cdtrade {

using Index = Eigen::Index;

// Directed graph over tickers with time lags collapsed. An edge u -> v means
// u is a driving force of v; each edge remembers the lags that produced it.
class SummaryGraph {
public:
    struct Edge {
        Index src;
        Index dst;
        std::set<int> lags;
        bool operator==(const Edge&) const = default;
    };

    SummaryGraph() = default;
    explicit SummaryGraph(std::vector<std::string> tickers);

    // Lag 0 self-edges are rejected: instantaneous effects are acyclic.
    void add_edge(Index src, Index dst, int lag);

    const std::vector<std::string>& tickers() const { return tickers_; }
    Index size() const { return static_cast<Index>(tickers_.size()); }
    bool has_edge(Index src, Index dst) const;
    // Sorted by ticker index.
    std::vector<Index> parents(Index dst) const;
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;
    std::size_t cross_edge_count() const;

    // Same edges re-indexed onto `tickers`; edges touching a ticker absent
    // from `tickers` are dropped and counted in *dropped when given.
    SummaryGraph remapped(const std::vector<std::string>& tickers, std::size_t* dropped = nullptr) const;

    bool operator==(const SummaryGraph&) const = default;

private:
    std::vector<std::string> tickers_;
    std::vector<std::map<Index, std::set<int>>> incoming_;  // dst -> (src -> lags)
};

// Only X -> X edges, each with provenance lags 1..tau.
SummaryGraph self_cause_graph(const std::vector<std::string>& tickers, int tau);

// Edge-list text: optional "# tickers: a,b,c" header, then "u -> v [0,2]".
void write_edge_list(const SummaryGraph& graph, std::ostream& out);
SummaryGraph read_edge_list(std::istream& in, const std::vector<std::string>& fallback_tickers = {});

// {"tickers": [...], "edges": [{"src": "A", "dst": "B", "lags": [1]}]}
std::string to_json(const SummaryGraph& graph);
SummaryGraph graph_from_json(const std::string& text);

// Picks the reader from the extension (.json or anything else = edge list).
SummaryGraph load_graph(const std::filesystem::path& path, const std::vector<std::string>& fallback_tickers = {});

}  // namespace cdtrade
