#include "cdtrade/graph.hpp"

#include "cdtrade/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cdtrade {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Index lookup(const std::vector<std::string>& tickers, const std::string& name) {
    auto it = std::find(tickers.begin(), tickers.end(), name);
    if (it == tickers.end()) throw Error(ErrorCode::UnknownTicker, "graph references unknown ticker '" + name + "'");
    return static_cast<Index>(it - tickers.begin());
}

}  // namespace

SummaryGraph::SummaryGraph(std::vector<std::string> tickers)
    : tickers_(std::move(tickers)), incoming_(tickers_.size()) {}

void SummaryGraph::add_edge(Index src, Index dst, int lag) {
    if (src < 0 || dst < 0 || src >= size() || dst >= size()) {
        throw Error(ErrorCode::UnknownTicker, "edge endpoint out of range");
    }
    if (lag < 0) throw Error(ErrorCode::InvalidArgument, "negative lag");
    if (lag == 0 && src == dst) throw Error(ErrorCode::InvalidArgument, "instantaneous self-edge on " + tickers_[static_cast<std::size_t>(src)]);
    incoming_[static_cast<std::size_t>(dst)][src].insert(lag);
}

bool SummaryGraph::has_edge(Index src, Index dst) const {
    if (dst < 0 || dst >= size()) return false;
    return incoming_[static_cast<std::size_t>(dst)].count(src) > 0;
}

std::vector<Index> SummaryGraph::parents(Index dst) const {
    std::vector<Index> out;
    for (const auto& [src, lags] : incoming_.at(static_cast<std::size_t>(dst))) out.push_back(src);
    return out;
}

std::vector<SummaryGraph::Edge> SummaryGraph::edges() const {
    std::vector<Edge> out;
    for (Index dst = 0; dst < size(); ++dst) {
        for (const auto& [src, lags] : incoming_[static_cast<std::size_t>(dst)]) out.push_back({src, dst, lags});
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    return out;
}

std::size_t SummaryGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& in : incoming_) n += in.size();
    return n;
}

std::size_t SummaryGraph::cross_edge_count() const {
    std::size_t n = 0;
    for (Index dst = 0; dst < size(); ++dst) {
        for (const auto& [src, lags] : incoming_[static_cast<std::size_t>(dst)]) n += src != dst;
    }
    return n;
}

SummaryGraph SummaryGraph::remapped(const std::vector<std::string>& tickers, std::size_t* dropped) const {
    SummaryGraph out(tickers);
    std::size_t lost = 0;
    for (const auto& e : edges()) {
        const auto& s = tickers_[static_cast<std::size_t>(e.src)];
        const auto& d = tickers_[static_cast<std::size_t>(e.dst)];
        auto si = std::find(tickers.begin(), tickers.end(), s);
        auto di = std::find(tickers.begin(), tickers.end(), d);
        if (si == tickers.end() || di == tickers.end()) {
            ++lost;
            continue;
        }
        for (int lag : e.lags) out.add_edge(si - tickers.begin(), di - tickers.begin(), lag);
    }
    if (dropped) *dropped = lost;
    return out;
}

SummaryGraph self_cause_graph(const std::vector<std::string>& tickers, int tau) {
    if (tickers.empty()) throw Error(ErrorCode::EmptyPanel, "self-cause graph needs at least one ticker");
    if (tau < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    SummaryGraph g(tickers);
    for (Index i = 0; i < g.size(); ++i)
        for (int lag = 1; lag <= tau; ++lag) g.add_edge(i, i, lag);
    return g;
}

void write_edge_list(const SummaryGraph& graph, std::ostream& out) {
    out << "# tickers: ";
    for (std::size_t i = 0; i < graph.tickers().size(); ++i) out << (i ? "," : "") << graph.tickers()[i];
    out << '\n';
    for (const auto& e : graph.edges()) {
        out << graph.tickers()[static_cast<std::size_t>(e.src)] << " -> "
            << graph.tickers()[static_cast<std::size_t>(e.dst)] << " [";
        bool first = true;
        for (int lag : e.lags) {
            out << (first ? "" : ",") << lag;
            first = false;
        }
        out << "]\n";
    }
}

SummaryGraph read_edge_list(std::istream& in, const std::vector<std::string>& fallback_tickers) {
    std::vector<std::string> tickers = fallback_tickers;
    struct Raw {
        std::string src, dst;
        std::vector<int> lags;
    };
    std::vector<Raw> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# tickers:";
            if (line.rfind(key, 0) == 0) {
                tickers.clear();
                std::stringstream ss(line.substr(key.size()));
                std::string t;
                while (std::getline(ss, t, ',')) {
                    t = trim(t);
                    if (!t.empty()) tickers.push_back(t);
                }
            }
            continue;
        }
        const auto arrow = line.find("->");
        const auto open = line.find('[');
        const auto close = line.find(']');
        if (arrow == std::string::npos || open == std::string::npos || close == std::string::npos || open < arrow ||
            close < open) {
            throw Error(ErrorCode::MalformedRow, "edge list line " + std::to_string(line_no) + ": '" + line + "'");
        }
        Raw r{trim(line.substr(0, arrow)), trim(line.substr(arrow + 2, open - arrow - 2)), {}};
        std::stringstream ss(line.substr(open + 1, close - open - 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                r.lags.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw Error(ErrorCode::MalformedRow, "edge list line " + std::to_string(line_no) + ": bad lag '" + tok + "'");
            }
        }
        if (r.src.empty() || r.dst.empty() || r.lags.empty()) {
            throw Error(ErrorCode::MalformedRow, "edge list line " + std::to_string(line_no) + ": '" + line + "'");
        }
        raw.push_back(std::move(r));
    }
    SummaryGraph g(tickers);
    for (const auto& r : raw)
        for (int lag : r.lags) g.add_edge(lookup(tickers, r.src), lookup(tickers, r.dst), lag);
    return g;
}

std::string to_json(const SummaryGraph& graph) {
    nlohmann::json doc;
    doc["tickers"] = graph.tickers();
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges()) {
        doc["edges"].push_back({{"src", graph.tickers()[static_cast<std::size_t>(e.src)]},
                                {"dst", graph.tickers()[static_cast<std::size_t>(e.dst)]},
                                {"lags", std::vector<int>(e.lags.begin(), e.lags.end())}});
    }
    return doc.dump(2);
}

SummaryGraph graph_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        auto tickers = doc.at("tickers").get<std::vector<std::string>>();
        SummaryGraph g(tickers);
        for (const auto& e : doc.at("edges")) {
            const Index s = lookup(tickers, e.at("src").get<std::string>());
            const Index d = lookup(tickers, e.at("dst").get<std::string>());
            for (int lag : e.at("lags").get<std::vector<int>>()) g.add_edge(s, d, lag);
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::MalformedRow, std::string("graph JSON: ") + ex.what());
    }
}

SummaryGraph load_graph(const std::filesystem::path& path, const std::vector<std::string>& fallback_tickers) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Unreadable, "cannot open graph " + path.string());
    if (path.extension() == ".json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return graph_from_json(ss.str());
    }
    return read_edge_list(in, fallback_tickers);
}

}  // namespace cdtrade
