#include "cli.hpp"

#include "cdtrade/backtest.hpp"
#include "cdtrade/discovery.hpp"
#include "cdtrade/error.hpp"
#include "cdtrade/fetch.hpp"
#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"
#include "cdtrade/report_io.hpp"
#include "cdtrade/resources.hpp"
#include "cdtrade/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace cdtrade::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string command;
    std::string config_file;
    std::string input;
    std::string out_dir = ".";
    std::string graph;
    std::string benchmark;
    bool discover_inline = false;
    bool all_rows = false;
    bool dump_predictions = false;

    int tau = 1;
    std::optional<int> eta;
    std::optional<double> eta_frac;
    double cost = 0.001;
    double threshold = 0.05;
    double train_frac = 0.8;
    std::uint64_t seed = 0;
    int threads = 0;
    int refit_every = 1;
    std::string time_budget;
    std::string mem_cap;
    std::string log_level = "info";

    // synth-bench / profile grids
    std::vector<int> grid_n;
    std::vector<int> grid_days;
    std::vector<int> grid_tau;
    std::vector<std::string> grid_noise;
    int seeds = 20;
    double density = -1;  // < 0: command default
    bool no_self_loops = false;

    // fetch
    std::string endpoint;
    std::vector<std::string> tickers;
    std::string start;
    std::string end;
    std::string cache_dir = ".cdtrade-cache";
    std::string output;
};

json echo(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["config"] = c.config_file;
    j["input"] = c.input;
    j["out_dir"] = c.out_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["time_budget"] = c.time_budget;
    j["mem_cap"] = c.mem_cap;
    if (c.command == "discover" || c.command == "backtest") {
        j["tau"] = c.tau;
        j["threshold"] = c.threshold;
        j["train_frac"] = c.train_frac;
    }
    if (c.command == "discover") j["all_rows"] = c.all_rows;
    if (c.command == "backtest") {
        j["graph"] = c.graph;
        j["discover"] = c.discover_inline;
        j["benchmark"] = c.benchmark;
        j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
        j["eta_frac"] = c.eta_frac ? json(*c.eta_frac) : json(nullptr);
        j["cost"] = c.cost;
        j["refit_every"] = c.refit_every;
        j["dump_predictions"] = c.dump_predictions;
    }
    if (c.command == "synth-bench" || c.command == "profile") {
        j["n_vars"] = c.grid_n;
        j["days"] = c.grid_days;
        j["tau"] = c.grid_tau;
        j["density"] = c.density;
        j["threshold"] = c.threshold;
    }
    if (c.command == "synth-bench") {
        j["noise"] = c.grid_noise;
        j["seeds"] = c.seeds;
        j["self_loops"] = !c.no_self_loops;
    }
    if (c.command == "fetch") {
        j["endpoint"] = c.endpoint;
        j["tickers"] = c.tickers;
        j["start"] = c.start;
        j["end"] = c.end;
        j["cache_dir"] = c.cache_dir;
        j["output"] = c.output;
    }
    return j;
}

std::shared_ptr<spdlog::logger> logger() {
    if (auto l = spdlog::get("cdtrade")) return l;
    auto l = spdlog::stderr_color_mt("cdtrade");
    l->set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    return l;
}

Deadline deadline_for(const RunConfig& c) {
    if (c.time_budget.empty()) return {};
    return Deadline::after(std::chrono::duration<double>(parse_duration(c.time_budget)));
}

std::optional<double> mem_cap_bytes(const RunConfig& c) {
    if (c.mem_cap.empty()) return std::nullopt;
    return parse_memory(c.mem_cap);
}

void write_json(const fs::path& path, const json& doc) {
    atomic_write(path, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

PricePanel load_panel(const RunConfig& c, std::vector<std::string>* dropped_out = nullptr) {
    if (c.input.empty()) throw CLI::ValidationError("--input", "a price panel is required");
    PricePanel raw = load_csv(c.input);
    ImputeResult imputed = impute(raw);
    for (const auto& t : imputed.dropped) logger()->warn("dropped {}: gap at the start or end of the series", t);
    if (dropped_out) *dropped_out = imputed.dropped;
    return std::move(imputed.panel);
}

void check_memory(const RunConfig& c, Index n, Index days, int tau) {
    const auto cap = mem_cap_bytes(c);
    if (!cap) return;
    const double need = estimate_discovery_bytes(n, days, tau);
    if (need > *cap) {
        throw Error(ErrorCode::MemoryLimit, "discovery needs about " + std::to_string(std::lround(need / 1048576.0)) +
                                                " MiB, cap is " + std::to_string(std::lround(*cap / 1048576.0)) + " MiB");
    }
}

struct Discovered {
    VarLingamModel model;
    SummaryGraph graph;
    double seconds = 0;
};

Discovered discover_graph(const RunConfig& c, const PricePanel& panel) {
    check_memory(c, panel.series(), panel.days(), c.tau);
    VarLingamOptions opts;
    opts.lingam.deadline = deadline_for(c);
    Stopwatch sw;
    Discovered d;
    d.model = varlingam(panel, c.tau, opts);
    d.graph = summary_graph(d.model, c.threshold);
    d.seconds = sw.seconds();
    if (d.model.low_confidence) logger()->warn("more than one disturbance looks Gaussian; causal order is unreliable");
    logger()->info("discovery: {} series x {} days, {} edges ({} cross), {:.3f}s, peak {:.1f} MiB", panel.series(),
                   panel.days(), d.graph.edge_count(), d.graph.cross_edge_count(), d.seconds, peak_rss_mb());
    return d;
}

void write_graph_files(const SummaryGraph& graph, const fs::path& dir) {
    atomic_write(dir / "graph.txt", [&](std::ostream& o) { write_edge_list(graph, o); });
    atomic_write(dir / "graph.json", [&](std::ostream& o) { o << to_json(graph) << '\n'; });
}

int cmd_discover(const RunConfig& c) {
    std::vector<std::string> dropped;
    const PricePanel full = load_panel(c, &dropped);
    const PricePanel panel = c.all_rows ? full : split(full, c.train_frac, c.tau).train;
    const Discovered d = discover_graph(c, panel);

    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_graph_files(d.graph, dir);
    json summary;
    summary["config"] = echo(c);
    summary["tickers"] = panel.tickers;
    summary["dropped_tickers"] = dropped;
    summary["rows_used"] = panel.days();
    summary["first_date"] = format_date(panel.dates.front());
    summary["last_date"] = format_date(panel.dates.back());
    std::vector<std::string> order;
    for (Index i : d.model.order) order.push_back(panel.tickers[static_cast<std::size_t>(i)]);
    summary["causal_order"] = order;
    summary["low_confidence"] = d.model.low_confidence;
    summary["edges"] = d.graph.edge_count();
    summary["cross_edges"] = d.graph.cross_edge_count();
    write_json(dir / "discover_summary.json", summary);
    write_json(dir / "discover_timing.json", {{"discovery_seconds", d.seconds}, {"peak_rss_mb", peak_rss_mb()}});
    return kOk;
}

int cmd_backtest(const RunConfig& c) {
    const PricePanel panel = load_panel(c);
    std::optional<PricePanel> bench;
    if (!c.benchmark.empty()) bench = load_csv(c.benchmark);

    const fs::path dir = c.out_dir;
    SummaryGraph graph;
    if (c.discover_inline) {
        const Discovered d = discover_graph(c, split(panel, c.train_frac, c.tau).train);
        graph = d.graph;
        fs::create_directories(dir);
        write_graph_files(graph, dir);
    } else if (c.graph == "self") {
        graph = self_cause_graph(panel.tickers, c.tau);
    } else if (!c.graph.empty()) {
        std::size_t lost = 0;
        graph = load_graph(c.graph, panel.tickers).remapped(panel.tickers, &lost);
        if (lost > 0) logger()->warn("{} graph edges touch tickers absent from the panel and were ignored", lost);
    } else {
        throw CLI::ValidationError("--graph", "give a graph file, 'self', or --discover");
    }

    BacktestConfig cfg;
    cfg.tau = c.tau;
    cfg.strategy.cost = c.cost;
    cfg.strategy.eta = c.eta_frac ? eta_from_fraction(*c.eta_frac, panel.tickers.size()) : c.eta.value_or(1);
    cfg.refit_every = c.refit_every;
    cfg.train_frac = c.train_frac;
    cfg.threshold = c.threshold;
    cfg.seed = c.seed;
    cfg.record_predictions = c.dump_predictions;

    const BacktestReport report = run_backtest(panel, graph, cfg, bench ? &*bench : nullptr);
    for (const auto& w : report.warnings) logger()->warn("{}", w);
    fs::create_directories(dir);
    write_report(report, echo(c), dir);
    for (const auto& row : compare(report).rows) {
        logger()->info("{}: cumulative {:.6f}, annualized {:.6f}{}", row.name, row.cumulative, row.annualized,
                       row.bankrupt ? " (bankrupt)" : "");
    }
    return kOk;
}

std::string status_of(const Error& e) {
    return e.code() == ErrorCode::Timeout ? "timeout" : std::string(to_string(e.code()));
}

int cmd_synth_bench(const RunConfig& c) {
    std::vector<NoiseFamily> noises;
    for (const auto& n : c.grid_noise) {
        const auto f = parse_noise_family(n);
        if (!f) throw CLI::ValidationError("--noise", "unknown noise family " + n);
        noises.push_back(*f);
    }
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);

    struct Group {
        double f1_sum = 0;
        int ok = 0;
        int total = 0;
    };
    std::map<std::string, Group> groups;
    std::ostringstream csv;
    csv << "n_vars,T,tau,noise,seed,precision,recall,f1,shd,wall_seconds,peak_mem_mb,status\n";
    for (int n : c.grid_n)
        for (int days : c.grid_days)
            for (int tau : c.grid_tau)
                for (NoiseFamily noise : noises)
                    for (int k = 0; k < c.seeds; ++k) {
                        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
                        const std::string key = std::to_string(n) + "," + std::to_string(days) + "," +
                                                std::to_string(tau) + "," + std::string(to_string(noise));
                        Group& g = groups[key];
                        ++g.total;
                        reset_peak_rss();
                        Stopwatch sw;
                        std::string metrics = ",,,,";
                        std::string status = "ok";
                        try {
                            GeneratorConfig gen;
                            gen.n_vars = n;
                            gen.days = days;
                            gen.tau = tau;
                            gen.noise = noise;
                            gen.seed = seed;
                            gen.self_loops = !c.no_self_loops;
                            if (c.density >= 0) gen.density = c.density;
                            gen.deadline = deadline_for(c);
                            const SyntheticData data = generate(gen);
                            check_memory(c, n, days, tau);
                            VarLingamOptions opts;
                            opts.lingam.deadline = gen.deadline;
                            const auto model = varlingam(data.panel, tau, opts);
                            const GraphScore s = score(summary_graph(model, c.threshold), data.truth.graph);
                            metrics = format_number(s.precision) + "," + format_number(s.recall) + "," +
                                      format_number(s.f1) + "," + std::to_string(s.shd);
                            g.f1_sum += s.f1;
                            ++g.ok;
                        } catch (const Error& e) {
                            status = status_of(e);
                            logger()->warn("cell n={} T={} tau={} {} seed={}: {}", n, days, tau, to_string(noise), seed,
                                           e.what());
                        }
                        char wall[32];
                        char mem[32];
                        std::snprintf(wall, sizeof wall, "%.4f", sw.seconds());
                        std::snprintf(mem, sizeof mem, "%.1f", peak_rss_mb());
                        csv << key << ',' << seed << ',' << metrics << ',' << wall << ',' << mem << ',' << status
                            << '\n';
                    }
    atomic_write(dir / "synth_bench.csv", [&](std::ostream& o) { o << csv.str(); });

    json summary;
    summary["config"] = echo(c);
    summary["cells"] = json::array();
    for (const auto& [key, g] : groups) {
        const double mean = g.ok > 0 ? g.f1_sum / g.ok : std::nan("");
        summary["cells"].push_back(
            {{"cell", key}, {"runs", g.total}, {"completed", g.ok}, {"mean_f1", g.ok > 0 ? json(mean) : json(nullptr)}});
        logger()->info("n,T,tau,noise={}: mean F1 {} over {}/{} runs", key, g.ok > 0 ? format_number(mean) : "n/a",
                       g.ok, g.total);
    }
    write_json(dir / "synth_bench_summary.json", summary);
    return kOk;
}

// Least-squares slope of log(wall) on log(N).
std::optional<double> loglog_slope(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.first);
    if (distinct.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (const auto& [n, w] : points) {
        mx += std::log(n);
        my += std::log(w);
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0, sxx = 0;
    for (const auto& [n, w] : points) {
        sxy += (std::log(n) - mx) * (std::log(w) - my);
        sxx += (std::log(n) - mx) * (std::log(n) - mx);
    }
    return sxy / sxx;
}

int cmd_profile(const RunConfig& c) {
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "n_vars,T,tau,status,wall_seconds,peak_mem_mb,estimated_mem_mb\n";
    std::map<std::pair<int, int>, std::vector<std::pair<double, double>>> fits;
    json rows = json::array();
    for (int days : c.grid_days)
        for (int tau : c.grid_tau)
            for (int n : c.grid_n) {
                const double estimate = estimate_discovery_bytes(n, days, tau) / 1048576.0;
                std::string status = "ok";
                double wall = 0;
                double mem = 0;
                try {
                    check_memory(c, n, days, tau);
                    GeneratorConfig gen;
                    gen.n_vars = n;
                    gen.days = days;
                    gen.tau = tau;
                    gen.seed = c.seed;
                    gen.density = c.density >= 0 ? c.density : std::min(0.2, 0.5 / n);
                    const SyntheticData data = generate(gen);
                    VarLingamOptions opts;
                    opts.lingam.deadline = deadline_for(c);
                    reset_peak_rss();
                    Stopwatch sw;
                    const auto model = varlingam(data.panel, tau, opts);
                    (void)summary_graph(model, c.threshold);
                    wall = sw.seconds();
                    mem = peak_rss_mb();
                    const auto cap = mem_cap_bytes(c);
                    if (cap && mem * 1048576.0 > *cap) status = "MemoryLimit";
                    else fits[{days, tau}].emplace_back(n, wall);
                } catch (const Error& e) {
                    status = status_of(e);
                    logger()->warn("size N={} T={} tau={}: {}", n, days, tau, e.what());
                }
                char line[160];
                std::snprintf(line, sizeof line, "%d,%d,%d,%s,%.4f,%.1f,%.1f\n", n, days, tau, status.c_str(), wall,
                              mem, estimate);
                csv << line;
                rows.push_back({{"n_vars", n}, {"T", days}, {"tau", tau}, {"status", status}, {"wall_seconds", wall},
                                {"peak_mem_mb", mem}, {"estimated_mem_mb", estimate}});
                logger()->info("N={} T={} tau={}: {} {:.3f}s {:.1f} MiB", n, days, tau, status, wall, mem);
            }
    atomic_write(dir / "profile.csv", [&](std::ostream& o) { o << csv.str(); });

    json report;
    report["config"] = echo(c);
    report["rows"] = rows;
    report["fits"] = json::array();
    for (int days : c.grid_days)
        for (int tau : c.grid_tau) {
            const auto slope = loglog_slope(fits[{days, tau}]);
            report["fits"].push_back({{"T", days}, {"tau", tau}, {"exponent", slope ? json(*slope) : json("n/a")}});
            logger()->info("T={} tau={}: wall-time exponent in N {}", days, tau,
                           slope ? format_number(*slope) : std::string("n/a"));
        }
    write_json(dir / "profile.json", report);
    return kOk;
}

int cmd_fetch(const RunConfig& c) {
    FetchOptions opts;
    opts.url_template = c.endpoint;
    opts.cache_dir = c.cache_dir;
    const auto start = parse_date(c.start);
    const auto end = parse_date(c.end);
    if (!start) throw CLI::ValidationError("--start", "expected YYYY-MM-DD, got " + c.start);
    if (!end) throw CLI::ValidationError("--end", "expected YYYY-MM-DD, got " + c.end);
    opts.start = *start;
    opts.end = *end;
    if (opts.end < opts.start) throw CLI::ValidationError("--end", "end date precedes start date");
    const fs::path output = c.output.empty() ? fs::path(c.out_dir) / "prices.csv" : fs::path(c.output);
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    const FetchReport r = fetch_remote(c.tickers, opts, output);
    logger()->info("fetch: {} downloaded, {} cached, {} failed, {} requests -> {}", r.downloaded.size(),
                   r.from_cache.size(), r.failed.size(), r.network_calls, output.string());
    for (const auto& [ticker, why] : r.failed) logger()->error("{}: {}", ticker, why);
    return r.failed.empty() ? kOk : kDataError;
}

// key=value lines become flags unless the same flag is already on the command
// line, so explicit flags always win over the file.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.size() < 2) return args;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Unreadable, "cannot open config file " + path);

    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                              : a.find('=') - 2));
    }
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::MalformedRow, path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (given.count(key)) continue;
        if (value == "true") out.push_back("--" + key);
        else if (value != "false") {
            out.push_back("--" + key);
            out.push_back(value);
        }
    }
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--config", c.config_file, "key=value file mirroring the flags; flags override it");
    sub->add_option("--out-dir", c.out_dir, "Directory for output files")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker thread cap (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--time-budget", c.time_budget, "Wall-clock budget, e.g. 30s, 500ms, 2m");
    sub->add_option("--mem-cap", c.mem_cap, "Memory cap for discovery, e.g. 512MB, 16GB");
    sub->add_option("--log-level", c.log_level, "trace, debug, info, warn, error, off")->capture_default_str();
}

void add_discovery_flags(CLI::App* sub, RunConfig& c) {
    sub->add_option("--input", c.input, "Price panel CSV")->required();
    sub->add_option("--tau", c.tau, "Maximum lag")->check(CLI::Range(1, 64))->capture_default_str();
    sub->add_option("--threshold", c.threshold, "Edge pruning threshold on |B|")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--train-frac", c.train_frac, "Fraction of rows used for training")
        ->check(CLI::Validator(
            [](std::string& s) { return std::stod(s) > 0.0 && std::stod(s) < 1.0 ? "" : "must be in (0, 1)"; },
            "(0, 1)"))
        ->capture_default_str();
}

void add_grid_flags(CLI::App* sub, RunConfig& c, std::vector<int> n, std::vector<int> days, std::vector<int> tau) {
    c.grid_n = std::move(n);
    c.grid_days = std::move(days);
    c.grid_tau = std::move(tau);
    sub->add_option("--n-vars", c.grid_n, "Comma-separated series counts")->delimiter(',')->check(CLI::Range(1, 100000));
    sub->add_option("--days", c.grid_days, "Comma-separated panel lengths")->delimiter(',')->check(CLI::Range(1, 10000000));
    sub->add_option("--tau", c.grid_tau, "Comma-separated lags")->delimiter(',')->check(CLI::Range(1, 64));
    sub->add_option("--density", c.density, "Edge probability of the generator");
    sub->add_option("--threshold", c.threshold, "Edge pruning threshold on |B|")->capture_default_str();
}

}  // namespace

double parse_duration(const std::string& text) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--time-budget", "not a duration: " + text);
    }
    const std::string unit = text.substr(used);
    double scale = 0;
    if (unit.empty() || unit == "s") scale = 1;
    else if (unit == "ms") scale = 1e-3;
    else if (unit == "m" || unit == "min") scale = 60;
    else if (unit == "h") scale = 3600;
    if (scale == 0 || !(value > 0)) throw CLI::ValidationError("--time-budget", "not a duration: " + text);
    return value * scale;
}

double parse_memory(const std::string& text) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--mem-cap", "not a size: " + text);
    }
    std::string unit = text.substr(used);
    std::transform(unit.begin(), unit.end(), unit.begin(), [](unsigned char ch) { return std::toupper(ch); });
    double scale = 0;
    if (unit.empty() || unit == "M" || unit == "MB" || unit == "MIB") scale = 1048576.0;
    else if (unit == "K" || unit == "KB" || unit == "KIB") scale = 1024.0;
    else if (unit == "G" || unit == "GB" || unit == "GIB") scale = 1073741824.0;
    if (scale == 0 || !(value > 0)) throw CLI::ValidationError("--mem-cap", "not a size: " + text);
    return value * scale;
}

int run(const std::vector<std::string>& raw_args) {
    RunConfig c;
    CLI::App app{"Causal driving-force discovery and long-short backtesting"};
    app.require_subcommand(1);

    auto* discover = app.add_subcommand("discover", "Discover the summary causal graph of a price panel");
    add_common(discover, c);
    add_discovery_flags(discover, c);
    discover->add_flag("--all-rows", c.all_rows, "Use every row instead of the training split");

    auto* backtest = app.add_subcommand("backtest", "Walk-forward backtest of the long-short strategy");
    add_common(backtest, c);
    add_discovery_flags(backtest, c);
    auto* graph_opt = backtest->add_option("--graph", c.graph, "Edge-list or JSON graph file, or 'self'");
    backtest->add_flag("--discover", c.discover_inline, "Discover the graph on the training rows")->excludes(graph_opt);
    backtest->add_option("--benchmark", c.benchmark, "Benchmark price CSV (first column is used)");
    auto* eta = backtest->add_option("--eta", c.eta, "Names per side")->check(CLI::PositiveNumber);
    backtest->add_option("--eta-frac", c.eta_frac, "Names per side as a fraction of tickers")
        ->check(CLI::Range(0.0, 0.5))
        ->excludes(eta);
    backtest->add_option("--cost", c.cost, "Daily transaction cost")->check(CLI::NonNegativeNumber)->capture_default_str();
    backtest->add_option("--refit-every", c.refit_every, "Refit interval in days")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    backtest->add_flag("--dump-predictions", c.dump_predictions, "Also write predictions.csv");

    auto* synth = app.add_subcommand("synth-bench", "Graph recovery on synthetic VAR panels");
    add_common(synth, c);
    add_grid_flags(synth, c, {5}, {3000}, {1});
    c.grid_noise = {"uniform"};
    synth->add_option("--noise", c.grid_noise, "Comma-separated noise families")->delimiter(',');
    synth->add_option("--seeds", c.seeds, "Seeds per cell, counting up from --seed")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth->add_flag("--no-self-loops", c.no_self_loops, "Generate without X -> X lagged edges");

    auto* profile = app.add_subcommand("profile", "Discovery wall time and memory against panel size");
    add_common(profile, c);
    add_grid_flags(profile, c, {10, 20, 40}, {1000}, {1});

    auto* fetch = app.add_subcommand("fetch", "Download daily prices into a panel CSV");
    add_common(fetch, c);
    fetch->add_option("--endpoint", c.endpoint, "URL template with {ticker}, {start}, {end}")->required();
    fetch->add_option("--tickers", c.tickers, "Comma-separated tickers")->delimiter(',');
    fetch->add_option("--start", c.start, "First date, YYYY-MM-DD")->required();
    fetch->add_option("--end", c.end, "Last date, YYYY-MM-DD")->required();
    fetch->add_option("--cache-dir", c.cache_dir, "Response cache")->envname("CDTRADE_CACHE_DIR")->capture_default_str();
    fetch->add_option("--output", c.output, "Panel CSV to write (default <out-dir>/prices.csv)");

    try {
        std::vector<std::string> args = merge_config_file(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    } catch (const Error& e) {
        logger()->error("{}", e.what());
        return kUsage;
    }

    const auto level = spdlog::level::from_str(c.log_level);
    logger()->set_level(level);
    if (c.threads > 0) omp_set_num_threads(c.threads);
    c.command = app.get_subcommands().front()->get_name();

    try {
        if (c.command == "discover") return cmd_discover(c);
        if (c.command == "backtest") return cmd_backtest(c);
        if (c.command == "synth-bench") return cmd_synth_bench(c);
        if (c.command == "profile") return cmd_profile(c);
        return cmd_fetch(c);
    } catch (const CLI::Error& e) {
        logger()->error("{}", e.what());
        return kUsage;
    } catch (const Error& e) {
        logger()->error("{}", e.what());
        return is_data_error(e.code()) ? kDataError : kNumericError;
    } catch (const fs::filesystem_error& e) {
        logger()->error("{}", e.what());
        return kDataError;
    } catch (const std::exception& e) {
        logger()->error("internal error: {}", e.what());
        return kNumericError;
    }
}

int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv, argv + argc));
}

}  // namespace cdtrade::cli
