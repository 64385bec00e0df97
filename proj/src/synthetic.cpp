#include "cdtrade/synthetic.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cdtrade {

std::string_view to_string(NoiseFamily family) noexcept {
    switch (family) {
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::Laplace: return "laplace";
        case NoiseFamily::Gaussian: return "gaussian";
    }
    return "unknown";
}

std::optional<NoiseFamily> parse_noise_family(std::string_view text) {
    if (text == "uniform") return NoiseFamily::Uniform;
    if (text == "laplace") return NoiseFamily::Laplace;
    if (text == "gaussian") return NoiseFamily::Gaussian;
    return std::nullopt;
}

std::string synthetic_ticker(Index i, Index n) {
    const int width = std::max<int>(2, static_cast<int>(std::to_string(std::max<Index>(n - 1, 0)).size()));
    std::string digits = std::to_string(i);
    return "S" + std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(digits.size()))), '0') + digits;
}

namespace {

// Unit-variance draw from the requested family.
double draw_noise(NoiseFamily family, std::mt19937_64& rng) {
    switch (family) {
        case NoiseFamily::Uniform: {
            std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
            return u(rng);
        }
        case NoiseFamily::Laplace: {
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            const double v = u(rng);
            const double b = 1.0 / std::sqrt(2.0);
            return -b * std::copysign(1.0, v) * std::log(1.0 - 2.0 * std::abs(v));
        }
        case NoiseFamily::Gaussian: {
            std::normal_distribution<double> g(0.0, 1.0);
            return g(rng);
        }
    }
    return 0.0;
}

double companion_radius(const std::vector<Eigen::MatrixXd>& b) {
    const Index n = b.front().rows();
    const int tau = static_cast<int>(b.size()) - 1;
    const Eigen::MatrixXd mix = (Eigen::MatrixXd::Identity(n, n) - b.front()).inverse();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * tau, n * tau);
    for (int i = 1; i <= tau; ++i) comp.block(0, (i - 1) * n, n, n) = mix * b[static_cast<std::size_t>(i)];
    if (tau > 1) comp.bottomLeftCorner(n * (tau - 1), n * (tau - 1)).setIdentity();
    return spectral_radius(comp);
}

}  // namespace

SyntheticData generate(const GeneratorConfig& cfg) {
    if (cfg.n_vars < 1) throw Error(ErrorCode::InvalidArgument, "n_vars must be >= 1");
    if (cfg.tau < 1) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
    if (cfg.days < 1) throw Error(ErrorCode::InvalidArgument, "T must be >= 1");
    if (!(cfg.density >= 0.0 && cfg.density <= 1.0)) throw Error(ErrorCode::InvalidArgument, "density must lie in [0, 1]");
    if (!(cfg.weight_min > 0 && cfg.weight_min <= cfg.weight_max)) throw Error(ErrorCode::InvalidArgument, "bad weight range");

    const Index n = cfg.n_vars;
    const int tau = cfg.tau;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(cfg.weight_min, cfg.weight_max);
    auto weight = [&] { return (unit(rng) < 0.5 ? -1.0 : 1.0) * magnitude(rng); };

    GroundTruth truth;
    truth.seed = cfg.seed;
    truth.noise = cfg.noise;
    bool stable = false;
    for (int attempt = 0; attempt < cfg.max_retries && !stable; ++attempt) {
        cfg.deadline.check("stationary coefficient sampling");
        truth.causal_order.resize(static_cast<std::size_t>(n));
        std::iota(truth.causal_order.begin(), truth.causal_order.end(), Index{0});
        std::shuffle(truth.causal_order.begin(), truth.causal_order.end(), rng);
        truth.b.assign(static_cast<std::size_t>(tau) + 1, Eigen::MatrixXd::Zero(n, n));
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (unit(rng) < cfg.density) {
                    truth.b[0](truth.causal_order[static_cast<std::size_t>(q)], truth.causal_order[static_cast<std::size_t>(p)]) = weight();
                }
            }
        }
        for (int lag = 1; lag <= tau; ++lag) {
            for (Index dst = 0; dst < n; ++dst) {
                for (Index src = 0; src < n; ++src) {
                    if (src == dst && !cfg.self_loops) continue;
                    if (unit(rng) < cfg.density) truth.b[static_cast<std::size_t>(lag)](dst, src) = weight();
                }
            }
        }
        truth.spectral_radius = companion_radius(truth.b);
        stable = truth.spectral_radius < cfg.max_spectral_radius;
    }
    if (!stable) {
        throw Error(ErrorCode::NonStationary, "no stable coefficient draw in " + std::to_string(cfg.max_retries) + " attempts");
    }

    truth.noise_scale.resize(n);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    for (Index i = 0; i < n; ++i) truth.noise_scale(i) = scale(rng);

    const Index burn = 10 * static_cast<Index>(tau) * n;
    const Index total = cfg.days + burn;
    const Eigen::MatrixXd mix = (Eigen::MatrixXd::Identity(n, n) - truth.b[0]).inverse();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, n);
    Eigen::VectorXd drive(n);
    for (Index t = 0; t < total; ++t) {
        for (Index i = 0; i < n; ++i) drive(i) = truth.noise_scale(i) * draw_noise(cfg.noise, rng);
        for (int lag = 1; lag <= tau && t - lag >= 0; ++lag) {
            drive += truth.b[static_cast<std::size_t>(lag)] * x.row(t - lag).transpose();
        }
        x.row(t) = (mix * drive).transpose();
    }

    SyntheticData out;
    out.panel.prices = x.bottomRows(cfg.days);
    truth.price_offset.resize(n);
    for (Index i = 0; i < n; ++i) {
        truth.price_offset(i) = 50.0 - out.panel.prices.col(i).minCoeff();
        out.panel.prices.col(i).array() += truth.price_offset(i);
        out.panel.tickers.push_back(synthetic_ticker(i, n));
    }
    Date d = Date{std::chrono::year{2000} / std::chrono::January / 3};
    for (Index t = 0; t < cfg.days; ++t) {
        out.panel.dates.push_back(d);
        d = next_weekday(d);
    }

    truth.graph = SummaryGraph(out.panel.tickers);
    for (std::size_t lag = 0; lag < truth.b.size(); ++lag) {
        for (Index dst = 0; dst < n; ++dst)
            for (Index src = 0; src < n; ++src)
                if (truth.b[lag](dst, src) != 0.0) truth.graph.add_edge(src, dst, static_cast<int>(lag));
    }
    out.truth = std::move(truth);
    return out;
}

GraphScore score(const SummaryGraph& estimated, const SummaryGraph& truth) {
    if (estimated.tickers() != truth.tickers()) throw Error(ErrorCode::TickerMismatch, "graphs cover different tickers");
    GraphScore s;
    const Index n = truth.size();
    for (Index u = 0; u < n; ++u) {
        for (Index v = 0; v < n; ++v) {
            const bool e = estimated.has_edge(u, v);
            const bool t = truth.has_edge(u, v);
            s.true_positives += e && t;
            s.false_positives += e && !t;
            s.false_negatives += !e && t;
        }
    }
    for (Index u = 0; u < n; ++u) {
        if (estimated.has_edge(u, u) != truth.has_edge(u, u)) ++s.shd;
        for (Index v = u + 1; v < n; ++v) {
            const bool e_uv = estimated.has_edge(u, v), e_vu = estimated.has_edge(v, u);
            const bool t_uv = truth.has_edge(u, v), t_vu = truth.has_edge(v, u);
            if (e_uv == t_uv && e_vu == t_vu) continue;
            const bool reversed = e_uv != e_vu && t_uv != t_vu;  // one edge each, opposite directions
            s.shd += reversed ? 1 : static_cast<std::size_t>((e_uv != t_uv) + (e_vu != t_vu));
        }
    }
    const double tp = static_cast<double>(s.true_positives);
    const std::size_t est_edges = s.true_positives + s.false_positives;
    const std::size_t true_edges = s.true_positives + s.false_negatives;
    s.precision = est_edges > 0 ? tp / static_cast<double>(est_edges) : (true_edges == 0 ? 1.0 : 0.0);
    s.recall = true_edges > 0 ? tp / static_cast<double>(true_edges) : (est_edges == 0 ? 1.0 : 0.0);
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace cdtrade
