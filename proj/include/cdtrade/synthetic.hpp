#pragma once

#include "cdtrade/graph.hpp"
#include "cdtrade/market_data.hpp"
#include "cdtrade/resources.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cdtrade {

// Gaussian is the negative control: LiNGAM cannot orient it.
enum class NoiseFamily { Uniform, Laplace, Gaussian };

std::string_view to_string(NoiseFamily family) noexcept;
std::optional<NoiseFamily> parse_noise_family(std::string_view text);

struct GeneratorConfig {
    Index n_vars = 5;
    Index days = 1000;
    int tau = 1;
    // Probability that any admissible coefficient (lower triangle of B_0
    // under a random order, every entry of B_1..B_tau) is non-zero.
    double density = 0.2;
    NoiseFamily noise = NoiseFamily::Uniform;
    std::uint64_t seed = 0;
    bool self_loops = true;
    double weight_min = 0.3;
    double weight_max = 0.9;
    double max_spectral_radius = 0.95;
    int max_retries = 1000;
    Deadline deadline;
};

struct GroundTruth {
    std::vector<Eigen::MatrixXd> b;  // B_0..B_tau, [effect, cause]
    std::vector<Index> causal_order;
    SummaryGraph graph;
    NoiseFamily noise = NoiseFamily::Uniform;
    Eigen::VectorXd noise_scale;     // standard deviation per variable
    Eigen::VectorXd price_offset;    // prices = process + offset
    std::uint64_t seed = 0;
    double spectral_radius = 0;
};

struct SyntheticData {
    PricePanel panel;
    GroundTruth truth;
};

// Simulates X(t) = sum_{i=0}^{tau} B_i X(t-i) + e(t) after rejection-sampling
// B until the companion matrix is stable, discards 10 * tau * n_vars burn-in
// rows and shifts each series to a positive price level (minimum 50).
SyntheticData generate(const GeneratorConfig& config);

std::string synthetic_ticker(Index i, Index n);

struct GraphScore {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t shd = 0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
};

// Directed-edge precision/recall/F1 and structural Hamming distance (one unit
// per inserted, deleted or reversed edge). Both graphs must share tickers.
GraphScore score(const SummaryGraph& estimated, const SummaryGraph& truth);

}  // namespace cdtrade
