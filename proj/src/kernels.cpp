#include "cdtrade/kernels.hpp"

#include "cdtrade/error.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace cdtrade::kernels {

namespace {

constexpr double kEntropyBase = 0.5 * (1.0 + 1.8378770664093453);  // (1 + log 2pi)/2
constexpr double kDegenerateResidualVar = 1e-12;

double entropy_from_moments(double mean_logcosh, double mean_gauss) {
    const double a = mean_logcosh - kEntropyGamma;
    return kEntropyBase - kEntropyK1 * a * a - kEntropyK2 * mean_gauss * mean_gauss;
}

double mean(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double pop_std(std::span<const double> x, double m) {
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Piecewise-cubic Hermite tables for log cosh(u) and u exp(-u^2/2) on
// [-16, 16] with 256 cells per unit; both contrasts are smooth, so the
// interpolation error stays below 4e-12. Each cell holds both cubics so one
// cache line serves one sample. Out-of-range samples use libm.
class ContrastTable {
public:
    static constexpr double kRange = 16.0;
    static constexpr double kCellsPerUnit = 256.0;
    static constexpr int kCells = static_cast<int>(2 * kRange * kCellsPerUnit);

    ContrastTable() : cells_(kCells) {
        const double h = 1.0 / kCellsPerUnit;
        auto logcosh = [](double x) { return std::log(std::cosh(x)); };
        auto gauss = [](double x) { return x * std::exp(-0.5 * x * x); };
        auto dgauss = [](double x) { return (1.0 - x * x) * std::exp(-0.5 * x * x); };
        for (int k = 0; k < kCells; ++k) {
            const double x0 = -kRange + k * h;
            const double x1 = x0 + h;
            hermite(logcosh(x0), std::tanh(x0) * h, logcosh(x1), std::tanh(x1) * h, cells_[static_cast<std::size_t>(k)].logcosh);
            hermite(gauss(x0), dgauss(x0) * h, gauss(x1), dgauss(x1) * h, cells_[static_cast<std::size_t>(k)].gauss);
        }
    }

    void accumulate(double u, double& logcosh, double& gauss) const {
        const double s = (u + kRange) * kCellsPerUnit;
        if (!(s >= 0.0 && s < kCells)) {
            const double a = std::abs(u);
            logcosh += a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
            gauss += u * std::exp(-0.5 * u * u);
            return;
        }
        const int k = static_cast<int>(s);
        const double t = s - k;
        const Cell& c = cells_[static_cast<std::size_t>(k)];
        logcosh += ((c.logcosh[3] * t + c.logcosh[2]) * t + c.logcosh[1]) * t + c.logcosh[0];
        gauss += ((c.gauss[3] * t + c.gauss[2]) * t + c.gauss[1]) * t + c.gauss[0];
    }

private:
    struct alignas(64) Cell {
        double logcosh[4];
        double gauss[4];
    };

    // Cubic on t in [0, 1] matching values f0, f1 and scaled slopes m0, m1.
    static void hermite(double f0, double m0, double f1, double m1, double* c) {
        c[0] = f0;
        c[1] = m0;
        c[2] = -3.0 * f0 - 2.0 * m0 + 3.0 * f1 - m1;
        c[3] = 2.0 * f0 + m0 - 2.0 * f1 + m1;
    }

    std::vector<Cell> cells_;
};

const ContrastTable& contrast_table() {
    static const ContrastTable table;
    return table;
}

double table_entropy(const double* z, Eigen::Index T) {
    const ContrastTable& tab = contrast_table();
    double lc = 0, g = 0;
    for (Eigen::Index t = 0; t < T; ++t) tab.accumulate(z[t], lc, g);
    const double inv_T = 1.0 / static_cast<double>(T);
    return entropy_from_moments(lc * inv_T, g * inv_T);
}

}  // namespace

double entropy(std::span<const double> u) {
    double lc = 0, g = 0;
    for (double v : u) {
        lc += std::log(std::cosh(v));
        g += v * std::exp(-0.5 * v * v);
    }
    const double n = static_cast<double>(u.size());
    return entropy_from_moments(lc / n, g / n);
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& data) {
    Eigen::MatrixXd z(data.rows(), data.cols());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const double m = data.col(c).mean();
        const double sd = std::sqrt((data.col(c).array() - m).square().mean());
        z.col(c) = (data.col(c).array() - m) / (sd > 0 ? sd : 1.0);
    }
    return z;
}

Eigen::MatrixXd pairwise_scores_serial(const Eigen::MatrixXd& data) {
    const auto T = static_cast<std::size_t>(data.rows());
    const Eigen::Index n = data.cols();
    std::vector<std::vector<double>> z(static_cast<std::size_t>(n), std::vector<double>(T));
    for (Eigen::Index c = 0; c < n; ++c) {
        std::vector<double> col(data.col(c).data(), data.col(c).data() + T);
        const double m = mean(col);
        const double sd = pop_std(col, m);
        for (std::size_t t = 0; t < T; ++t) z[static_cast<std::size_t>(c)][t] = (col[t] - m) / sd;
    }
    auto residual = [&](const std::vector<double>& a, const std::vector<double>& b) {
        // a - cov(a,b)/var(b) * b, then scaled to unit variance.
        const double ma = mean(a), mb = mean(b);
        double cov = 0, var = 0;
        for (std::size_t t = 0; t < T; ++t) {
            cov += (a[t] - ma) * (b[t] - mb);
            var += (b[t] - mb) * (b[t] - mb);
        }
        const double beta = cov / var;
        std::vector<double> r(T);
        for (std::size_t t = 0; t < T; ++t) r[t] = a[t] - beta * b[t];
        const double mr = mean(r);
        const double sr = pop_std(r, mr);
        return std::make_pair(r, sr);
    };
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& zi = z[static_cast<std::size_t>(i)];
            const auto& zj = z[static_cast<std::size_t>(j)];
            auto [ri, si] = residual(zi, zj);
            auto [rj, sj] = residual(zj, zi);
            if (si * si < kDegenerateResidualVar || sj * sj < kDegenerateResidualVar) continue;
            for (double& v : ri) v /= si;
            for (double& v : rj) v /= sj;
            D(i, j) = (entropy(zj) + entropy(ri)) - (entropy(zi) + entropy(rj));
        }
    }
    return D;
}

Eigen::MatrixXd pairwise_scores(const Eigen::MatrixXd& data, const Deadline& deadline) {
    const Eigen::Index n = data.cols();
    const Eigen::Index T = data.rows();
    const double inv_T = 1.0 / static_cast<double>(T);
    const Eigen::MatrixXd z = standardize(data);
    const Eigen::MatrixXd corr = (z.transpose() * z) * inv_T;

    const ContrastTable& tab = contrast_table();
    Eigen::VectorXd h(n);
    for (Eigen::Index c = 0; c < n; ++c) h(c) = table_entropy(z.col(c).data(), T);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    std::atomic<bool> timed_out{false};
    const auto npairs = static_cast<std::ptrdiff_t>(pairs.size());

#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t p = 0; p < npairs; ++p) {
        if (timed_out.load(std::memory_order_relaxed)) continue;
        if ((p & 255) == 0 && deadline.expired()) {
            timed_out.store(true, std::memory_order_relaxed);
            continue;
        }
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        const double rho = corr(i, j);
        const double resid_var = 1.0 - rho * rho;
        if (resid_var < kDegenerateResidualVar) continue;
        const double inv_s = 1.0 / std::sqrt(resid_var);
        const double* zi = z.col(i).data();
        const double* zj = z.col(j).data();
        double lca = 0, ga = 0, lcb = 0, gb = 0;
        for (Eigen::Index t = 0; t < T; ++t) {
            tab.accumulate((zi[t] - rho * zj[t]) * inv_s, lca, ga);
            tab.accumulate((zj[t] - rho * zi[t]) * inv_s, lcb, gb);
        }
        const double h_ri = entropy_from_moments(lca * inv_T, ga * inv_T);
        const double h_rj = entropy_from_moments(lcb * inv_T, gb * inv_T);
        const double d = (h(j) + h_ri) - (h(i) + h_rj);
        D(i, j) = d;
        D(j, i) = -d;
    }
    if (timed_out.load()) deadline.check("pairwise exogeneity scores");
    return D;
}

Eigen::VectorXd exogeneity_deficit(const Eigen::MatrixXd& scores) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(scores.rows());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            if (i == j) continue;
            const double v = std::min(0.0, scores(i, j));
            m(i) += v * v;
        }
    }
    return m;
}

}  // namespace cdtrade::kernels
