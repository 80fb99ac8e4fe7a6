#include "cpush/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace cpush {

double criterion(const std::vector<Vec>& xs, const Vec& x_star) {
    const double scale = x_star.norm();
    if (scale == 0.0)
        throw ConfigError("criterion undefined for x* = 0; use an absolute measure");
    double sum = 0.0;
    for (const auto& x : xs) sum += (x - x_star).norm() / scale;
    return sum / static_cast<double>(xs.size());
}

double consensus_error(const std::vector<Vec>& xs) {
    Vec mean = Vec::Zero(xs.front().size());
    for (const auto& x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double worst = 0.0;
    for (const auto& x : xs) worst = std::max(worst, (x - mean).norm());
    return worst;
}

double perron_consensus_error(const std::vector<Vec>& xs, const Mat& a) {
    const int n = static_cast<int>(a.rows());
    // Left Perron vector of the row-stochastic matrix by power iteration.
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < 10000; ++it) {
        Eigen::RowVectorXd next = pi * a;
        next /= next.sum();
        const double delta = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (delta < 1e-14) break;
    }
    Vec weighted = Vec::Zero(xs.front().size());
    for (int i = 0; i < n; ++i) weighted += pi[i] * xs[i];
    double worst = 0.0;
    for (const auto& x : xs) worst = std::max(worst, (x - weighted).norm());
    return worst;
}

void RunningAverages::update(double alpha_t, const std::vector<Vec>& xs) {
    if (!(alpha_t > 0.0)) throw ConfigError("running average: alpha must be positive");
    if (weighted_x.empty()) weighted_x.assign(xs.size(), Vec::Zero(xs.front().size()));
    for (std::size_t i = 0; i < xs.size(); ++i) weighted_x[i] += alpha_t * xs[i];
    weight_sum += alpha_t;
}

Vec RunningAverages::average(int i) const {
    return weighted_x.at(static_cast<std::size_t>(i)) / weight_sum;
}

EnvelopeFit rate_envelope_fit(const std::vector<MetricsRecord>& records, long t_min) {
    if (t_min < 10) throw ConfigError("rate envelope: t_min must be at least 10");
    EnvelopeFit fit;
    bool any = false;
    for (const auto& r : records) {
        if (r.t < t_min) continue;
        any = true;
        fit.c_hat = std::max(fit.c_hat, r.criterion * std::sqrt(static_cast<double>(r.t)) /
                                            std::log(static_cast<double>(r.t)));
    }
    if (!any) throw ConfigError("rate envelope: no records at or beyond t_min");
    for (const auto& r : records) {
        if (r.t < 2 * t_min) continue;
        const double envelope =
            2.0 * fit.c_hat * std::log(static_cast<double>(r.t)) / std::sqrt(static_cast<double>(r.t));
        if (r.criterion > envelope) ++fit.violations;
    }
    return fit;
}

double trailing_uptick_fraction(const std::vector<MetricsRecord>& records, double tail_frac) {
    const std::size_t n = records.size();
    if (n < 3) return 0.0;
    const std::size_t start = static_cast<std::size_t>(static_cast<double>(n) * (1.0 - tail_frac));
    long upticks = 0, moves = 0;
    for (std::size_t i = std::max<std::size_t>(start, 1); i < n; ++i) {
        ++moves;
        if (records[i].criterion > records[i - 1].criterion) ++upticks;
    }
    return moves > 0 ? static_cast<double>(upticks) / static_cast<double>(moves) : 0.0;
}

}  // namespace cpush
