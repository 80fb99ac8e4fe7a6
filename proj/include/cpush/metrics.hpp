#pragma once

#include <vector>

#include "cpush/graph.hpp"
#include "cpush/problem.hpp"

namespace cpush {

struct MetricsRecord {
    long t = 0;
    double alpha = 0.0;
    double criterion = 0.0;
    double consensus_error = 0.0;
    double feasibility = 0.0;
    double objective_gap = 0.0;
};

// (1/N) sum_i ||x_i - x*|| / ||x*||. Throws ConfigError when x* = 0.
double criterion(const std::vector<Vec>& xs, const Vec& x_star);

// max_i ||x_i - mean(xs)||.
double consensus_error(const std::vector<Vec>& xs);

// Same distance measured against the left-Perron-weighted average of a fixed
// row-stochastic matrix; offline diagnostic for static schedules.
double perron_consensus_error(const std::vector<Vec>& xs, const Mat& a);

// alpha-weighted Cesaro averages of the iterates, one per agent.
struct RunningAverages {
    double weight_sum = 0.0;
    std::vector<Vec> weighted_x;

    void update(double alpha_t, const std::vector<Vec>& xs);
    Vec average(int i) const;
};

struct EnvelopeFit {
    double c_hat = 0.0;
    long violations = 0;
};

// Fits criterion(t) <= C * ln(t)/sqrt(t) over t >= t_min and counts points
// t >= 2*t_min escaping twice the fitted envelope.
EnvelopeFit rate_envelope_fit(const std::vector<MetricsRecord>& records, long t_min);

// Fraction of upward criterion moves over the trailing tail_frac of records.
double trailing_uptick_fraction(const std::vector<MetricsRecord>& records, double tail_frac = 0.2);

}  // namespace cpush
