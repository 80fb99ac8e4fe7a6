#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "cpush/graph.hpp"
#include "cpush/problem.hpp"

namespace cpush {

// alpha(t) = c / (t+1)^sigma with sigma in (0.5, 1], so the sequence is
// summable in square but not in value.
struct StepSchedule {
    double c = 0.05;
    double sigma = 0.6;

    double alpha(long t) const;
    void validate() const;  // throws ConfigError out of range
};

enum class InitMode { BoxCenter, SeededUniformInBox, Explicit };

struct SolverConfig {
    double beta = 1.0;  // in (0, 2)
    Vec d0;             // nonzero fallback direction; unit all-ones when empty
    double grad_floor = 1e-12;
    long horizon = 0;
    InitMode x0_mode = InitMode::BoxCenter;
    std::vector<Vec> x0_explicit;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = serial

    void validate(const ConstrainedProblem& p) const;
    Vec effective_d0(int dim) const;
};

struct NetworkState {
    long t = 0;
    std::vector<Vec> x;
    std::vector<Vec> y;
};

// Evaluates the correction-step certificate against a reference point z with
// g+(z) = 0; nonnegative slack (up to rounding) certifies the step.
double lemma6_certificate(const Vec& v, const Vec& x_next, const Vec& z, double gplus,
                          const Vec& d, double beta);

// Tracks the per-agent certificate over a run for a fixed reference point.
struct CertificateProbe {
    Vec z;
    double tol = -1e-9;
    double min_slack = std::numeric_limits<double>::infinity();
    long violations = 0;
};

NetworkState initialize(const ConstrainedProblem& p, const SolverConfig& cfg,
                        const StepSchedule& sched);

// beta * (gplus / ||d||^2) * d; the zero vector when gplus == 0.
Vec polyak_correction(double gplus, const Vec& d, double beta, double grad_floor = 1e-12);

// One synchronous round: every agent reads the t-state and produces its
// t+1-state. Deterministic accumulation order regardless of threading.
NetworkState step(const NetworkState& s, const WeightPair& w, const ConstrainedProblem& p,
                  const StepSchedule& sched, const SolverConfig& cfg,
                  CertificateProbe* probe = nullptr);

using Observer = std::function<void(const NetworkState&)>;

// initialize + horizon steps; the observer sees the initial state and every
// state after it.
NetworkState run(const ConstrainedProblem& p, const GraphSchedule& schedule,
                 const StepSchedule& sched, const SolverConfig& cfg,
                 const Observer& observer = {}, CertificateProbe* probe = nullptr);

// Continues from an existing state up to cfg.horizon (checkpoint resume).
NetworkState run_from(NetworkState state, const ConstrainedProblem& p,
                      const GraphSchedule& schedule, const StepSchedule& sched,
                      const SolverConfig& cfg, const Observer& observer = {},
                      CertificateProbe* probe = nullptr);

// x(t+1) = P_X(x - alpha(t) grad f(x) - beta k) with k from the most violated
// constraint at v = x - alpha(t) grad f(x); smallest index wins ties.
Vec centralized_iterate(const ConstrainedProblem& p, const Vec& x, long t,
                        const StepSchedule& sched, const SolverConfig& cfg);

// || sum_i y_i - alpha(t) sum_i grad f_i(x_i) || / (1 + || sum_i y_i ||).
// Stays at rounding level for any column-stochastic mixing sequence.
double gradient_tracking_residual(const NetworkState& s, const ConstrainedProblem& p,
                                  const StepSchedule& sched);

// Text checkpoint; hexfloat payload so reload resumes bit-identically.
struct Checkpoint {
    NetworkState state;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

std::uint64_t config_fingerprint(const SolverConfig& cfg, const StepSchedule& sched);
void save_checkpoint(std::ostream& out, const NetworkState& s, std::uint64_t seed,
                     std::uint64_t config_hash);
Checkpoint load_checkpoint(std::istream& in);

}  // namespace cpush
