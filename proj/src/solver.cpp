#include "cpush/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace cpush {

double StepSchedule::alpha(long t) const {
    return c / std::pow(static_cast<double>(t) + 1.0, sigma);
}

void StepSchedule::validate() const {
    if (!(c > 0.0)) throw ConfigError("step schedule: c must be positive");
    if (!(sigma > 0.5 && sigma <= 1.0))
        throw ConfigError("step schedule: sigma must lie in (0.5, 1]");
}

void SolverConfig::validate(const ConstrainedProblem& p) const {
    if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
    if (horizon < 0) throw ConfigError("horizon must be nonnegative");
    if (d0.size() > 0 && d0.norm() == 0.0) throw ConfigError("d0 must be nonzero");
    if (x0_mode == InitMode::Explicit) {
        if (static_cast<int>(x0_explicit.size()) != p.n_agents())
            throw ConfigError("explicit x0: wrong number of points");
        for (const auto& v : x0_explicit)
            if (v.size() != p.dim) throw ConfigError("explicit x0: wrong dimension");
    }
}

Vec SolverConfig::effective_d0(int dim) const {
    if (d0.size() > 0) return d0;
    return Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

NetworkState initialize(const ConstrainedProblem& p, const SolverConfig& cfg,
                        const StepSchedule& sched) {
    sched.validate();
    cfg.validate(p);
    const int n = p.n_agents();
    NetworkState s;
    s.t = 0;
    s.x.resize(n);
    s.y.resize(n);
    std::mt19937_64 rng(cfg.seed);
    for (int i = 0; i < n; ++i) {
        const auto& box = p.agents[i].box;
        switch (cfg.x0_mode) {
            case InitMode::BoxCenter:
                s.x[i] = box.center();
                break;
            case InitMode::SeededUniformInBox: {
                Vec v(p.dim);
                for (int d = 0; d < p.dim; ++d) {
                    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                    v[d] = box.lower[d] + u * (box.upper[d] - box.lower[d]);
                }
                s.x[i] = std::move(v);
                break;
            }
            case InitMode::Explicit:
                s.x[i] = cfg.x0_explicit[i];
                break;
        }
        s.y[i] = sched.alpha(0) * p.agents[i].objective.grad(s.x[i]);
    }
    return s;
}

Vec polyak_correction(double gplus, const Vec& d, double beta, double grad_floor) {
    if (gplus == 0.0) return Vec::Zero(d.size());
    if (d.norm() < grad_floor)
        throw DegenerateConstraintError("correction direction below grad_floor");
    return beta * (gplus / d.squaredNorm()) * d;
}

double lemma6_certificate(const Vec& v, const Vec& x_next, const Vec& z, double gplus,
                          const Vec& d, double beta) {
    return (v - z).squaredNorm() - beta * (2.0 - beta) * gplus * gplus / d.squaredNorm() -
           (x_next - z).squaredNorm();
}

namespace {

struct AgentSlot {
    Vec x;
    Vec y;
    double slack;
};

void check_finite(const Vec& v, int agent, const char* term) {
    if (!v.allFinite()) throw NumericalError(agent, term);
}

// Map over agents, serial or chunked across threads; writes are disjoint so
// the result is independent of the thread count.
template <typename Fn>
void for_each_agent(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

NetworkState step(const NetworkState& s, const WeightPair& w, const ConstrainedProblem& p,
                  const StepSchedule& sched, const SolverConfig& cfg, CertificateProbe* probe) {
    const int n = p.n_agents();
    const double alpha_t = sched.alpha(s.t);
    const double alpha_next = sched.alpha(s.t + 1);
    const Vec d0 = cfg.effective_d0(p.dim);

    std::vector<AgentSlot> slots(n);
    for_each_agent(n, cfg.threads, [&](int i) {
        const Agent& agent = p.agents[i];

        // (4a) pull: consensus mix of states minus the gradient tracker.
        Vec acc = Vec::Zero(p.dim);
        for (int j = 0; j < n; ++j)
            if (w.A(i, j) != 0.0) acc += w.A(i, j) * s.x[j];
        Vec v = acc - s.y[i];
        check_finite(v, i, "v");

        // (4b) correction toward {g_i <= 0}, then projection onto the box.
        PlusPart pp = plus_part(agent.constraint, v, d0, cfg.grad_floor);
        Vec corrected = v - polyak_correction(pp.gplus, pp.direction, cfg.beta, cfg.grad_floor);
        Vec x_next = agent.box.project(corrected);
        check_finite(x_next, i, "x");

        // (4c) push: mass-conserving mix of trackers plus the gradient delta.
        // The delta is grouped so the tracker telescopes exactly.
        Vec mixed = Vec::Zero(p.dim);
        for (int j = 0; j < n; ++j)
            if (w.B(i, j) != 0.0) mixed += w.B(i, j) * s.y[j];
        Vec delta = alpha_next * agent.objective.grad(x_next) - alpha_t * agent.objective.grad(s.x[i]);
        Vec y_next = mixed + delta;
        check_finite(y_next, i, "y");

        double slack = 0.0;
        if (probe)
            slack = lemma6_certificate(v, x_next, probe->z, pp.gplus, pp.direction, cfg.beta);
        slots[i] = AgentSlot{std::move(x_next), std::move(y_next), slack};
    });

    if (probe) {
        for (int i = 0; i < n; ++i) {
            probe->min_slack = std::min(probe->min_slack, slots[i].slack);
            if (slots[i].slack < probe->tol) ++probe->violations;
        }
    }

    NetworkState next;
    next.t = s.t + 1;
    next.x.reserve(n);
    next.y.reserve(n);
    for (auto& slot : slots) {
        next.x.push_back(std::move(slot.x));
        next.y.push_back(std::move(slot.y));
    }
    return next;
}

NetworkState run_from(NetworkState state, const ConstrainedProblem& p,
                      const GraphSchedule& schedule, const StepSchedule& sched,
                      const SolverConfig& cfg, const Observer& observer,
                      CertificateProbe* probe) {
    while (state.t < cfg.horizon) {
        WeightPair w = build_weights(schedule.graph_at(state.t));
        state = step(state, w, p, sched, cfg, probe);
        if (observer) observer(state);
    }
    return state;
}

NetworkState run(const ConstrainedProblem& p, const GraphSchedule& schedule,
                 const StepSchedule& sched, const SolverConfig& cfg, const Observer& observer,
                 CertificateProbe* probe) {
    NetworkState state = initialize(p, cfg, sched);
    if (observer) observer(state);
    return run_from(std::move(state), p, schedule, sched, cfg, observer, probe);
}

Vec centralized_iterate(const ConstrainedProblem& p, const Vec& x, long t,
                        const StepSchedule& sched, const SolverConfig& cfg) {
    auto box = intersect_boxes(p);
    if (!box) throw ConfigError("centralized iterate: empty box intersection");

    Vec grad_sum = Vec::Zero(p.dim);
    for (const auto& a : p.agents) grad_sum += a.objective.grad(x);
    const Vec scaled = (sched.alpha(t) * grad_sum).eval();
    Vec v = x - scaled;

    // Most violated constraint at v; smallest index on ties.
    int worst = 0;
    double g0 = p.agents[0].constraint.eval(v);
    for (int i = 1; i < p.n_agents(); ++i) {
        const double gi = p.agents[i].constraint.eval(v);
        if (gi > g0) {
            g0 = gi;
            worst = i;
        }
    }
    if (g0 > 0.0) {
        Vec d = p.agents[worst].constraint.grad(v);
        if (d.norm() < cfg.grad_floor)
            throw DegenerateConstraintError("centralized iterate: degenerate constraint gradient");
        return box->project(v - polyak_correction(g0, d, cfg.beta, cfg.grad_floor));
    }
    return box->project(v);
}

double gradient_tracking_residual(const NetworkState& s, const ConstrainedProblem& p,
                                  const StepSchedule& sched) {
    Vec sum_y = Vec::Zero(p.dim);
    Vec sum_g = Vec::Zero(p.dim);
    for (int i = 0; i < p.n_agents(); ++i) {
        sum_y += s.y[i];
        sum_g += p.agents[i].objective.grad(s.x[i]);
    }
    return (sum_y - sched.alpha(s.t) * sum_g).norm() / (1.0 + sum_y.norm());
}

std::uint64_t config_fingerprint(const SolverConfig& cfg, const StepSchedule& sched) {
    // FNV-1a over the numeric fields that shape the trajectory.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&mix](double d) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        std::memcpy(&bits, &d, sizeof(bits));
        mix(bits);
    };
    mixd(cfg.beta);
    mixd(cfg.grad_floor);
    mix(static_cast<std::uint64_t>(cfg.horizon));
    mix(static_cast<std::uint64_t>(cfg.x0_mode));
    mix(cfg.seed);
    mixd(sched.c);
    mixd(sched.sigma);
    for (Eigen::Index i = 0; i < cfg.d0.size(); ++i) mixd(cfg.d0[i]);
    return h;
}

namespace {

void write_vec(std::ostream& out, const Vec& v) {
    char buf[48];
    for (Eigen::Index d = 0; d < v.size(); ++d) {
        std::snprintf(buf, sizeof(buf), "%a", v[d]);
        out << (d ? " " : "") << buf;
    }
    out << "\n";
}

Vec read_vec(std::istream& in, int dim) {
    Vec v(dim);
    std::string tok;
    for (int d = 0; d < dim; ++d) {
        if (!(in >> tok)) throw ConfigError("checkpoint: truncated vector");
        v[d] = std::strtod(tok.c_str(), nullptr);
    }
    return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const NetworkState& s, std::uint64_t seed,
                     std::uint64_t config_hash) {
    const int n = static_cast<int>(s.x.size());
    const int dim = n > 0 ? static_cast<int>(s.x[0].size()) : 0;
    out << "cpush-checkpoint 1\n";
    out << "seed " << seed << "\n";
    out << "config " << config_hash << "\n";
    out << "t " << s.t << "\n";
    out << "agents " << n << " dim " << dim << "\n";
    for (const auto& v : s.x) write_vec(out, v);
    for (const auto& v : s.y) write_vec(out, v);
}

Checkpoint load_checkpoint(std::istream& in) {
    std::string tag;
    int version = 0;
    if (!(in >> tag >> version) || tag != "cpush-checkpoint" || version != 1)
        throw ConfigError("checkpoint: bad header");
    Checkpoint ck;
    std::string key;
    int n = 0, dim = 0;
    if (!(in >> key >> ck.seed) || key != "seed") throw ConfigError("checkpoint: missing seed");
    if (!(in >> key >> ck.config_hash) || key != "config")
        throw ConfigError("checkpoint: missing config hash");
    if (!(in >> key >> ck.state.t) || key != "t") throw ConfigError("checkpoint: missing t");
    if (!(in >> key >> n >> tag >> dim) || key != "agents" || tag != "dim")
        throw ConfigError("checkpoint: missing sizes");
    for (int i = 0; i < n; ++i) ck.state.x.push_back(read_vec(in, dim));
    for (int i = 0; i < n; ++i) ck.state.y.push_back(read_vec(in, dim));
    return ck;
}

}  // namespace cpush
