#include "cpush/problem.hpp"

#include <cmath>

namespace cpush {

Vec BoxSet::project(const Vec& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
}

bool BoxSet::contains(const Vec& x, double tol) const {
    return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
}

double BoxSet::distance(const Vec& x) const {
    return (x - project(x)).norm();
}

PlusPart plus_part(const InequalityConstraint& c, const Vec& x, const Vec& d0,
                   double grad_floor) {
    const double g = c.eval(x);
    if (g > 0.0) {
        Vec d = c.grad(x);
        if (d.norm() < grad_floor)
            throw DegenerateConstraintError(
                "constraint gradient vanishes at a violated point (||grad g|| < " +
                std::to_string(grad_floor) + ")");
        return {g, std::move(d)};
    }
    return {0.0, d0};
}

namespace {

// log(1 + e^s) without overflow.
double softplus(double s) {
    return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

double sigmoid(double s) {
    return 1.0 / (1.0 + std::exp(-s));
}

}  // namespace

ConstrainedProblem logistic_quadratic_problem(const std::vector<LogisticQuadraticAgent>& specs,
                                              std::optional<Vec> optimum) {
    ConstrainedProblem p;
    if (specs.empty()) throw ConfigError("problem needs at least one agent");
    p.dim = static_cast<int>(specs.front().feature.size());
    for (const auto& spec : specs) {
        if (spec.feature.size() != p.dim || spec.quad.size() != p.dim ||
            spec.g_quad.size() != p.dim || spec.g_lin.size() != p.dim ||
            spec.lower.size() != p.dim || spec.upper.size() != p.dim)
            throw ConfigError("agent coefficient dimensions disagree");
        if ((spec.lower.array() > spec.upper.array()).any())
            throw ConfigError("agent box has lower > upper");
        const double label = spec.label;
        const Vec feature = spec.feature;
        const Vec quad = spec.quad;
        const Vec g_quad = spec.g_quad;
        const Vec g_lin = spec.g_lin;
        const double g_const = spec.g_const;

        Agent a;
        a.objective.eval = [label, feature, quad](const Vec& x) {
            return softplus(-label * feature.dot(x)) + 0.5 * quad.dot(x.cwiseProduct(x));
        };
        a.objective.grad = [label, feature, quad](const Vec& x) {
            const double s = -label * feature.dot(x);
            return Vec(sigmoid(s) * (-label) * feature + quad.cwiseProduct(x));
        };
        a.objective.lipschitz_l = 0.25 * feature.squaredNorm() + quad.maxCoeff();
        a.constraint.eval = [g_quad, g_lin, g_const](const Vec& x) {
            return g_quad.dot(x.cwiseProduct(x)) + g_lin.dot(x) + g_const;
        };
        a.constraint.grad = [g_quad, g_lin](const Vec& x) {
            return Vec(2.0 * g_quad.cwiseProduct(x) + g_lin);
        };
        a.box = BoxSet{spec.lower, spec.upper};
        p.agents.push_back(std::move(a));
    }
    if (optimum) {
        if (optimum->size() != p.dim) throw ConfigError("optimum dimension mismatch");
        p.optimum = *optimum;
        p.optimal_value = global_objective(p, *optimum);
    }
    return p;
}

namespace {

// Shared objective family of the two benchmark instances; idx is 1-based.
LogisticQuadraticAgent benchmark_objective(int idx, int r1) {
    LogisticQuadraticAgent a;
    a.label = (idx % 2 == 0) ? 1.0 : -1.0;  // (-1)^idx
    a.feature = Vec(3);
    a.feature << 0.01 * idx, 0.02 * idx, 1.0;
    a.quad = Vec::Zero(3);
    a.quad[idx < r1 ? 0 : 1] = 0.5;  // p_i = x_d^2 / 4
    return a;
}

}  // namespace

ConstrainedProblem case_a_problem() {
    std::vector<LogisticQuadraticAgent> specs;
    for (int idx = 1; idx <= 8; ++idx) {
        LogisticQuadraticAgent a = benchmark_objective(idx, 5);
        a.g_quad = Vec(3);
        a.g_quad << 1.0, 0.0, 0.0;
        a.g_lin = Vec(3);
        a.g_lin << 0.0, static_cast<double>(idx), 1.0;
        a.g_const = -10.0;
        const double h = idx / 2.0;
        a.lower = Vec(3);
        a.lower << h - 3.0, h - 3.5, h - 1.0;
        a.upper = Vec(3);
        a.upper << h + 1.0, h + 0.5, h + 2.5;
        specs.push_back(std::move(a));
    }
    Vec opt(3);
    opt << 1.0, 0.5, 3.0;
    return logistic_quadratic_problem(specs, opt);
}

ConstrainedProblem case_b_problem(int n_agents) {
    if (n_agents < 2) throw ConfigError("case-b needs at least 2 agents");
    const int r1 = (n_agents + 1) / 2 + 1;
    std::vector<LogisticQuadraticAgent> specs;
    for (int idx = 1; idx <= n_agents; ++idx) {
        LogisticQuadraticAgent a = benchmark_objective(idx, r1);
        a.g_quad = Vec(3);
        a.g_quad << 1.0, 0.0, 0.0;
        a.g_lin = Vec(3);
        a.g_lin << 0.0, 0.1 * idx, 1.0;
        a.g_const = -10.0;
        const double h = 0.06 * idx;
        a.lower = Vec(3);
        a.lower << h - 5.0, h - 5.5, h - 3.0;
        a.upper = Vec(3);
        a.upper << h + 1.94, h + 0.94, h + 2.94;
        specs.push_back(std::move(a));
    }
    std::optional<Vec> opt;
    if (n_agents == 100) {
        Vec v(3);
        v << 1.0, 0.5, 3.0;
        opt = v;
    }
    return logistic_quadratic_problem(specs, opt);
}

double global_objective(const ConstrainedProblem& p, const Vec& x) {
    if (x.size() != p.dim) throw ConfigError("global_objective: dimension mismatch");
    double sum = 0.0;
    for (const auto& a : p.agents) sum += a.objective.eval(x);
    return sum;
}

double feasibility_violation(const ConstrainedProblem& p, const Vec& x) {
    double worst = 0.0;
    for (const auto& a : p.agents) {
        worst = std::max(worst, std::max(a.constraint.eval(x), 0.0));
        worst = std::max(worst, a.box.distance(x));
    }
    return worst;
}

std::optional<BoxSet> intersect_boxes(const ConstrainedProblem& p) {
    Vec lo = p.agents.front().box.lower;
    Vec hi = p.agents.front().box.upper;
    for (const auto& a : p.agents) {
        lo = lo.cwiseMax(a.box.lower);
        hi = hi.cwiseMin(a.box.upper);
    }
    if ((lo.array() > hi.array()).any()) return std::nullopt;
    return BoxSet{lo, hi};
}

}  // namespace cpush
