#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "cpush/errors.hpp"

namespace cpush {

using Vec = Eigen::VectorXd;

struct SmoothObjective {
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
    std::optional<double> lipschitz_l;
};

struct InequalityConstraint {
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
};

// Axis-aligned box; lower == upper is allowed on any coordinate.
struct BoxSet {
    Vec lower;
    Vec upper;

    Vec project(const Vec& x) const;
    bool contains(const Vec& x, double tol = 0.0) const;
    double distance(const Vec& x) const;
    Vec center() const { return 0.5 * (lower + upper); }
};

struct Agent {
    SmoothObjective objective;
    InequalityConstraint constraint;
    BoxSet box;
};

struct ConstrainedProblem {
    int dim = 0;
    std::vector<Agent> agents;
    std::optional<Vec> optimum;
    std::optional<double> optimal_value;  // derived, not ground truth

    int n_agents() const { return static_cast<int>(agents.size()); }
};

struct PlusPart {
    double gplus;   // max(g(x), 0)
    Vec direction;  // grad g(x) when violated, the fallback d0 otherwise
};

// The d_i(t) selection rule: the constraint gradient when g(x) > 0, else d0.
// Throws DegenerateConstraintError when the gradient vanishes at a violated point.
PlusPart plus_part(const InequalityConstraint& c, const Vec& x, const Vec& d0,
                   double grad_floor = 1e-12);

// Coefficients for one agent of the logistic + separable-quadratic family
//   f(x) = ln(1 + exp(-label * feature.dot(x))) + 0.5 * sum_d quad[d] * x[d]^2
//   g(x) = sum_d g_quad[d] * x[d]^2 + g_lin.dot(x) + g_const
struct LogisticQuadraticAgent {
    double label;
    Vec feature;
    Vec quad;
    Vec g_quad;
    Vec g_lin;
    double g_const;
    Vec lower;
    Vec upper;
};

ConstrainedProblem logistic_quadratic_problem(const std::vector<LogisticQuadraticAgent>& specs,
                                              std::optional<Vec> optimum = std::nullopt);

// The N=8 benchmark instance; optimum (1, 0.5, 3).
ConstrainedProblem case_a_problem();

// The scaled family; optimum (1, 0.5, 3) at the reference size N=100.
ConstrainedProblem case_b_problem(int n_agents);

double global_objective(const ConstrainedProblem& p, const Vec& x);

// max over agents of constraint violation and box distance at x.
double feasibility_violation(const ConstrainedProblem& p, const Vec& x);

// Intersection of all agent boxes; nullopt when empty.
std::optional<BoxSet> intersect_boxes(const ConstrainedProblem& p);

}  // namespace cpush
