// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criterion 10 shells out to the CLI binary (path baked in at
// configure time) to compare whole-file CSV bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cpush/config.hpp"

using namespace cpush;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vec make_vec(std::initializer_list<double> vals) {
    Vec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

ConstrainedProblem quadratic_1d() {
    LogisticQuadraticAgent a;
    a.label = 1.0;
    a.feature = make_vec({0.0});
    a.quad = make_vec({1.0});
    a.g_quad = make_vec({0.0});
    a.g_lin = make_vec({1.0});
    a.g_const = -10.0;
    a.lower = make_vec({-5.0});
    a.upper = make_vec({5.0});
    return logistic_quadratic_problem({a});
}

double record_criterion_at(const std::vector<MetricsRecord>& records, long t) {
    for (const auto& r : records)
        if (r.t == t) return r.criterion;
    return std::nan("");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

int main() {
    std::ostringstream devnull;

    // ---- run 1: case A, rotating 4-graph schedule ----
    auto cfg_a = case_a_defaults();  // beta 1, alpha 0.05/(t+1)^0.6, box-center, T 50000
    auto run_a = build_run(cfg_a);
    auto t0 = std::chrono::steady_clock::now();
    auto art_a = execute_run(run_a, devnull);
    const double time_a = seconds_since(t0);
    const double crit_a = criterion(art_a.final_state.x, *run_a.problem.optimum);
    report(1, "case A reaches x* = (1, 0.5, 3)",
           crit_a < 5e-2 && time_a < 10.0,
           "criterion " + fmt(crit_a) + ", " + fmt(time_a) + " s");

    // conservative step size: monotone criterion decrease over 200k iterations
    {
        auto cfg_exact = case_a_defaults();
        cfg_exact.alpha.c = 1e-3;
        cfg_exact.horizon = 200000;
        cfg_exact.log_every = 1000;
        auto run_exact = build_run(cfg_exact);
        auto art = execute_run(run_exact, devnull);
        bool monotone = true;
        for (std::size_t i = 1; i < art.records.size(); ++i)
            if (art.records[i].criterion > art.records[i - 1].criterion + 1e-9) monotone = false;
        report(1, "case A slow-step c = 1e-3 criterion decreases monotonically", monotone,
               "final " + fmt(art.records.back().criterion));
    }

    // ---- run 2: case B at N = 100, verified random schedule ----
    auto cfg_b = case_b_defaults(100);
    auto run_b = build_run(cfg_b);
    t0 = std::chrono::steady_clock::now();
    auto art_b = execute_run(run_b, devnull);
    const double time_b = seconds_since(t0);
    const double crit_b = criterion(art_b.final_state.x, *run_b.problem.optimum);
    const double crit_b_tenth = record_criterion_at(art_b.records, cfg_b.horizon / 10);
    report(2, "case B at N = 100 converges and keeps shrinking",
           crit_b < 1e-1 && crit_b < crit_b_tenth / 2.0 && time_b < 60.0,
           "criterion " + fmt(crit_b) + " vs " + fmt(crit_b_tenth) + " at T/10, " + fmt(time_b) +
               " s");

    // ---- 3: gradient tracking identity over both runs ----
    const double worst_residual = std::max(art_a.max_tracking_residual, art_b.max_tracking_residual);
    report(3, "gradient tracking identity within 1e-9", worst_residual <= 1e-9,
           "max residual " + fmt(worst_residual));

    // ---- 4: per-step correction certificate on run 1 ----
    report(4, "correction certificate with z = x* never dips below -1e-9",
           art_a.certificate.violations == 0 && art_a.certificate.min_slack >= -1e-9,
           "min slack " + fmt(art_a.certificate.min_slack));

    // ---- 5: stochasticity over 1000 random graphs ----
    {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        bool ok = true;
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 15);
            Digraph g = Digraph::with_self_loops(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && u(rng) < 0.3) g.edges.emplace(i, j);
            auto w = build_weights(g);
            for (int i = 0; i < n; ++i) {
                if (std::abs(w.A.row(i).sum() - 1.0) > 1e-12) ok = false;
                if (std::abs(w.B.col(i).sum() - 1.0) > 1e-12) ok = false;
            }
        }
        report(5, "row/column sums within 1e-12 over 1000 random graphs", ok);
    }

    // ---- 6: product decay on the case A schedule ----
    {
        t0 = std::chrono::steady_clock::now();
        auto spreads = product_decay_diagnostic(run_a.schedule, 40);
        const double time_spread = seconds_since(t0);
        const bool ok = spreads[8].spread_a < spreads[4].spread_a &&
                        spreads[4].spread_a < spreads[0].spread_a &&
                        spreads[40].spread_a < 1e-3 &&
                        spreads[8].spread_b < spreads[4].spread_b &&
                        spreads[4].spread_b < spreads[0].spread_b &&
                        spreads[40].spread_b < 1e-3 && time_spread < 1.0;
        report(6, "weight-product spread decays window over window",
               ok, "spread(40) = " + fmt(spreads[40].spread_a));
    }

    // ---- 7: oracle equivalence ----
    {
        auto p1 = quadratic_1d();
        StepSchedule sched{0.1, 0.6};
        SolverConfig cfg;
        cfg.x0_mode = InitMode::Explicit;
        cfg.x0_explicit = {make_vec({1.0})};
        auto state = initialize(p1, cfg, sched);
        auto w = build_weights(Digraph::with_self_loops(1));
        Vec central = make_vec({1.0});
        bool bitwise = true;
        for (long t = 0; t < 1000 && bitwise; ++t) {
            central = centralized_iterate(p1, central, t, sched, cfg);
            state = step(state, w, p1, sched, cfg);
            bitwise = std::memcmp(state.x[0].data(), central.data(), sizeof(double)) == 0;
        }

        auto p = case_a_problem();
        Digraph complete = Digraph::with_self_loops(8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) complete.add_edge(i, j);
        SolverConfig cfg_dist;
        cfg_dist.horizon = 50000;
        StepSchedule sched_a{0.05, 0.6};
        auto dist = run(p, GraphSchedule::fixed(complete), sched_a, cfg_dist);
        Vec consensus = Vec::Zero(3);
        for (const auto& x : dist.x) consensus += x;
        consensus /= 8.0;

        auto init = initialize(p, cfg_dist, sched_a);
        Vec central_a = Vec::Zero(3);
        for (const auto& x : init.x) central_a += x;
        central_a /= 8.0;
        for (long t = 0; t < 50000; ++t)
            central_a = centralized_iterate(p, central_a, t, sched_a, cfg_dist);
        const double gap = (consensus - central_a).norm();
        report(7, "distributed run matches the centralized oracle",
               bitwise && gap < 1e-2, "1-D bitwise plus case A gap " + fmt(gap));
    }

    // ---- 8: projection properties over 10000 probes ----
    {
        std::mt19937_64 rng(55);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        std::uniform_real_distribution<double> s(0.0, 1.0);
        BoxSet box{make_vec({-1.0, 0.0, 2.0}), make_vec({1.0, 0.0, 5.0})};
        bool ok = true;
        for (int i = 0; i < 10000 && ok; ++i) {
            Vec x = make_vec({u(rng), u(rng), u(rng)});
            Vec y = make_vec({u(rng), u(rng), u(rng)});
            if ((box.project(x) - box.project(y)).norm() > (x - y).norm() + 1e-12) ok = false;
            Vec z(3);
            for (int d = 0; d < 3; ++d)
                z[d] = box.lower[d] + s(rng) * (box.upper[d] - box.lower[d]);
            const Vec px = box.project(x);
            if ((px - z).squaredNorm() >
                (x - z).squaredNorm() - (px - x).squaredNorm() + 1e-12)
                ok = false;
        }
        report(8, "projection nonexpansive + strengthened inequality, 10000 probes", ok);
    }

    // ---- 9: rate envelope on run 1 ----
    {
        auto fit = rate_envelope_fit(art_a.records, 1000);
        report(9, "criterion stays inside the ln t / sqrt t envelope", fit.violations == 0,
               "C_hat " + fmt(fit.c_hat));
    }

    // ---- 10: byte-identical CSV across executions ----
    {
        const fs::path dir = fs::temp_directory_path() / "cpush_acceptance";
        fs::create_directories(dir);
        const fs::path out1 = dir / "run1.csv";
        const fs::path out2 = dir / "run2.csv";
        const std::string base = std::string(CPUSH_TOOL_PATH) + " case-a --seed 1 --output ";
        const int rc1 = std::system((base + out1.string() + " > /dev/null").c_str());
        const int rc2 = std::system((base + out2.string() + " > /dev/null").c_str());
        const bool ok = rc1 == 0 && rc2 == 0 && slurp(out1) == slurp(out2) &&
                        !slurp(out1).empty();
        report(10, "two executions of run 1 emit byte-identical CSV", ok);
    }

    if (failures == 0) std::cout << "all acceptance criteria passed" << std::endl;
    return failures;
}
