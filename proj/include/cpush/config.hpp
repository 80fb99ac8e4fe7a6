#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpush/metrics.hpp"
#include "cpush/problem.hpp"
#include "cpush/solver.hpp"

namespace cpush {

struct GraphSpecCaseA {};
struct GraphSpecRotating {
    std::vector<std::filesystem::path> files;
    int window = 0;  // 0 = number of files
};
struct GraphSpecStatic {
    std::filesystem::path file;
};
struct GraphSpecRandom {
    double edge_prob = 0.05;
    std::uint64_t seed = 1;
    int window = 0;        // 0 = probe for the smallest verified window
    long probe_horizon = 0;  // 0 = 10 * n_nodes
    int max_redraws = 16;
};
using GraphSpec = std::variant<GraphSpecCaseA, GraphSpecRotating, GraphSpecStatic, GraphSpecRandom>;

struct ProblemSpecNamed {
    std::string name;  // "case-a" or "case-b"
};
struct ProblemSpecInline {
    int dim = 0;
    std::vector<LogisticQuadraticAgent> agents;
    std::optional<Vec> optimum;
};
using ProblemSpec = std::variant<ProblemSpecNamed, ProblemSpecInline>;

struct RunConfig {
    ProblemSpec problem = ProblemSpecNamed{"case-a"};
    int agents = 0;  // 0 = problem default
    GraphSpec graph = GraphSpecCaseA{};
    StepSchedule alpha;
    double beta = 1.0;
    long horizon = 50000;
    InitMode x0_mode = InitMode::BoxCenter;
    std::vector<Vec> x0_points;
    std::uint64_t seed = 1;
    std::filesystem::path output = "run.csv";
    long log_every = 100;
    int threads = 0;
};

// JSON config file; throws ConfigError with field context on any problem.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in, const std::string& origin);

RunConfig case_a_defaults();
RunConfig case_b_defaults(int agents = 100);

// Fully resolved run: problem instance plus a connectivity-verified schedule.
struct BuiltRun {
    ConstrainedProblem problem;
    GraphSchedule schedule;
    StepSchedule alpha;
    SolverConfig solver;
    long log_every = 100;
};

// Resolves specs, loads graph files, and (for random schedules) probes the
// window and redraws seeds until joint connectivity verifies.
BuiltRun build_run(const RunConfig& cfg);

struct RunArtifacts {
    NetworkState final_state;
    std::vector<MetricsRecord> records;
    CertificateProbe certificate;  // populated when the problem has an optimum
    double max_tracking_residual = 0.0;
};

// Executes the run, streaming CSV rows (fixed header, 12 significant digits)
// every log_every iterations plus the final one.
RunArtifacts execute_run(const BuiltRun& run, std::ostream& csv);

void write_summary(std::ostream& out, const BuiltRun& run, const RunArtifacts& art);

}  // namespace cpush
