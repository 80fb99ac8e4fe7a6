#include "cpush/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace cpush {

using nlohmann::json;

namespace {

Vec to_vec(const json& arr, const std::string& field) {
    if (!arr.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
    Vec v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ConfigError("field '" + field + "' must be numeric");
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

ProblemSpec parse_problem(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name != "case-a" && name != "case-b")
            throw ConfigError("unknown problem name '" + name + "'");
        return ProblemSpecNamed{name};
    }
    if (!j.is_object()) throw ConfigError("'problem' must be a name or an object");
    const std::string type = j.value("type", "");
    if (type != "logistic-quadratic")
        throw ConfigError("unsupported problem type '" + type + "'");
    ProblemSpecInline spec;
    if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
        throw ConfigError("inline problem needs a nonempty 'agents' array");
    for (const auto& a : j["agents"]) {
        LogisticQuadraticAgent agent;
        agent.label = a.at("label").get<double>();
        agent.feature = to_vec(a.at("feature"), "feature");
        agent.quad = to_vec(a.at("quad"), "quad");
        agent.g_quad = to_vec(a.at("g_quad"), "g_quad");
        agent.g_lin = to_vec(a.at("g_lin"), "g_lin");
        agent.g_const = a.at("g_const").get<double>();
        agent.lower = to_vec(a.at("lower"), "lower");
        agent.upper = to_vec(a.at("upper"), "upper");
        spec.agents.push_back(std::move(agent));
    }
    spec.dim = static_cast<int>(spec.agents.front().feature.size());
    if (j.contains("optimum")) spec.optimum = to_vec(j["optimum"], "optimum");
    return spec;
}

GraphSpec parse_graph(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw ConfigError("'graph' must be an object");
    const std::string type = j.value("type", "");
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    if (type == "case-a") return GraphSpecCaseA{};
    if (type == "rotating") {
        GraphSpecRotating spec;
        for (const auto& f : j.at("files")) spec.files.push_back(resolve(f.get<std::string>()));
        if (spec.files.empty()) throw ConfigError("rotating graph: empty file list");
        spec.window = j.value("window", 0);
        return spec;
    }
    if (type == "static") return GraphSpecStatic{resolve(j.at("file").get<std::string>())};
    if (type == "random") {
        GraphSpecRandom spec;
        spec.edge_prob = j.value("p", 0.05);
        spec.seed = j.value("seed", std::uint64_t{1});
        spec.window = j.value("window", 0);
        spec.probe_horizon = j.value("probe_horizon", 0L);
        return spec;
    }
    throw ConfigError("unknown graph type '" + type + "'");
}

InitMode parse_x0_mode(const std::string& mode) {
    if (mode == "box-center") return InitMode::BoxCenter;
    if (mode == "uniform") return InitMode::SeededUniformInBox;
    if (mode == "explicit") return InitMode::Explicit;
    throw ConfigError("unknown x0 mode '" + mode + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        RunConfig cfg;
        const int version = j.value("version", 1);
        if (version != 1) throw ConfigError("unsupported config version");
        const std::filesystem::path base = std::filesystem::path(origin).parent_path();
        if (j.contains("problem")) cfg.problem = parse_problem(j["problem"]);
        cfg.agents = j.value("agents", 0);
        if (j.contains("graph")) cfg.graph = parse_graph(j["graph"], base);
        if (j.contains("alpha")) {
            cfg.alpha.c = j["alpha"].value("c", 0.05);
            cfg.alpha.sigma = j["alpha"].value("sigma", 0.6);
        }
        cfg.beta = j.value("beta", 1.0);
        cfg.horizon = j.value("horizon", 50000L);
        if (j.contains("x0")) {
            cfg.x0_mode = parse_x0_mode(j["x0"].value("mode", "box-center"));
            if (cfg.x0_mode == InitMode::Explicit)
                for (const auto& p : j["x0"].at("points")) cfg.x0_points.push_back(to_vec(p, "x0.points"));
        }
        cfg.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("output")) cfg.output = j["output"].get<std::string>();
        cfg.log_every = j.value("log_every", 100L);
        if (cfg.log_every <= 0) throw ConfigError("log_every must be positive");
        cfg.alpha.validate();
        if (!(cfg.beta > 0.0 && cfg.beta < 2.0)) throw ConfigError("beta must lie in (0, 2)");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_config(in, path.string());
}

RunConfig case_a_defaults() {
    RunConfig cfg;
    cfg.problem = ProblemSpecNamed{"case-a"};
    cfg.graph = GraphSpecCaseA{};
    cfg.alpha = {0.05, 0.6};
    cfg.beta = 1.0;
    cfg.horizon = 50000;
    cfg.seed = 1;
    cfg.output = "case_a.csv";
    return cfg;
}

RunConfig case_b_defaults(int agents) {
    RunConfig cfg;
    cfg.problem = ProblemSpecNamed{"case-b"};
    cfg.agents = agents;
    cfg.graph = GraphSpecRandom{};
    cfg.alpha = {0.05, 0.6};
    cfg.beta = 1.0;
    cfg.horizon = 50000;
    cfg.seed = 1;
    cfg.output = "case_b.csv";
    return cfg;
}

BuiltRun build_run(const RunConfig& cfg) {
    BuiltRun run;

    if (const auto* named = std::get_if<ProblemSpecNamed>(&cfg.problem)) {
        if (named->name == "case-a") {
            if (cfg.agents != 0 && cfg.agents != 8)
                throw ConfigError("case-a is fixed at 8 agents");
            run.problem = case_a_problem();
        } else {
            run.problem = case_b_problem(cfg.agents > 0 ? cfg.agents : 100);
        }
    } else {
        const auto& inl = std::get<ProblemSpecInline>(cfg.problem);
        run.problem = logistic_quadratic_problem(inl.agents, inl.optimum);
    }
    const int n = run.problem.n_agents();

    if (std::holds_alternative<GraphSpecCaseA>(cfg.graph)) {
        if (n != 8) throw ConfigError("the case-a graph family has 8 nodes");
        run.schedule = GraphSchedule::rotating(case_a_graphs(), 4);
    } else if (const auto* rot = std::get_if<GraphSpecRotating>(&cfg.graph)) {
        std::vector<Digraph> graphs;
        for (const auto& f : rot->files) graphs.push_back(load_graph(f));
        run.schedule = GraphSchedule::rotating(std::move(graphs), rot->window);
    } else if (const auto* st = std::get_if<GraphSpecStatic>(&cfg.graph)) {
        run.schedule = GraphSchedule::fixed(load_graph(st->file));
    } else {
        const auto& rnd = std::get<GraphSpecRandom>(cfg.graph);
        const long probe = rnd.probe_horizon > 0 ? rnd.probe_horizon : 10L * n;
        std::uint64_t seed = rnd.seed;
        for (int attempt = 0; attempt <= rnd.max_redraws; ++attempt, ++seed) {
            GraphSchedule candidate =
                GraphSchedule::seeded_random(n, seed, rnd.edge_prob, std::max(rnd.window, 1));
            int window = rnd.window;
            if (window <= 0) window = find_window(candidate, probe, std::max(4 * n, 32));
            if (window <= 0) continue;
            candidate = GraphSchedule::seeded_random(n, seed, rnd.edge_prob, window);
            if (verify_jointly_connected(candidate, probe)) {
                run.schedule = candidate;
                break;
            }
        }
        if (run.schedule.n_nodes() == 0)
            throw ConnectivityError("random schedule: no verified draw after " +
                                    std::to_string(rnd.max_redraws + 1) + " attempts");
    }

    if (run.schedule.n_nodes() != n)
        throw ConfigError("graph node count does not match the agent count");

    run.alpha = cfg.alpha;
    run.solver.beta = cfg.beta;
    run.solver.horizon = cfg.horizon;
    run.solver.x0_mode = cfg.x0_mode;
    run.solver.x0_explicit = cfg.x0_points;
    run.solver.seed = cfg.seed;
    run.solver.threads = cfg.threads;
    run.log_every = cfg.log_every;
    return run;
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

RunArtifacts execute_run(const BuiltRun& run, std::ostream& csv) {
    RunArtifacts art;
    const auto& p = run.problem;
    const double nan = std::nan("");

    csv << "t,alpha,criterion,consensus_error,feasibility,objective_gap\n";

    RunningAverages averages;
    CertificateProbe probe;
    CertificateProbe* probe_ptr = nullptr;
    if (p.optimum) {
        probe.z = *p.optimum;
        probe_ptr = &probe;
    }

    auto record_of = [&](const NetworkState& s) {
        MetricsRecord r;
        r.t = s.t;
        r.alpha = run.alpha.alpha(s.t);
        r.criterion = p.optimum ? criterion(s.x, *p.optimum) : nan;
        r.consensus_error = consensus_error(s.x);
        Vec mean = Vec::Zero(p.dim);
        for (const auto& x : s.x) mean += x;
        mean /= static_cast<double>(s.x.size());
        r.feasibility = feasibility_violation(p, mean);
        r.objective_gap = p.optimal_value
                              ? global_objective(p, averages.average(0)) - *p.optimal_value
                              : nan;
        return r;
    };

    auto emit = [&](const MetricsRecord& r) {
        csv << r.t << "," << fmt12(r.alpha) << "," << fmt12(r.criterion) << ","
            << fmt12(r.consensus_error) << "," << fmt12(r.feasibility) << ","
            << fmt12(r.objective_gap) << "\n";
    };

    const long horizon = run.solver.horizon;
    Observer observer = [&](const NetworkState& s) {
        averages.update(run.alpha.alpha(s.t), s.x);
        art.max_tracking_residual =
            std::max(art.max_tracking_residual, gradient_tracking_residual(s, p, run.alpha));
        if (s.t > 0 && (s.t % run.log_every == 0 || s.t == horizon)) {
            MetricsRecord r = record_of(s);
            art.records.push_back(r);
            emit(r);
        }
    };

    art.final_state = cpush::run(p, run.schedule, run.alpha, run.solver, observer, probe_ptr);
    if (probe_ptr) art.certificate = *probe_ptr;
    return art;
}

void write_summary(std::ostream& out, const BuiltRun& run, const RunArtifacts& art) {
    const auto& p = run.problem;
    const auto& s = art.final_state;
    out << "iterations: " << s.t << "\n";
    out << "agents: " << p.n_agents() << " dim: " << p.dim << "\n";
    for (int i = 0; i < p.n_agents(); ++i) {
        out << "x[" << i << "]:";
        for (int d = 0; d < p.dim; ++d) out << " " << fmt12(s.x[i][d]);
        out << "\n";
    }
    if (p.optimum) {
        out << "final criterion: " << fmt12(criterion(s.x, *p.optimum)) << "\n";
        out << "certificate min slack: " << fmt12(art.certificate.min_slack)
            << " violations: " << art.certificate.violations << "\n";
    }
    out << "max tracking residual: " << fmt12(art.max_tracking_residual) << "\n";
    out << "final consensus error: " << fmt12(consensus_error(s.x)) << "\n";
    if (p.optimum && s.t >= 2000) {
        try {
            EnvelopeFit fit = rate_envelope_fit(art.records, std::max(10L, s.t / 50));
            out << "rate envelope c_hat: " << fmt12(fit.c_hat)
                << " violations: " << fit.violations << "\n";
        } catch (const ConfigError&) {
            // not enough logged records; skip the fit
        }
    }
}

}  // namespace cpush
