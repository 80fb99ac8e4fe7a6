#include "cpush/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace cpush {

Digraph Digraph::with_self_loops(int n) {
    Digraph g;
    g.n_nodes = n;
    for (int i = 0; i < n; ++i) g.edges.emplace(i, i);
    return g;
}

void Digraph::add_edge(int receiver, int sender) {
    if (receiver < 0 || receiver >= n_nodes || sender < 0 || sender >= n_nodes)
        throw InvalidGraphError("edge (" + std::to_string(receiver) + ", " +
                                std::to_string(sender) + ") out of range for n=" +
                                std::to_string(n_nodes));
    edges.emplace(receiver, sender);
}

void Digraph::add_self_loops() {
    for (int i = 0; i < n_nodes; ++i) edges.emplace(i, i);
}

bool Digraph::has_edge(int receiver, int sender) const {
    return edges.count({receiver, sender}) > 0;
}

bool Digraph::has_all_self_loops() const {
    for (int i = 0; i < n_nodes; ++i)
        if (!has_edge(i, i)) return false;
    return true;
}

WeightPair build_weights(const Digraph& g) {
    if (!g.has_all_self_loops())
        throw InvalidGraphError("build_weights requires a self-loop on every node");
    const int n = g.n_nodes;
    std::vector<int> in_deg(n, 0), out_deg(n, 0);
    for (const auto& [i, j] : g.edges) {
        ++in_deg[i];
        ++out_deg[j];
    }
    WeightPair w{Mat::Zero(n, n), Mat::Zero(n, n)};
    for (const auto& [i, j] : g.edges) {
        w.A(i, j) = 1.0 / in_deg[i];
        w.B(i, j) = 1.0 / out_deg[j];
    }
    return w;
}

namespace {

// Reachability of every node from node 0 along the given adjacency lists.
bool reaches_all(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

}  // namespace

bool is_strongly_connected(const Digraph& g) {
    const int n = g.n_nodes;
    if (n == 0) return false;
    if (n == 1) return true;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (const auto& [i, j] : g.edges) {
        if (i == j) continue;
        fwd[j].push_back(i);  // information flows sender -> receiver
        rev[i].push_back(j);
    }
    return reaches_all(fwd) && reaches_all(rev);
}

Digraph union_graph(const std::vector<Digraph>& graphs) {
    if (graphs.empty()) throw InvalidGraphError("union_graph: empty input");
    Digraph out;
    out.n_nodes = graphs.front().n_nodes;
    for (const auto& g : graphs) {
        if (g.n_nodes != out.n_nodes)
            throw InvalidGraphError("union_graph: mismatched node counts");
        out.edges.insert(g.edges.begin(), g.edges.end());
    }
    return out;
}

Digraph load_graph(std::istream& in) {
    std::string tag;
    int n = 0;
    if (!(in >> tag >> n) || tag != "n" || n <= 0)
        throw InvalidGraphError("graph file must start with 'n <N>'");
    Digraph g;
    g.n_nodes = n;
    int i, j;
    while (in >> i >> j) g.add_edge(i, j);
    g.add_self_loops();
    return g;
}

Digraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidGraphError("cannot open graph file: " + path.string());
    return load_graph(in);
}

void save_graph(std::ostream& out, const Digraph& g) {
    out << "n " << g.n_nodes << "\n";
    for (const auto& [i, j] : g.edges)
        if (i != j) out << i << " " << j << "\n";
}

GraphSchedule GraphSchedule::rotating(std::vector<Digraph> graphs, int window) {
    if (graphs.empty()) throw InvalidGraphError("rotating schedule needs at least one graph");
    GraphSchedule s;
    s.kind_ = Kind::Rotating;
    s.n_nodes_ = graphs.front().n_nodes;
    for (auto& g : graphs) {
        if (g.n_nodes != s.n_nodes_)
            throw InvalidGraphError("rotating schedule: mismatched node counts");
        g.add_self_loops();
    }
    s.graphs_ = std::move(graphs);
    s.window_ = window > 0 ? window : static_cast<int>(s.graphs_.size());
    return s;
}

GraphSchedule GraphSchedule::seeded_random(int n_nodes, std::uint64_t seed, double edge_prob,
                                           int window) {
    if (n_nodes <= 0) throw InvalidGraphError("seeded_random: n_nodes must be positive");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        throw InvalidGraphError("seeded_random: edge probability outside [0, 1]");
    GraphSchedule s;
    s.kind_ = Kind::Random;
    s.n_nodes_ = n_nodes;
    s.seed_ = seed;
    s.edge_prob_ = edge_prob;
    s.window_ = window > 0 ? window : 1;
    return s;
}

GraphSchedule GraphSchedule::fixed(Digraph g) {
    GraphSchedule s;
    s.kind_ = Kind::Static;
    s.n_nodes_ = g.n_nodes;
    g.add_self_loops();
    s.graphs_.push_back(std::move(g));
    s.window_ = 1;
    return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Digraph GraphSchedule::graph_at(long t) const {
    if (n_nodes_ == 0) throw InvalidGraphError("graph_at on an empty schedule");
    switch (kind_) {
        case Kind::Static:
            return graphs_.front();
        case Kind::Rotating:
            return graphs_[static_cast<std::size_t>(t % static_cast<long>(graphs_.size()))];
        case Kind::Random: {
            // Per-t generator so graph_at is a pure function of (seed, t).
            std::mt19937_64 rng(splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(t))));
            Digraph g = Digraph::with_self_loops(n_nodes_);
            for (int sender = 0; sender < n_nodes_; ++sender) {
                for (int receiver = 0; receiver < n_nodes_; ++receiver) {
                    if (receiver == sender) continue;
                    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                    if (u < edge_prob_) g.edges.emplace(receiver, sender);
                }
            }
            return g;
        }
    }
    throw InvalidGraphError("unreachable schedule kind");
}

bool verify_jointly_connected(const GraphSchedule& schedule, long horizon) {
    const int h = schedule.window();
    if (horizon < h) return false;
    // Sliding window of the last h graphs; rebuild the union per position.
    std::vector<Digraph> window_graphs;
    for (long t = 0; t + h <= horizon; ++t) {
        window_graphs.clear();
        for (int k = 0; k < h; ++k) window_graphs.push_back(schedule.graph_at(t + k));
        if (!is_strongly_connected(union_graph(window_graphs))) return false;
        if (schedule.is_static()) break;  // all windows identical
    }
    return true;
}

int find_window(const GraphSchedule& schedule, long probe_horizon, int max_window) {
    for (int h = 1; h <= max_window; ++h) {
        GraphSchedule probe = schedule;
        // Re-check with the candidate window by constructing an equivalent
        // schedule; GraphSchedule is immutable, so go through the union check
        // manually here.
        std::vector<Digraph> window_graphs;
        bool ok = probe_horizon >= h;
        for (long t = 0; ok && t + h <= probe_horizon; ++t) {
            window_graphs.clear();
            for (int k = 0; k < h; ++k) window_graphs.push_back(schedule.graph_at(t + k));
            if (!is_strongly_connected(union_graph(window_graphs))) ok = false;
            if (schedule.is_static()) break;
        }
        if (ok) return h;
    }
    return 0;
}

std::vector<SpreadSample> product_decay_diagnostic(const GraphSchedule& schedule, long k_max) {
    const int n = schedule.n_nodes();
    Mat prod_a = Mat::Identity(n, n);
    Mat prod_b = Mat::Identity(n, n);
    std::vector<SpreadSample> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    for (long k = 0; k <= k_max; ++k) {
        WeightPair w = build_weights(schedule.graph_at(k));
        prod_a = w.A * prod_a;
        prod_b = w.B * prod_b;
        double sa = 0.0, sb = 0.0;
        for (int j = 0; j < n; ++j)
            sa = std::max(sa, prod_a.col(j).maxCoeff() - prod_a.col(j).minCoeff());
        for (int i = 0; i < n; ++i)
            sb = std::max(sb, prod_b.row(i).maxCoeff() - prod_b.row(i).minCoeff());
        out.push_back({k, sa, sb});
    }
    return out;
}

std::vector<Digraph> case_a_graphs() {
    const int n = 8;
    std::vector<Digraph> graphs;
    for (int k = 0; k < 4; ++k) {
        Digraph g = Digraph::with_self_loops(n);
        for (int p = 0; p < 4; ++p) {
            g.edges.emplace(2 * p, 2 * p + 1);
            g.edges.emplace(2 * p + 1, 2 * p);
        }
        // Bridge from pair k to pair k+1, carried by this graph only.
        for (int sender : {2 * k, 2 * k + 1})
            for (int receiver : {(2 * k + 2) % n, (2 * k + 3) % n})
                g.edges.emplace(receiver, sender);
        graphs.push_back(std::move(g));
    }
    return graphs;
}

}  // namespace cpush
