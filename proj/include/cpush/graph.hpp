#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

#include "cpush/errors.hpp"

namespace cpush {

using Mat = Eigen::MatrixXd;

// Directed graph over nodes 0..n_nodes-1. An edge (i, j) means "i receives
// from j"; j is an in-neighbor of i and i is an out-neighbor of j.
struct Digraph {
    int n_nodes = 0;
    std::set<std::pair<int, int>> edges;

    static Digraph with_self_loops(int n);

    void add_edge(int receiver, int sender);
    void add_self_loops();
    bool has_edge(int receiver, int sender) const;
    bool has_all_self_loops() const;
};

// Row-stochastic A paired with column-stochastic B, both sharing the
// sparsity pattern of one graph.
struct WeightPair {
    Mat A;
    Mat B;
};

// A(i,j) = 1/in_degree(i), B(i,j) = 1/out_degree(j) on edges, zero elsewhere.
// Requires all self-loops so every degree is positive.
WeightPair build_weights(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

// Edge-set union; all inputs must share n_nodes.
Digraph union_graph(const std::vector<Digraph>& graphs);

// Edge-list file: first line "n <N>", then "<receiver> <sender>" per line,
// 0-based. Self-loops may be omitted; they are added on load.
Digraph load_graph(std::istream& in);
Digraph load_graph(const std::filesystem::path& path);
void save_graph(std::ostream& out, const Digraph& g);

// Maps iteration t to a graph. Rotating schedules cycle through a fixed
// list; seeded-random schedules draw each ordered cross edge independently
// with probability p at every t (deterministic in (seed, t)).
class GraphSchedule {
  public:
    GraphSchedule() = default;  // empty; usable only after assignment

    static GraphSchedule rotating(std::vector<Digraph> graphs, int window);
    static GraphSchedule seeded_random(int n_nodes, std::uint64_t seed, double edge_prob, int window);
    static GraphSchedule fixed(Digraph g);

    Digraph graph_at(long t) const;
    int n_nodes() const { return n_nodes_; }
    int window() const { return window_; }
    bool is_static() const { return kind_ == Kind::Static; }

  private:
    enum class Kind { Rotating, Random, Static };

    Kind kind_ = Kind::Static;
    int n_nodes_ = 0;
    int window_ = 1;
    std::vector<Digraph> graphs_;
    std::uint64_t seed_ = 0;
    double edge_prob_ = 0.0;
};

// True iff the union of every window of schedule.window() consecutive graphs
// within [0, horizon) is strongly connected.
bool verify_jointly_connected(const GraphSchedule& schedule, long horizon);

// Smallest window H in [1, max_window] for which every H-union within the
// probe horizon is strongly connected; 0 if none works.
int find_window(const GraphSchedule& schedule, long probe_horizon, int max_window);

struct SpreadSample {
    long k;
    double spread_a;  // max over columns of (max - min) row entry of A(k)...A(0)
    double spread_b;  // max over rows of (max - min) column entry of B(k)...B(0)
};

// Tracks how fast forward products of the weight matrices flatten out.
std::vector<SpreadSample> product_decay_diagnostic(const GraphSchedule& schedule, long k_max);

// The built-in 8-node 4-graph rotating family: nodes paired up, every graph
// mixes within pairs, and graph k alone carries the bridge from pair k to
// pair k+1. No proper subset union is strongly connected; the full union is.
std::vector<Digraph> case_a_graphs();

}  // namespace cpush
