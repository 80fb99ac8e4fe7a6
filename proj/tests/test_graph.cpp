#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cpush/graph.hpp"

using namespace cpush;

namespace {

Digraph random_graph_with_self_loops(std::mt19937_64& rng, int n, double p) {
    Digraph g = Digraph::with_self_loops(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && u(rng) < p) g.edges.emplace(i, j);
    return g;
}

}  // namespace

TEST_CASE("build_weights on self-loops only gives the identity") {
    auto w = build_weights(Digraph::with_self_loops(3));
    CHECK(w.A.isApprox(Mat::Identity(3, 3)));
    CHECK(w.B.isApprox(Mat::Identity(3, 3)));
}

TEST_CASE("build_weights on the 2-node complete graph") {
    Digraph g = Digraph::with_self_loops(2);
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    auto w = build_weights(g);
    Mat expect(2, 2);
    expect << 0.5, 0.5, 0.5, 0.5;
    CHECK(w.A.isApprox(expect));
    CHECK(w.B.isApprox(expect));
}

TEST_CASE("build_weights on an asymmetric 2-node graph") {
    // Edges {(0,0), (1,1), (0,1)}: node 0 also receives from node 1.
    Digraph g = Digraph::with_self_loops(2);
    g.add_edge(0, 1);
    auto w = build_weights(g);
    Mat a(2, 2), b(2, 2);
    a << 0.5, 0.5, 0.0, 1.0;
    b << 1.0, 0.5, 0.0, 0.5;
    CHECK(w.A.isApprox(a));
    CHECK(w.B.isApprox(b));
    CHECK(w.B.colwise().sum().isApproxToConstant(1.0, 1e-12));
}

TEST_CASE("build_weights rejects a missing self-loop") {
    Digraph g = Digraph::with_self_loops(2);
    g.edges.erase({1, 1});
    CHECK_THROWS_AS(build_weights(g), InvalidGraphError);
}

TEST_CASE("strong connectivity basics") {
    CHECK_FALSE(is_strongly_connected(Digraph::with_self_loops(3)));

    Digraph cycle = Digraph::with_self_loops(5);
    for (int i = 0; i < 5; ++i) cycle.add_edge((i + 1) % 5, i);
    CHECK(is_strongly_connected(cycle));

    Digraph split = Digraph::with_self_loops(4);
    split.add_edge(0, 1);
    split.add_edge(1, 0);
    split.add_edge(2, 3);
    split.add_edge(3, 2);
    CHECK_FALSE(is_strongly_connected(split));
}

TEST_CASE("union_graph identity, symmetry, and errors") {
    Digraph g1 = Digraph::with_self_loops(2);
    g1.add_edge(0, 1);
    CHECK(union_graph({g1}).edges == g1.edges);

    Digraph g2 = Digraph::with_self_loops(2);
    g2.add_edge(1, 0);
    Digraph u = union_graph({g1, g2});
    CHECK(u.edges.size() == 4);
    CHECK(is_strongly_connected(u));
    CHECK(union_graph({g2, g1}).edges == u.edges);       // commutative
    CHECK(union_graph({g1, g1, g2}).edges == u.edges);   // idempotent

    Digraph g3 = Digraph::with_self_loops(3);
    CHECK_THROWS_AS(union_graph({g1, g3}), InvalidGraphError);
}

TEST_CASE("case-a family: only the union of all four is strongly connected") {
    auto graphs = case_a_graphs();
    REQUIRE(graphs.size() == 4);
    for (const auto& g : graphs) {
        CHECK(g.has_all_self_loops());
        CHECK_FALSE(is_strongly_connected(g));
    }
    // every proper subset union fails
    for (int mask = 1; mask < 15; ++mask) {
        std::vector<Digraph> part;
        for (int k = 0; k < 4; ++k)
            if (mask & (1 << k)) part.push_back(graphs[k]);
        CHECK_FALSE(is_strongly_connected(union_graph(part)));
    }
    CHECK(is_strongly_connected(union_graph(graphs)));
}

TEST_CASE("verify_jointly_connected") {
    Digraph cycle = Digraph::with_self_loops(4);
    for (int i = 0; i < 4; ++i) cycle.add_edge((i + 1) % 4, i);
    CHECK(verify_jointly_connected(GraphSchedule::fixed(cycle), 100));

    auto schedule = GraphSchedule::rotating(case_a_graphs(), 4);
    CHECK(verify_jointly_connected(schedule, 100));

    // Deleting one graph's bridge breaks every window.
    auto graphs = case_a_graphs();
    graphs[2] = Digraph::with_self_loops(8);
    CHECK_FALSE(verify_jointly_connected(GraphSchedule::rotating(std::move(graphs), 4), 100));

    CHECK_FALSE(verify_jointly_connected(GraphSchedule::fixed(Digraph::with_self_loops(4)), 100));
}

TEST_CASE("product decay diagnostic") {
    SUBCASE("static complete graph flattens immediately") {
        Digraph complete = Digraph::with_self_loops(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) complete.add_edge(i, j);
        auto spreads = product_decay_diagnostic(GraphSchedule::fixed(complete), 3);
        CHECK(spreads[0].spread_a == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(spreads[0].spread_b == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("identity-only schedule never mixes") {
        auto spreads = product_decay_diagnostic(GraphSchedule::fixed(Digraph::with_self_loops(3)), 5);
        for (const auto& s : spreads) CHECK(s.spread_a == doctest::Approx(1.0));
    }
    SUBCASE("case-a schedule decays window over window") {
        auto schedule = GraphSchedule::rotating(case_a_graphs(), 4);
        auto spreads = product_decay_diagnostic(schedule, 40);
        CHECK(spreads[8].spread_a < spreads[4].spread_a);
        CHECK(spreads[4].spread_a < spreads[0].spread_a);
        CHECK(spreads[8].spread_b < spreads[4].spread_b);
        CHECK(spreads[4].spread_b < spreads[0].spread_b);
        // strict decrease at window multiples until numerically flat
        for (int m = 1; m <= 5; ++m) {
            if (spreads[4 * (m - 1)].spread_a < 1e-12) break;
            CHECK(spreads[4 * m].spread_a < spreads[4 * (m - 1)].spread_a);
        }
        // log-spread slope over [window, k_max] is negative
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        for (const auto& s : spreads) {
            if (s.k < 4) continue;
            const double lx = static_cast<double>(s.k), ly = std::log(s.spread_a);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++count;
        }
        CHECK((count * sxy - sx * sy) / (count * sxx - sx * sx) < 0.0);
    }
}

TEST_CASE("weight stochasticity and sparsity over random graphs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 12);
        Digraph g = random_graph_with_self_loops(rng, n, 0.3);
        auto w = build_weights(g);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(w.A.row(i).sum() - 1.0) < 1e-12);
            CHECK(std::abs(w.B.col(i).sum() - 1.0) < 1e-12);
            CHECK(w.A(i, i) >= 1.0 / n);
            CHECK(w.B(i, i) >= 1.0 / n);
            for (int j = 0; j < n; ++j) {
                CHECK((w.A(i, j) > 0.0) == g.has_edge(i, j));
                CHECK((w.B(i, j) > 0.0) == g.has_edge(i, j));
            }
        }
    }
}

TEST_CASE("seeded random schedule is deterministic in (seed, t)") {
    auto s1 = GraphSchedule::seeded_random(10, 7, 0.2, 2);
    auto s2 = GraphSchedule::seeded_random(10, 7, 0.2, 2);
    for (long t : {0L, 1L, 17L, 1000L}) CHECK(s1.graph_at(t).edges == s2.graph_at(t).edges);
    CHECK(s1.graph_at(3).has_all_self_loops());
}

TEST_CASE("graph file round trip adds omitted self-loops") {
    std::istringstream in("n 3\n0 1\n2 0\n");
    Digraph g = load_graph(in);
    CHECK(g.n_nodes == 3);
    CHECK(g.has_all_self_loops());
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(2, 0));

    std::ostringstream out;
    save_graph(out, g);
    std::istringstream back(out.str());
    CHECK(load_graph(back).edges == g.edges);

    std::istringstream bad("edges 3\n");
    CHECK_THROWS_AS(load_graph(bad), InvalidGraphError);
}
