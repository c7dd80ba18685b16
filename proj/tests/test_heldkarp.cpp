#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "vatsp/cutscan.hpp"
#include "vatsp/heldkarp.hpp"
#include "vatsp/oracle.hpp"

using namespace vatsp;
using testutil::brute_ratio;

namespace {

// Brute-force min over all 2^n - 2 cuts of x(δ⁺(U)), straight from the definition.
Rational brute_min_out(const Digraph& g, const std::vector<Rational>& x) {
    const int n = g.num_vertices();
    Rational best = Rational::infinity();
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m)
        best = min(best, cut_value(g, x, CutSide::from_mask(m, n)));
    return best;
}

}  // namespace

TEST_CASE("LP on a directed triangle") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 2, Rational(1));
    g.add_arc(2, 0, Rational(1));
    LpPoint pt = solve_lp(g);
    REQUIRE(pt.status == LpPoint::Status::Optimal);
    CHECK(pt.objective == Rational(3));
    for (const Rational& v : pt.x) CHECK(v == Rational(1));
}

TEST_CASE("LP on two vertices") {
    Digraph g(2);
    g.add_arc(0, 1, Rational(4));
    g.add_arc(1, 0, Rational(6));
    LpPoint pt = solve_lp(g);
    REQUIRE(pt.status == LpPoint::Status::Optimal);
    CHECK(pt.x == std::vector<Rational>{Rational(1), Rational(1)});
    CHECK(pt.objective == Rational(10));
}

TEST_CASE("LP infeasible when not strongly connected") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 2, Rational(1));
    CHECK(solve_lp(g).status == LpPoint::Status::Infeasible);
}

TEST_CASE("LP lies between the degree relaxation and the exact optimum") {
    Rng rng(101);
    for (int t = 0; t < 15; ++t) {
        int n = rng.range(3, 7);
        Digraph g = t % 2 ? testutil::random_metric(rng, n, 20) : testutil::random_digraph(rng, n, 1, 3, 20);
        LpPoint pt = solve_lp(g);
        REQUIRE(pt.status == LpPoint::Status::Optimal);
        CHECK(flow_conserved(g, pt.x));
        CHECK(lp_objective(g, pt.x) == pt.objective);
        CHECK(pt.degree_only_objective <= pt.objective);
        MetricClosure d(g);
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        CHECK(pt.objective <= brute_force_tour_cost(d, all));
        CHECK(exhaustive_min_out_cut(g, pt.x).value >= Rational(1));
        CHECK_FALSE(separate(g, pt.x).has_value());
    }
}

TEST_CASE("separation verdict matches exhaustive scan") {
    Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        int n = rng.range(2, 9);
        Digraph g = testutil::random_digraph(rng, n, 1, 3, 5);
        std::vector<Rational> x(g.num_arcs());
        for (auto& v : x) v = Rational(rng.range(0, 4), 4);
        Rational brute = brute_min_out(g, x);
        auto cut = separate(g, x);
        CHECK(cut.has_value() == (brute < Rational(1)));
        if (cut) CHECK(cut_value(g, x, *cut) < Rational(1));
        CHECK(exhaustive_min_out_cut(g, x, false).value == brute);
        CHECK(exhaustive_min_out_cut(g, x, true).value == brute);
        for (const CutSide& c : separate_all(g, x)) CHECK(cut_value(g, x, c) < Rational(1));
    }
    Digraph g(4);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 0, Rational(1));
    CHECK(separate(g, std::vector<Rational>(2, Rational(0))).has_value());
}

TEST_CASE("augmentation keeps feasibility and adds the walk cost") {
    Digraph tri(3);
    tri.add_arc(0, 1, Rational(2));
    tri.add_arc(1, 2, Rational(3));
    tri.add_arc(2, 0, Rational(4));
    auto x = augment(tri, std::vector<Rational>(3, Rational(0)), Walk{{0, 1, 2, 0}, true});
    CHECK(x == std::vector<Rational>(3, Rational(1)));

    Rng rng(33);
    for (int t = 0; t < 10; ++t) {
        Digraph g = testutil::random_metric(rng, 5, 15);
        LpPoint pt = solve_lp(g);
        Walk w{{0, 2, 4, 1, 2, 0}, true};
        auto y = augment(g, pt.x, w);
        CHECK(flow_conserved(g, y));
        CHECK_FALSE(separate(g, y).has_value());
        CHECK(lp_objective(g, y) == pt.objective + walk_arc_cost(g, w));
        Symmetrization s = symmetrize(g);
        SymZ z = symmetrize_x(s, y);
        Predicates p = predicates(s.graph, z, walk_edges(s, g, w), Rational(2));
        CHECK(p.dense);
        CHECK(p.thick);
    }
}

TEST_CASE("symmetrized cut weight equals out plus in") {
    Rng rng(12);
    Digraph g = testutil::random_digraph(rng, 7, 1, 2, 9);
    std::vector<Rational> x(g.num_arcs());
    for (auto& v : x) v = Rational(rng.range(0, 6), 3);
    Symmetrization s = symmetrize(g);
    SymZ z = symmetrize_x(s, x);
    for (std::uint64_t m = 1; m + 1 < (1u << 7); ++m) {
        CutSide c = CutSide::from_mask(m, 7);
        Rational und(0);
        for (int e : cut_edges(s.graph, c)) und += z.z[e];
        Rational in(0);
        for (int a : cut_arcs(g, c, CutMode::In)) in += x[a];
        CHECK(und == cut_value(g, x, c) + in);
    }
}

TEST_CASE("thinness measurement") {
    Ugraph c4(4);
    for (int i = 0; i < 4; ++i) c4.add_edge(i, (i + 1) % 4, Rational(1));
    SymZ z{std::vector<Rational>(4, Rational(1))};
    CHECK(measure_thinness(c4, z, {}).alpha == Rational(0));
    // Path 0-1-2-3; the cut {0,1}|{2,3} has one tree edge and weight 2, singletons
    // {1} and {2} have two tree edges and weight 2.
    ThinMeasure m = measure_thinness(c4, z, {0, 1, 2});
    CHECK(m.exhaustive);
    CHECK(m.alpha == Rational(1));
    CHECK(m.alpha == brute_ratio(c4, z, {0, 1, 2}));
    CHECK(m.cuts_examined == 7);

    SymZ zero{{Rational(0), Rational(1), Rational(1), Rational(0)}};
    ThinMeasure inf = measure_thinness(c4, zero, {0});
    CHECK(inf.infinite);
    CHECK(inf.witness.proper());

    Rng rng(44);
    for (int t = 0; t < 20; ++t) {
        Digraph g = testutil::random_digraph(rng, rng.range(3, 9), 1, 3, 9);
        Symmetrization s = symmetrize(g);
        SymZ zz;
        for (int e = 0; e < s.graph.num_edges(); ++e) zz.z.push_back(Rational(rng.range(1, 8), rng.range(1, 4)));
        std::vector<int> sub;
        for (int e = 0; e < s.graph.num_edges(); ++e)
            if (rng.chance(1, 2)) sub.push_back(e);
        ThinOptions serial;
        serial.parallel = false;
        CHECK(measure_thinness(s.graph, zz, sub).alpha == brute_ratio(s.graph, zz, sub));
        CHECK(measure_thinness(s.graph, zz, sub, serial).alpha == brute_ratio(s.graph, zz, sub));
        // Sampled mode is a lower bound on the exact value.
        ThinOptions sampled;
        sampled.exhaustive_limit = 1;
        sampled.samples = 200;
        ThinMeasure lb = measure_thinness(s.graph, zz, sub, sampled);
        CHECK_FALSE(lb.exhaustive);
        CHECK(lb.label() == "sampled-lower-bound");
        CHECK(lb.alpha <= brute_ratio(s.graph, zz, sub));
    }
}

TEST_CASE("min cut: exhaustive, Stoer-Wagner and predicates agree") {
    Rng rng(8);
    for (int t = 0; t < 25; ++t) {
        int n = rng.range(2, 12);
        Digraph g = testutil::random_digraph(rng, n, 1, 3, 9);
        Symmetrization s = symmetrize(g);
        SymZ z;
        for (int e = 0; e < s.graph.num_edges(); ++e) z.z.push_back(Rational(rng.range(0, 9), 3));
        Rational ex = min_cut(s.graph, z).value;
        CHECK(stoer_wagner(s.graph, z.z).value == ex);
        ThinOptions big;
        big.exhaustive_limit = 1;
        CHECK(min_cut(s.graph, z, big).value == ex);
        CutValue sw = stoer_wagner(s.graph, z.z);
        Rational w(0);
        for (int e : cut_edges(s.graph, sw.side)) w += z.z[e];
        CHECK(w == sw.value);
        CHECK(predicates(s.graph, z, {}, ex).thick);
        CHECK_FALSE(predicates(s.graph, z, {}, ex + Rational(1, 7)).thick);
    }
    Ugraph k3(3);
    for (int i = 0; i < 3; ++i) k3.add_edge(i, (i + 1) % 3, Rational(1));
    CHECK(predicates(k3, SymZ{std::vector<Rational>(3, Rational(2))}, {0}, Rational(2)).thick);
}

TEST_CASE("cost ratio") {
    Ugraph g(3);
    g.add_edge(0, 1, Rational(2));
    g.add_edge(1, 2, Rational(3));
    CHECK(cost_ratio(g, {0, 1, 1}, Rational(4)) == Rational(2));
}

TEST_CASE("parallel and serial cut kernels agree") {
    Rng rng(90);
    for (int t = 0; t < 20; ++t) {
        CutScanGraph g;
        g.n = rng.range(2, 13);
        for (int e = 0; e < 3 * g.n; ++e) {
            int u = rng.range(0, g.n - 1), v = rng.range(0, g.n - 1);
            if (u == v) continue;
            g.ends.push_back({u, v});
            g.weight.push_back(rng.range(0, 9));
            g.count.push_back(rng.range(0, 2));
        }
        auto a = undirected_min_cut_serial(g), b = undirected_min_cut_parallel(g);
        CHECK(a.value == b.value);
        CHECK(a.mask == b.mask);
        auto c = directed_min_out_cut_serial(g), d = directed_min_out_cut_parallel(g);
        CHECK(c.value == d.value);
        CHECK(c.mask == d.mask);
        auto r = undirected_max_ratio_serial(g), s = undirected_max_ratio_parallel(g);
        CHECK(r.mask == s.mask);
        CHECK(r.infinite == s.infinite);
    }
}
