#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "vatsp/generate.hpp"
#include "vatsp/oracle.hpp"
#include "vatsp/pipeline.hpp"
#include "vatsp/thin.hpp"
#include "vatsp/vortex_dp.hpp"

using namespace vatsp;

namespace {

// Directed n-cycle of unit arcs; the cycle is also the vortex face, one vertex per bag.
NearlyEmbeddableInstance cycle_instance(int n) {
    NearlyEmbeddableInstance inst;
    inst.graph = Digraph(n);
    inst.planar.assign(n, 1);
    inst.rotation.assign(n, {});
    Vortex h;
    for (int i = 0; i < n; ++i) {
        inst.graph.add_arc(i, (i + 1) % n, Rational(1));
        inst.rotation[i] = {(i + n - 1) % n, (i + 1) % n};
        h.face.push_back(i);
        h.vertices.push_back(i);
        h.bags.push_back({i, {i}});
    }
    inst.vortices = {h};
    inst.params = {0, 0, 1, 1};
    return inst;
}

Rational brute_min_cut(const Ugraph& g, const SymZ& z) {
    const int n = g.num_vertices();
    Rational best = Rational::infinity();
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
        CutSide c = CutSide::from_mask(m, n);
        Rational w(0);
        for (int e = 0; e < g.num_edges(); ++e)
            if (c.in[g.edge(e).u] != c.in[g.edge(e).v]) w += z.z[e];
        best = min(best, w);
    }
    return best;
}

bool spans(const Walk& w, int n) {
    auto seen = visited_set(w, n);
    return std::count(seen.begin(), seen.end(), 0) == 0;
}

NearlyEmbeddableInstance generated(std::uint64_t seed, int n, int a, int p) {
    Profile pr;
    pr.n = n;
    pr.a = a;
    pr.p = p;
    return generate_instance(seed, pr);
}

}  // namespace

TEST_CASE("initial weights and round count") {
    CHECK(initial_weights(SymZ{{Rational(7, 10)}}, 2).z[0] == Rational(3, 2));
    CHECK(initial_weights(SymZ{{Rational(1)}}, 3).z[0] == Rational(3));
    CHECK(thinning_rounds(3, 4) == 2);
    CHECK(thinning_rounds(9, 1) == 81);
    CHECK_THROWS(thinning_rounds(3, 0));
}

TEST_CASE("stitch: a single walk comes back unchanged") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(2));
    g.add_arc(1, 2, Rational(2));
    g.add_arc(2, 0, Rational(2));
    Walk w{{1, 2, 0, 1}, true};
    auto st = stitch({w}, g);
    CHECK(st.walk.seq == w.seq);
    CHECK(st.stitch_cost == Rational(0));
    CHECK(st.walks_cost == Rational(6));
}

TEST_CASE("stitch: two cycles joined by a connector") {
    Digraph g(6);
    for (int base : {0, 3})
        for (int i = 0; i < 3; ++i) g.add_arc(base + i, base + (i + 1) % 3, Rational(1));
    g.add_arc(2, 3, Rational(5));
    g.add_arc(3, 2, Rational(5));
    Walk a{{2, 0, 1, 2}, true}, b{{3, 4, 5, 3}, true};
    auto st = stitch({a, b}, g);
    CHECK(st.stitch_cost == Rational(10));
    CHECK(walk_arc_cost(g, st.walk) == Rational(16));
    CHECK(st.walk.seq.front() == st.walk.seq.back());
    CHECK(spans(st.walk, 6));
}

TEST_CASE("stitch: cost is the walks plus the exact tour on representatives") {
    Rng rng(5);
    for (int trial = 0; trial < 15; ++trial) {
        Digraph g = testutil::random_metric(rng, 9, 15);
        std::vector<int> perm(9);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<Walk> walks;
        for (int part = 0; part < 3; ++part) {
            Walk w{{}, true};
            for (int i = 0; i < 3; ++i) w.seq.push_back(perm[3 * part + i]);
            w.seq.push_back(w.seq.front());
            walks.push_back(w);
        }
        auto st = stitch(walks, g);
        MetricClosure d(g);
        Rational sum(0);
        for (const auto& w : walks) sum += walk_arc_cost(g, w);
        CHECK(st.stitch_cost == brute_force_tour_cost(d, st.representatives));
        CHECK(walk_arc_cost(g, st.walk) == sum + st.stitch_cost);
        CHECK(spans(st.walk, 9));
    }
}

TEST_CASE("rounding: a path on a directed triangle") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 2, Rational(1));
    g.add_arc(2, 0, Rational(1));
    std::vector<Rational> x(3, Rational(1));
    Symmetrization sym = symmetrize(g);
    std::vector<int> tree{sym.arc_to_edge[0], sym.arc_to_edge[1]};
    Rational alpha = measure_thinness(sym.graph, symmetrize_x(sym, x), tree).alpha;
    auto rr = round_to_walks(g, tree, x, alpha, subgraph_cost(sym.graph, tree) / Rational(3));
    REQUIRE(rr.walks.size() == 1);
    CHECK(spans(rr.walks[0].walk, 3));
    CHECK(rr.total == Rational(3));
    CHECK_FALSE(rr.bound < rr.total);
}

TEST_CASE("rounding: walks cover the subgraph within the bound") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto inst = generated(seed, 9, static_cast<int>(seed % 2), 1);
        LpPoint lp = solve_lp(inst.graph);
        auto vw = optimal_vortex_walk_with_apices(inst);
        auto it = iterate_thin(inst, lp.x, vw.walk);
        Symmetrization sym = symmetrize(inst.graph);
        SymZ zx = symmetrize_x(sym, lp.x);
        Rational alpha = measure_thinness(sym.graph, zx, it.best_edges).alpha;
        Rational s = it.best_cost / lp.objective;
        auto rr = round_to_walks(inst.graph, it.best_edges, lp.x, alpha, s);
        INFO("seed " << seed);
        CHECK(rr.total <= (Rational(2) * alpha + s) * lp.objective);
        CHECK(static_cast<int>(rr.walks.size()) <= count_components(sym.graph, it.best_edges));
        std::vector<char> seen(inst.num_vertices(), 0);
        Rational total(0);
        for (const auto& w : rr.walks) {
            CHECK(w.walk.seq.front() == w.walk.seq.back());
            CHECK(walk_uses_arcs(inst.graph, w.walk));
            total += walk_arc_cost(inst.graph, w.walk);
            for (int v : w.walk.seq) seen[v] = 1;
        }
        CHECK(total == rr.total);
        CHECK(std::count(seen.begin(), seen.end(), 0) == 0);
        // Every subgraph edge carries flow in at least one direction.
        for (int e : it.best_edges) {
            std::int64_t f = 0;
            for (int a = 0; a < inst.graph.num_arcs(); ++a)
                if (sym.arc_to_edge[a] == e) f += rr.flow[a];
            CHECK(f >= 1);
        }
    }
}

TEST_CASE("iterated thinning: every round is replayed and checked") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto inst = generated(seed, 8, static_cast<int>(seed % 2), 1 + static_cast<int>(seed % 2));
        LpPoint lp = solve_lp(inst.graph);
        auto vw = optimal_vortex_walk_with_apices(inst);
        auto it = iterate_thin(inst, lp.x, vw.walk);
        const int n = inst.num_vertices();
        INFO("seed " << seed);
        CHECK(it.rounds == n * n / it.alpha);
        REQUIRE(static_cast<int>(it.history.size()) == it.rounds + 1);
        Symmetrization sym = symmetrize(inst.graph);
        auto wl = walk_edges(sym, inst.graph, vw.walk);
        SymZ z = it.z0;
        Rational best = Rational::infinity();
        for (int i = 0; i <= it.rounds; ++i) {
            for (int e : it.history[i].edges) z.z[e] -= Rational(1, n * n);
            for (const Rational& v : z.z) CHECK_FALSE(v < Rational(0));
            for (int e : wl) CHECK_FALSE(z.z[e] < Rational(1));
            CHECK_FALSE(brute_min_cut(sym.graph, z) < Rational(2));
            if (i > 0) {
                CHECK(count_components(sym.graph, it.history[i].edges) <= static_cast<int>(inst.apices.size()) + 1);
                best = min(best, subgraph_cost(sym.graph, it.history[i].edges));
            }
        }
        CHECK(it.best_cost == best);
    }
}

TEST_CASE("end to end: directed cycle is solved exactly") {
    auto inst = cycle_instance(6);
    REQUIRE(validate(inst).empty());
    TourOptions opt;
    opt.compare_oracle = true;
    auto r = approximate_atsp(inst, opt);
    CHECK(r.cost == Rational(6));
    CHECK(r.lp_objective == Rational(6));
    REQUIRE(r.ratio);
    CHECK(*r.ratio == Rational(1));
}

TEST_CASE("end to end: valid tours above the LP bound") {
    for (int a : {0, 1})
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            auto inst = generated(seed, 9, a, 1 + static_cast<int>(seed % 2));
            TourOptions opt;
            opt.compare_oracle = true;
            auto r = approximate_atsp(inst, opt);
            INFO("a=" << a << " seed " << seed);
            CHECK(r.walk.seq.front() == r.walk.seq.back());
            CHECK(spans(r.walk, inst.num_vertices()));
            CHECK(walk_arc_cost(inst.graph, r.walk) == r.cost);
            CHECK(r.lp_objective <= r.cost);
            REQUIRE(r.optimum);
            CHECK(*r.optimum <= r.cost);
            CHECK(r.lp_objective <= *r.optimum);
            // Ledger: the walks and the stitch add up to the total.
            Rational parts(0);
            for (const auto& l : r.ledger)
                if (l.stage.rfind("walk-", 0) == 0 || l.stage == "stitch") parts += l.cost;
            CHECK(parts == r.cost);
        }
}

TEST_CASE("end to end: several vortices are rejected") {
    Profile pr;
    pr.n = 10;
    pr.k = 2;
    auto inst = generate_instance(3, pr);
    CHECK_THROWS_AS(approximate_atsp(inst), std::invalid_argument);
}
