#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "vatsp/gadgets.hpp"
#include "vatsp/hardness.hpp"
#include "vatsp/oracle.hpp"

using namespace vatsp;

namespace {

Ugraph random_graph(Rng& rng, int n, int num, int den) {
    Ugraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.chance(num, den)) g.add_edge(u, v, Rational(1));
    return g;
}

// Brute-force clique test straight from the subset definition.
bool has_clique(const Ugraph& g, int k) {
    const int n = g.num_vertices();
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        if (__builtin_popcount(m) != k) continue;
        bool ok = true;
        for (int u = 0; u < n && ok; ++u)
            for (int v = u + 1; v < n && ok; ++v)
                if ((m >> u & 1) && (m >> v & 1)) ok = g.find_edge(u, v) >= 0;
        if (ok) return true;
    }
    return false;
}

// Every assignment from the product of the arc sets.
bool brute_balancing(const EdgeBalancingInstance& eb) {
    const int m = eb.d.num_arcs();
    for (const auto& s : eb.sets)
        if (s.empty()) return false;
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
        std::vector<std::int64_t> chi(m);
        for (int a = 0; a < m; ++a) chi[a] = eb.sets[a][idx[a]];
        if (is_balanced(eb.d, chi)) return true;
        int p = 0;
        while (p < m && ++idx[p] == eb.sets[p].size()) idx[p++] = 0;
        if (p == m) return false;
    }
}

PathType pt(std::vector<std::pair<int, int>> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<int> all_vertices(const Digraph& g) {
    std::vector<int> v(g.num_vertices());
    std::iota(v.begin(), v.end(), 0);
    return v;
}

void add_random_arc(Rng& rng, Digraph& d) {
    const int k = d.num_vertices();
    const int u = rng.range(0, k - 1);
    d.add_arc(u, (u + rng.range(1, k - 1)) % k, Rational(1));
}

EdgeBalancingInstance one_arc(std::vector<std::int64_t> xs) {
    EdgeBalancingInstance eb;
    eb.d = Digraph(2);
    eb.d.add_arc(0, 1, Rational(1));
    eb.sets = {xs};
    return eb;
}

}  // namespace

TEST_CASE("non-averaging sets") {
    CHECK(nonaveraging_set(2, 3) == std::vector<std::int64_t>{3, 9, 27});
    for (int k = 1; k <= 4; ++k)
        for (int n = 1; n <= 5; ++n) CHECK(is_nonaveraging(nonaveraging_set(k, n), k));
    CHECK_FALSE(is_nonaveraging({1, 2, 3}, 2));
    CHECK(is_nonaveraging({1, 2, 4}, 2));
    CHECK_FALSE(is_nonaveraging({1, 2, 3, 4}, 3));  // 1+1+4 = 3·2
    CHECK_THROWS_AS(nonaveraging_set(3, 40), HardnessGuard);
}

TEST_CASE("clique to biclique: K4 with k=2") {
    Ugraph k4(4);
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) k4.add_edge(u, v, Rational(1));
    auto r = clique_to_biclique(k4, 2);
    CHECK(r.inst.graph.num_vertices() == 16);
    // Same-index pairs: 4 per pair (i, k+i); cross pairs: 12 ordered edges each.
    CHECK(r.inst.graph.num_edges() == 2 * 4 + 2 * 12);
    auto picks = solve_biclique(r.inst);
    REQUIRE(picks);
    CHECK(is_biclique_solution(r.inst, *picks));
    CHECK(is_clique(k4, clique_from_biclique(r, *picks), 2));
}

TEST_CASE("clique to biclique: edgeless graph") {
    Ugraph g(3);
    auto r1 = clique_to_biclique(g, 1);
    auto p = solve_biclique(r1.inst);
    REQUIRE(p);
    CHECK(is_clique(g, clique_from_biclique(r1, *p), 1));
    CHECK_FALSE(solve_biclique(clique_to_biclique(g, 2).inst));
}

TEST_CASE("clique to biclique agrees with brute force, both directions") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.range(1, 6), k = rng.range(1, 3);
        Ugraph g = random_graph(rng, n, 1, 2);
        auto r = clique_to_biclique(g, k);
        const bool yes = has_clique(g, k);
        auto picks = solve_biclique(r.inst);
        INFO("trial " << trial);
        CHECK(yes == picks.has_value());
        if (picks) CHECK(is_clique(g, clique_from_biclique(r, *picks), k));
        if (auto c = solve_clique(g, k)) {
            CHECK(is_clique(g, *c, k));
            CHECK(is_biclique_solution(r.inst, biclique_from_clique(r, *c)));
        } else {
            CHECK_FALSE(yes);
        }
    }
}

TEST_CASE("biclique to edge balancing: forward map balances") {
    Ugraph g(2);
    g.add_edge(0, 1, Rational(1));
    auto br = clique_to_biclique(g, 2);
    auto xs = nonaveraging_set(2, 2);
    auto r = biclique_to_edge_balancing(br.inst, xs);
    CHECK(r.m == 9);
    CHECK(r.b == 36);
    CHECK(r.eb.d.num_vertices() == 5);
    CHECK(r.eb.d.num_arcs() == 4 + 4);
    auto picks = biclique_from_clique(br, {0, 1});
    auto chi = chi_from_biclique(r, br.inst, picks);
    CHECK(is_edge_balancing_solution(r.eb, chi));
    CHECK(biclique_from_chi(r, br.inst, chi) == picks);
}

TEST_CASE("biclique to edge balancing: k=1, n=1") {
    Ugraph g(1);
    auto br = clique_to_biclique(g, 1);
    auto r = biclique_to_edge_balancing(br.inst, nonaveraging_set(1, 1));
    auto chi = solve_edge_balancing(r.eb);
    REQUIRE(chi);
    CHECK(brute_balancing(r.eb));
    CHECK(is_biclique_solution(br.inst, biclique_from_chi(r, br.inst, *chi)));
}

TEST_CASE("biclique to edge balancing agrees with brute force") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.range(1, 2);
        Ugraph g = random_graph(rng, n, 1, 2);
        auto br = clique_to_biclique(g, 2);
        auto r = biclique_to_edge_balancing(br.inst, nonaveraging_set(2, n));
        auto chi = solve_edge_balancing(r.eb);
        INFO("trial " << trial);
        CHECK(chi.has_value() == has_clique(g, 2));
        if (chi) {
            CHECK(is_edge_balancing_solution(r.eb, *chi));
            auto picks = biclique_from_chi(r, br.inst, *chi);
            CHECK(is_biclique_solution(br.inst, picks));
            CHECK(is_clique(g, clique_from_biclique(br, picks), 2));
        }
    }
}

TEST_CASE("edge balancing solver matches the product scan") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        EdgeBalancingInstance eb;
        eb.d = Digraph(rng.range(2, 4));
        const int m = rng.range(1, 5);
        for (int a = 0; a < m; ++a) {
            add_random_arc(rng, eb.d);
            std::vector<std::int64_t> s;
            for (int x = 1; x <= 4; ++x)
                if (rng.chance(1, 2)) s.push_back(x);
            eb.sets.push_back(s);
        }
        auto chi = solve_edge_balancing(eb);
        INFO("trial " << trial);
        CHECK(chi.has_value() == brute_balancing(eb));
        if (chi) CHECK(is_edge_balancing_solution(eb, *chi));
    }
}

TEST_CASE("H_s has exactly two path types") {
    for (int s = 1; s <= 4; ++s) {
        Gadget h = build_gadget_Hs(s);
        CHECK(h.internals.size() == static_cast<std::size_t>(6 * s));
        auto types = enumerate_gadget_types(h);
        std::set<PathType> want{pt({{h.b_in, h.b_out}}),
                                pt(std::vector<std::pair<int, int>>(s, {h.a_in, h.a_out}))};
        INFO("s=" << s);
        CHECK(types == want);
        CHECK(valid_path_decomposition(h.graph, h.internals, h.internal_pd));
        CHECK(h.internal_pd.width() <= 6);
    }
}

TEST_CASE("H_X has one path type per element") {
    for (std::vector<std::int64_t> xs : std::vector<std::vector<std::int64_t>>{
             {1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}}) {
        Gadget h = build_gadget_HX(xs);
        auto types = enumerate_gadget_types(h);
        const std::int64_t total = std::accumulate(xs.begin(), xs.end(), std::int64_t{0});
        std::set<PathType> want;
        for (std::int64_t x : xs) {
            std::vector<std::pair<int, int>> t{{h.b_in, h.b_out}};
            t.insert(t.end(), total - x, {h.a_in, h.a_out});
            want.insert(pt(t));
        }
        CHECK(types == want);
        CHECK(valid_path_decomposition(h.graph, h.internals, h.internal_pd));
        CHECK(h.internal_pd.width() <= 7);
    }
}

TEST_CASE("walk reduction: a single arc with X = {1}") {
    auto eb = one_arc({1});
    auto r = edge_balancing_to_walk(eb);
    CHECK(r.s_star == 1);
    CHECK(r.star_paths.size() == 2);
    CHECK(r.plus_paths[0].size() == 1);
    CHECK(r.minus_paths[1].size() == 1);
    const Digraph& g = r.wi.d;
    CHECK(g.in_arcs(r.c_in).size() == 2);
    CHECK(g.out_arcs(r.c_in).size() == 2);
    CHECK(valid_path_decomposition(g, all_vertices(g), r.pd));
    CHECK(r.pd.width() <= 4 + 7);
    // w_0 only sends and w_1 only receives: no balanced assignment.
    CHECK_FALSE(solve_edge_balancing(eb));
    CHECK_FALSE(solve_exactly_once_walk(r.wi));
}

TEST_CASE("walk reduction: a vertex without arcs stays reachable") {
    EdgeBalancingInstance eb;
    eb.d = Digraph(3);
    eb.d.add_arc(0, 1, Rational(1));
    eb.d.add_arc(1, 0, Rational(1));
    eb.sets = {{1}, {1}};
    auto r = edge_balancing_to_walk(eb);
    CHECK(r.plus_paths[2].size() == 1);
    CHECK(r.minus_paths[2].size() == 1);
    CHECK(r.star_paths.size() == 2 + 2 + 1);
    auto chi = solve_edge_balancing(eb);
    REQUIRE(chi);
    Walk fw = walk_from_chi(r, eb, *chi);
    CHECK(is_exactly_once_walk(r.wi, fw));
    auto w = solve_exactly_once_walk(r.wi);
    REQUIRE(w);
    CHECK(is_edge_balancing_solution(eb, chi_from_walk(r, eb, *w)));
}

TEST_CASE("walk reduction: c_in degree and decomposition width") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        EdgeBalancingInstance eb;
        const int k = rng.range(2, 3);
        eb.d = Digraph(k);
        for (int a = 0; a < rng.range(1, 4); ++a) {
            add_random_arc(rng, eb.d);
            eb.sets.push_back(rng.chance(1, 2) ? std::vector<std::int64_t>{1, 2} : std::vector<std::int64_t>{2});
        }
        auto r = edge_balancing_to_walk(eb);
        const Digraph& g = r.wi.d;
        std::int64_t isolated = 0;
        for (int v = 0; v < k; ++v) isolated += eb.d.in_arcs(v).empty() && eb.d.out_arcs(v).empty();
        CHECK(static_cast<std::int64_t>(g.in_arcs(r.c_in).size()) == r.s_star + eb.d.num_arcs() + isolated);
        CHECK(static_cast<std::int64_t>(g.out_arcs(r.c_out).size()) == r.s_star + eb.d.num_arcs() + isolated);
        CHECK(valid_path_decomposition(g, all_vertices(g), r.pd));
        CHECK(r.pd.width() <= k + 2 + 7);
        // Vertices outside U form an independent set.
        for (const Arc& a : g.arcs()) CHECK((r.wi.in_u[a.src] || r.wi.in_u[a.dst]));
    }
}

TEST_CASE("walk reduction: equivalence and backward map on tiny instances") {
    Rng rng(29);
    int yes = 0, no = 0;
    for (int trial = 0; trial < 40; ++trial) {
        EdgeBalancingInstance eb;
        eb.d = Digraph(rng.range(2, 3));
        const int m = rng.range(1, 3);
        for (int a = 0; a < m; ++a) {
            add_random_arc(rng, eb.d);
            std::vector<std::int64_t> s;
            if (rng.chance(1, 2)) s.push_back(1);
            if (s.empty() || rng.chance(1, 2)) s.push_back(2);
            eb.sets.push_back(s);
        }
        auto r = edge_balancing_to_walk(eb);
        const bool balanced = brute_balancing(eb);
        auto w = solve_exactly_once_walk(r.wi);
        INFO("trial " << trial);
        CHECK(balanced == w.has_value());
        if (w) {
            CHECK(is_exactly_once_walk(r.wi, *w));
            CHECK(is_edge_balancing_solution(eb, chi_from_walk(r, eb, *w)));
        }
        if (auto chi = solve_edge_balancing(eb)) {
            Walk fw = walk_from_chi(r, eb, *chi);
            CHECK(is_exactly_once_walk(r.wi, fw));
            CHECK(chi_from_walk(r, eb, fw) == *chi);
        }
        (balanced ? yes : no)++;
    }
    CHECK(yes > 0);
    CHECK(no > 0);
}

TEST_CASE("balanced at all but one vertex means balanced everywhere") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.range(2, 5);
        Digraph d = testutil::random_digraph(rng, n, 1, 2, 1, false);
        std::vector<std::int64_t> chi(d.num_arcs());
        for (auto& c : chi) c = rng.range(1, 5);
        std::vector<std::int64_t> net(n, 0);
        for (int a = 0; a < d.num_arcs(); ++a) {
            net[d.arc(a).src] += chi[a];
            net[d.arc(a).dst] -= chi[a];
        }
        CHECK(std::accumulate(net.begin(), net.end(), std::int64_t{0}) == 0);
        const bool all_but_last = std::all_of(net.begin(), net.end() - 1, [](std::int64_t v) { return v == 0; });
        if (all_but_last) CHECK(is_balanced(d, chi));
    }
}

TEST_CASE("ATSP reduction weights and threshold") {
    WalkInstance wi;
    wi.d = Digraph(3);
    wi.d.add_arc(0, 1, Rational(1));
    wi.d.add_arc(1, 0, Rational(1));
    wi.d.add_arc(0, 2, Rational(1));
    wi.d.add_arc(2, 0, Rational(1));
    wi.in_u = {0, 1, 1};
    auto r = walk_to_atsp(wi);
    CHECK(r.scale == 18);
    CHECK(r.threshold == 18 * 3);
    CHECK(r.g.arc(0).cost == Rational(18));
    CHECK(r.g.arc(1).cost == Rational(1));
    auto sol = solve_atsp_exact(r.g);
    REQUIRE(sol.feasible);
    CHECK(sol.cost == Rational(38));
    CHECK(sol.cost < Rational(r.threshold));
    Walk w = walk_from_tour(r, wi, sol.walk);
    CHECK(is_exactly_once_walk(wi, w));

    // Vertex 1 reachable only through a second visit of 2: every tour is too expensive.
    WalkInstance bad;
    bad.d = Digraph(3);
    bad.d.add_arc(0, 2, Rational(1));
    bad.d.add_arc(2, 1, Rational(1));
    bad.d.add_arc(1, 2, Rational(1));
    bad.d.add_arc(2, 0, Rational(1));
    bad.in_u = {0, 1, 1};
    auto rb = walk_to_atsp(bad);
    auto sb = solve_atsp_exact(rb.g);
    REQUIRE(sb.feasible);
    CHECK_FALSE(sb.cost < Rational(rb.threshold));
    CHECK_FALSE(solve_exactly_once_walk(bad));
    CHECK_THROWS(walk_from_tour(rb, bad, sb.walk));
}

TEST_CASE("exact ATSP agrees with the bitmask oracle") {
    Rng rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.range(2, 8);
        Digraph g = testutil::random_digraph(rng, n, 1, 3, 9);
        auto sol = solve_atsp_exact(g);
        auto ref = oracle_atsp(g);
        INFO("trial " << trial);
        REQUIRE(sol.feasible);
        CHECK(sol.cost == ref.cost);
        CHECK(walk_arc_cost(g, sol.walk) == sol.cost);
        auto seen = visited_set(sol.walk, n);
        CHECK(std::count(seen.begin(), seen.end(), 0) == 0);
    }
}

TEST_CASE("exactly-once walks: solver against the ATSP threshold") {
    Rng rng(41);
    int yes = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.range(2, 8);
        Digraph d = testutil::random_digraph(rng, n, 1, 3, 1, rng.chance(1, 2));
        WalkInstance wi;
        wi.in_u.assign(n, 1);
        // Random independent Z.
        for (int v = 0; v < n; ++v) {
            if (!rng.chance(1, 3)) continue;
            bool ok = true;
            for (int u = 0; u < n; ++u)
                if (!wi.in_u[u] && (d.find_arc(u, v) >= 0 || d.find_arc(v, u) >= 0)) ok = false;
            if (ok && d.find_arc(v, v) < 0) wi.in_u[v] = 0;
        }
        wi.d = d;
        auto w = solve_exactly_once_walk(wi);
        auto r = walk_to_atsp(wi);
        auto sol = solve_atsp_exact(r.g);
        const bool below = sol.feasible && sol.cost < Rational(r.threshold);
        INFO("trial " << trial);
        CHECK(w.has_value() == below);
        if (w) CHECK(is_exactly_once_walk(wi, *w));
        if (below) CHECK(is_exactly_once_walk(wi, walk_from_tour(r, wi, sol.walk)));
        yes += below;
    }
    CHECK(yes > 0);
}

TEST_CASE("exactly-once walk on a six-vertex instance") {
    // Z = {0, 3} is visited twice each, U = {1, 2, 4, 5} once.
    WalkInstance wi;
    wi.d = Digraph(6);
    for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 3}, {3, 2}, {2, 0}, {0, 4}, {4, 3}, {3, 5}, {5, 0}})
        wi.d.add_arc(u, v, Rational(1));
    wi.in_u = {0, 1, 1, 0, 1, 1};
    Walk known{{0, 1, 3, 2, 0, 4, 3, 5, 0}, true};
    CHECK(is_exactly_once_walk(wi, known));
    auto w = solve_exactly_once_walk(wi);
    REQUIRE(w);
    CHECK(is_exactly_once_walk(wi, *w));
    CHECK(w->seq.size() == known.seq.size());
}
