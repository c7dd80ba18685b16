#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "vatsp/graph.hpp"

using namespace vatsp;

TEST_CASE("symmetrize takes the cheaper direction") {
    Digraph g(2);
    g.add_arc(0, 1, Rational(3));
    g.add_arc(1, 0, Rational(5));
    Symmetrization s = symmetrize(g);
    REQUIRE(s.graph.num_edges() == 1);
    CHECK(s.graph.edge(0).cost == Rational(3));
    CHECK(s.arc_to_edge[0] == 0);
    CHECK(s.arc_to_edge[1] == 0);

    Digraph h(2);
    h.add_arc(0, 1, Rational(7));
    CHECK(symmetrize(h).graph.edge(0).cost == Rational(7));
}

TEST_CASE("symmetrize agrees with the min formula on random graphs") {
    Rng rng(11);
    for (int seed = 0; seed < 20; ++seed) {
        Digraph g = testutil::random_digraph(rng, 8, 1, 3, 20, false);
        Symmetrization s = symmetrize(g);
        std::map<std::pair<int, int>, Rational> best;
        for (const Arc& a : g.arcs()) {
            auto key = std::minmax(a.src, a.dst);
            auto it = best.find(key);
            if (it == best.end() || a.cost < it->second) best[key] = a.cost;
        }
        REQUIRE(s.graph.num_edges() == static_cast<int>(best.size()));
        for (const Edge& e : s.graph.edges()) CHECK(best.at(std::minmax(e.u, e.v)) == e.cost);
        for (int a = 0; a < g.num_arcs(); ++a) {
            const Edge& e = s.graph.edge(s.arc_to_edge[a]);
            CHECK(std::minmax(e.u, e.v) == std::minmax(g.arc(a).src, g.arc(a).dst));
        }
    }
}

TEST_CASE("metric closure: triangle and tie-breaking") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 2, Rational(1));
    g.add_arc(0, 2, Rational(3));
    MetricClosure d(g);
    CHECK(d.dist(0, 2) == Rational(2));
    CHECK(d.path(0, 2) == std::vector<int>{0, 1, 2});
    CHECK(d.dist(2, 0).is_inf());
    CHECK_FALSE(d.reachable(2, 0));

    Digraph h(4);
    h.add_arc(0, 2, Rational(1));
    h.add_arc(2, 3, Rational(1));
    h.add_arc(0, 1, Rational(1));
    h.add_arc(1, 3, Rational(1));
    MetricClosure e(h);
    CHECK(e.path(0, 3) == std::vector<int>{0, 1, 3});
    CHECK(e.next_hop(0, 3) == 1);
}

TEST_CASE("metric closure matches Floyd-Warshall and the triangle inequality") {
    Rng rng(5);
    for (int seed = 0; seed < 20; ++seed) {
        Digraph g = testutil::random_digraph(rng, 10, 1, 4, 30, seed % 2 == 0);
        MetricClosure d(g);
        auto fw = floyd_warshall(g);
        for (int u = 0; u < 10; ++u)
            for (int v = 0; v < 10; ++v) {
                CHECK(d.dist(u, v) == fw[u][v]);
                if (!d.reachable(u, v)) continue;
                auto p = d.path(u, v);
                CHECK(p.front() == u);
                CHECK(p.back() == v);
                Walk w{p, false};
                CHECK(walk_arc_cost(g, w) == d.dist(u, v));
                for (int x = 0; x < 10; ++x)
                    if (d.reachable(u, x) && d.reachable(x, v)) CHECK(d.dist(u, v) <= d.dist(u, x) + d.dist(x, v));
            }
    }
}

TEST_CASE("cut arcs: definitions and complement identity") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(2, 0, Rational(1));
    CutSide u = CutSide::from_mask(0b001, 3);
    CHECK(cut_arcs(g, u, CutMode::Out) == std::vector<int>{0});
    CHECK(cut_arcs(g, u, CutMode::In) == std::vector<int>{1});

    Rng rng(9);
    Digraph h = testutil::random_digraph(rng, 8, 1, 3, 5);
    Symmetrization s = symmetrize(h);
    std::vector<long> per_arc(h.num_arcs(), 0);
    long total = 0;
    for (std::uint64_t mask = 1; mask + 1 < (1u << 8); ++mask) {
        CutSide c = CutSide::from_mask(mask, 8);
        CHECK(c.proper());
        auto out = cut_arcs(h, c, CutMode::Out);
        auto in = cut_arcs(h, c, CutMode::In);
        for (int a : out) ++per_arc[a];
        total += static_cast<long>(out.size());
        // Projection of out ∪ in onto the symmetrization equals the undirected cut.
        std::vector<int> proj;
        for (int a : out) proj.push_back(s.arc_to_edge[a]);
        for (int a : in) proj.push_back(s.arc_to_edge[a]);
        std::sort(proj.begin(), proj.end());
        proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
        auto und = cut_arcs(h, c, CutMode::Undirected);
        std::sort(und.begin(), und.end());
        CHECK(proj == und);
        CHECK(und == cut_edges(s.graph, c));
    }
    // A non-loop arc leaves exactly the 2^(n-2) sets that contain its tail but not its head.
    for (int a = 0; a < h.num_arcs(); ++a) CHECK(per_arc[a] == 64);
    CHECK(total == 64L * h.num_arcs());

    for (int v = 0; v < 3; ++v) {
        CutSide single = CutSide::from_mask(1u << v, 3);
        CutSide rest = CutSide::from_mask(0b111 & ~(1u << v), 3);
        CHECK(cut_arcs(g, rest, CutMode::Out) == cut_arcs(g, single, CutMode::In));
    }
}

TEST_CASE("shortcut splices at the shared vertex") {
    Walk a{{0, 1, 0}, true}, b{{0, 2, 0}, true};
    CHECK(shortcut(a, b, 0).seq == std::vector<int>{0, 1, 0, 2, 0});
    Walk c{{3, 4, 5, 6, 3}, true}, e{{7, 5, 8, 7}, true};
    // x1..xk, v, ... spliced with the rotation of the second walk starting at v.
    CHECK(shortcut(c, e, 5).seq == std::vector<int>{3, 4, 5, 8, 7, 5, 6, 3});
    CHECK_THROWS(shortcut(a, b, 9));
}

TEST_CASE("shortcut preserves cost and arc multiset") {
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        Digraph g = testutil::random_metric(rng, 6, 9);
        MetricClosure d(g);
        auto rnd_walk = [&](int must) {
            Walk w;
            int len = rng.range(1, 5);
            w.seq.push_back(must);
            for (int i = 0; i < len; ++i) w.seq.push_back(rng.range(0, 5));
            w.seq.push_back(must);
            w.closed = true;
            rng.shuffle(w.seq);
            w.seq.back() = w.seq.front();
            if (std::find(w.seq.begin(), w.seq.end(), must) == w.seq.end()) w.seq.insert(w.seq.begin() + 1, must);
            return w;
        };
        int v = rng.range(0, 5);
        Walk a = rnd_walk(v), b = rnd_walk(v);
        Walk s = shortcut(a, b, v);
        CHECK(s.seq.front() == s.seq.back());
        CHECK(walk_cost(d, s) == walk_cost(d, a) + walk_cost(d, b));
        std::multiset<std::pair<int, int>> before, after;
        for (std::size_t i = 0; i + 1 < a.seq.size(); ++i) before.insert({a.seq[i], a.seq[i + 1]});
        for (std::size_t i = 0; i + 1 < b.seq.size(); ++i) before.insert({b.seq[i], b.seq[i + 1]});
        for (std::size_t i = 0; i + 1 < s.seq.size(); ++i) after.insert({s.seq[i], s.seq[i + 1]});
        CHECK(before == after);
    }
}

TEST_CASE("closed walk cost is rotation invariant") {
    Rng rng(3);
    Digraph g = testutil::random_metric(rng, 7, 12);
    MetricClosure d(g);
    Walk w{{0, 3, 5, 1, 3, 0}, true};
    for (int v : {3, 5, 1}) CHECK(walk_cost(d, rotate_closed(w, v)) == walk_cost(d, w));
}

TEST_CASE("euler circuits") {
    Digraph tri(3);
    tri.add_arc(0, 1, Rational(1));
    tri.add_arc(1, 2, Rational(1));
    tri.add_arc(2, 0, Rational(1));
    auto r = euler_closed_walk(tri);
    CHECK(r.walk.seq.size() == 4);

    Digraph eight(5);
    for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}})
        eight.add_arc(u, v, Rational(1));
    CHECK(euler_closed_walk(eight).arc_order.size() == 6);

    Digraph bad(2);
    bad.add_arc(0, 1, Rational(1));
    CHECK_THROWS(euler_closed_walk(bad));

    Rng rng(17);
    for (int t = 0; t < 30; ++t) {
        // Union of random closed walks sharing vertex 0 is balanced and connected.
        Digraph g(6);
        int arcs = 0;
        while (arcs < 9) {
            int len = rng.range(2, 4);
            int prev = 0;
            for (int i = 0; i < len; ++i) {
                int nxt = i + 1 == len ? 0 : rng.range(1, 5);
                if (nxt == prev) nxt = (nxt + 1) % 6;
                g.add_arc(prev, nxt, Rational(1));
                ++arcs;
                prev = nxt;
            }
            if (prev != 0) {
                g.add_arc(prev, 0, Rational(1));
                ++arcs;
            }
        }
        auto e = euler_closed_walk(g);
        std::vector<int> order = e.arc_order;
        std::sort(order.begin(), order.end());
        std::vector<int> all(g.num_arcs());
        for (int i = 0; i < g.num_arcs(); ++i) all[i] = i;
        CHECK(order == all);
        for (std::size_t i = 0; i < e.arc_order.size(); ++i) {
            CHECK(g.arc(e.arc_order[i]).src == e.walk.seq[i]);
            CHECK(g.arc(e.arc_order[i]).dst == e.walk.seq[i + 1]);
        }
    }
}

TEST_CASE("graph text format round-trips") {
    Rng rng(2);
    Digraph g = testutil::random_digraph(rng, 5, 1, 2, 9);
    g.set_cost(0, Rational(7, 3));
    g.set_label(1, "hub");
    std::ostringstream os;
    write_graph(os, g);
    std::istringstream is(os.str());
    Digraph h = read_graph(is);
    std::ostringstream os2;
    write_graph(os2, h);
    CHECK(os.str() == os2.str());
    CHECK(h.label(1) == "hub");
}
