#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "vatsp/dp_merge.hpp"
#include "vatsp/generate.hpp"
#include "vatsp/oracle.hpp"
#include "vatsp/vortex_dp.hpp"

using namespace vatsp;

namespace {

// Hexagonal face 0..5 with an outer vertex 6 adjacent to 1..4 and two vortex
// interior vertices (7 on bags 0..2, 8 on bags 2..5). The cheap arcs form the
// tour 0 7 0 5 8 5 4 6 2 3 6 1 0, whose two passes through 6 cross.
NearlyEmbeddableInstance crossing_instance() {
    NearlyEmbeddableInstance inst;
    inst.graph = Digraph(9);
    inst.planar = {1, 1, 1, 1, 1, 1, 1, 0, 0};
    inst.rotation = {{5, 1}, {0, 2, 6}, {1, 3, 6}, {2, 4, 6}, {3, 5, 6}, {4, 0}, {1, 2, 3, 4}, {}, {}};
    std::set<std::pair<int, int>> cheap = {{0, 5}, {5, 4}, {2, 3}, {1, 0}, {4, 6}, {6, 2}, {3, 6}, {6, 1},
                                           {0, 7}, {7, 0}, {5, 8}, {8, 5}};
    auto arc = [&](int u, int v) { inst.graph.add_arc(u, v, Rational(cheap.count({u, v}) ? 1 : 20)); };
    for (int i = 0; i < 6; ++i) {
        arc(i, (i + 1) % 6);
        arc((i + 1) % 6, i);
    }
    for (int v : {1, 2, 3, 4}) {
        arc(v, 6);
        arc(6, v);
    }
    for (auto [u, v] : {std::pair{0, 7}, {7, 0}, {5, 8}, {8, 5}}) arc(u, v);
    Vortex h;
    h.face = {0, 1, 2, 3, 4, 5};
    h.vertices = {0, 1, 2, 3, 4, 5, 7, 8};
    h.bags = {{0, {0, 7}}, {1, {1, 7}}, {2, {2, 7, 8}}, {3, {3, 8}}, {4, {4, 8}}, {5, {5, 8}}};
    inst.vortices = {h};
    inst.params = {0, 0, 1, 2};
    return inst;
}

// Face path 0..4, one vertex per bag, and an outer vertex 5 with the shortcut 1 -> 5 -> 3.
DpContext path_context() {
    DpContext ctx;
    ctx.graph = Digraph(6);
    for (int i = 0; i + 1 < 5; ++i) {
        ctx.graph.add_arc(i, i + 1, Rational(3));
        ctx.graph.add_arc(i + 1, i, Rational(3));
    }
    ctx.graph.add_arc(1, 5, Rational(1));
    ctx.graph.add_arc(5, 3, Rational(1));
    ctx.d = MetricClosure(ctx.graph);
    ctx.face = {0, 1, 2, 3, 4};
    ctx.bags = {{0}, {1}, {2}, {3}, {4}};
    ctx.targets = {0, 1, 2, 3, 4};
    return ctx;
}

PartialSolution solution(const DpContext& ctx, std::vector<Walk> walks) {
    PartialSolution s{std::move(walks), Rational(0)};
    s.cost = solution_cost(ctx, s);
    return s;
}

DpKey with_grip(DpKey k, int u, int v, int hub) {
    k.a = Grip{Grip::Kind::Pair, {u, v}, {-1, -1}};
    k.l = k.r = hub;
    return k;
}

void check_walk(const NearlyEmbeddableInstance& inst, const VortexWalkResult& r) {
    REQUIRE(r.feasible);
    CHECK(r.walk.closed);
    CHECK(r.walk.seq.front() == r.walk.seq.back());
    CHECK(walk_uses_arcs(inst.graph, r.walk));
    CHECK(walk_arc_cost(inst.graph, r.walk) == r.cost);
    auto seen = visited_set(r.walk, inst.graph.num_vertices());
    for (int v : inst.vortices[0].vertices) CHECK(seen[v]);
}

// Signature of an arc multiset on the boundary X: balance, visited flag and
// a canonical label of the weak component (0 for unvisited vertices).
using Signature = std::tuple<std::vector<int>, std::vector<int>>;

Signature signature_of(const std::vector<int>& x, const std::vector<std::pair<int, int>>& arcs) {
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int v) {
        if (!parent.count(v)) parent[v] = v;
        return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    std::map<int, int> bal;
    for (auto [u, v] : arcs) {
        ++bal[u];
        --bal[v];
        parent[find(u)] = find(v);
    }
    std::vector<int> b, lab;
    std::map<int, int> canon;
    for (int v : x) {
        b.push_back(bal.count(v) ? bal[v] : 0);
        if (!parent.count(v)) {
            lab.push_back(0);
            continue;
        }
        auto it = canon.try_emplace(find(v), static_cast<int>(canon.size()) + 1).first;
        lab.push_back(it->second);
    }
    return {b, lab};
}

Signature signature_of(const DpTableEntry& e) {
    std::vector<std::pair<int, int>> arcs;
    for (const Walk& w : e.solution.walks)
        for (int i = 0; i + 1 < static_cast<int>(w.seq.size()); ++i) arcs.emplace_back(w.seq[i], w.seq[i + 1]);
    return signature_of(e.key.boundary, arcs);
}

}  // namespace

TEST_CASE("vortex program matches the oracle with width one") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Profile pr;
        pr.n = 6 + static_cast<int>(seed % 7);
        pr.p = 1;
        auto inst = generate_instance(seed, pr);
        auto r = optimal_vortex_walk(inst);
        auto q = oracle_vortex_walk(inst);
        CHECK_MESSAGE(r.cost == q.cost, "seed ", seed);
        check_walk(inst, r);
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("vortex program matches the oracle with width two") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Profile pr;
        pr.n = 7 + static_cast<int>(seed % 4);
        pr.p = 2;
        auto inst = generate_instance(seed, pr);
        auto r = optimal_vortex_walk(inst);
        CHECK_MESSAGE(r.cost == oracle_vortex_walk(inst).cost, "seed ", seed);
        check_walk(inst, r);
    }
}

TEST_CASE("unpruned run gives the same optimum") {
    VortexDpOptions full;
    full.prune = false;
    for (std::uint64_t seed = 3; seed <= 8; ++seed) {
        Profile pr;
        pr.n = 7;
        pr.p = 1 + static_cast<int>(seed % 2);
        auto inst = generate_instance(seed, pr);
        CHECK(optimal_vortex_walk(inst).cost == optimal_vortex_walk(inst, full).cost);
    }
}

TEST_CASE("every table entry is compatible with its key") {
    VortexDpOptions opts;
    opts.self_check = true;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Profile pr;
        pr.n = 8;
        pr.p = 1 + static_cast<int>(seed % 2);
        auto r = optimal_vortex_walk(generate_instance(seed, pr), opts);
        CHECK(r.stats.checked > 0);
        CHECK(r.stats.check_failures == 0);
    }
}

TEST_CASE("crossing passes through an outer vertex") {
    auto inst = crossing_instance();
    REQUIRE(validate(inst).empty());
    auto q = oracle_vortex_walk(inst);
    CHECK(q.cost == Rational(12));
    auto r = optimal_vortex_walk(inst);
    CHECK(r.cost == Rational(12));
    check_walk(inst, r);

    VortexDpOptions no_hubs;
    no_hubs.max_hubs = 0;
    CHECK(optimal_vortex_walk(inst, no_hubs).cost > Rational(12));
}

TEST_CASE("single vertex vortex costs nothing") {
    NearlyEmbeddableInstance inst;
    inst.graph = Digraph(2);
    inst.graph.add_arc(0, 1, Rational(4));
    inst.graph.add_arc(1, 0, Rational(4));
    inst.planar = {1, 1};
    inst.rotation = {{1}, {0}};
    Vortex h;
    h.face = {0};
    h.vertices = {0};
    h.bags = {{0, {0}}};
    inst.vortices = {h};
    inst.params = {0, 0, 1, 1};
    auto r = optimal_vortex_walk(inst);
    REQUIRE(r.feasible);
    CHECK(r.cost == Rational(0));
    CHECK(r.walk.seq == std::vector<int>{0});
}

TEST_CASE("table initialisation agrees with exhaustive arc sets") {
    Profile pr;
    pr.n = 6;
    pr.p = 1;
    auto inst = generate_instance(11, pr);
    DpContext ctx = make_context(inst);
    VortexDpOptions opts;
    opts.max_hubs = 0;
    auto entries = dp_init(ctx, opts);
    const int len = ctx.length();

    // An arc belongs to the first bag holding both ends; the two-bag tables
    // additionally get the face arcs between their ends.
    auto first_common = [&](int u, int v) {
        for (int q = 0; q < len; ++q) {
            const auto& b = ctx.bags[q];
            if (std::count(b.begin(), b.end(), u) && std::count(b.begin(), b.end(), v)) return q;
        }
        return -1;
    };
    int intervals = 0;
    for (int i = 0; i < len; ++i)
        for (int j = i; j <= std::min(i + 1, len - 1); ++j) {
            auto x = ctx.boundary(i, j);
            std::vector<std::pair<int, int>> family;
            for (int u : x)
                for (int v : x) {
                    if (u == v || !ctx.d.reachable(u, v)) continue;
                    int q = first_common(u, v);
                    if (q == i || q == j) family.emplace_back(u, v);
                }
            if (j > i) {
                int fi = ctx.face[i], fj = ctx.face[j];
                if (fi != fj && ctx.d.reachable(fi, fj)) family.emplace_back(fi, fj);
                if (fi != fj && ctx.d.reachable(fj, fi)) family.emplace_back(fj, fi);
            }
            std::map<Signature, Rational> best;
            const int m = static_cast<int>(family.size());
            std::vector<std::pair<int, int>> chosen;
            std::function<void(int, Rational)> rec = [&](int from, Rational cost) {
                auto sig = signature_of(x, chosen);
                auto it = best.find(sig);
                if (it == best.end() || cost < it->second) best[sig] = cost;
                if (chosen.size() == 3) return;
                for (int a = from; a < m; ++a) {
                    chosen.push_back(family[a]);
                    rec(a, cost + ctx.d.dist(family[a].first, family[a].second));
                    chosen.pop_back();
                }
            };
            rec(0, Rational(0));

            std::map<Signature, const DpTableEntry*> table;
            for (const auto& e : entries)
                if (e.key.first == i && e.key.last == j) {
                    auto sig = signature_of(e);
                    CHECK(!table.count(sig));
                    table[sig] = &e;
                    CHECK(compatible(ctx, e.solution, e.key));
                }
            for (const auto& [sig, cost] : best) {
                auto it = table.find(sig);
                REQUIRE(it != table.end());
                CHECK(it->second->solution.cost <= cost);
            }
            for (const auto& [sig, e] : table) {
                int steps = 0;
                for (const Walk& w : e->solution.walks) steps += w.num_steps();
                if (steps <= 3) {
                    REQUIRE(best.count(sig));
                    CHECK(best[sig] == e->solution.cost);
                }
            }
            ++intervals;
        }
    CHECK(intervals == 2 * len - 1);
}

TEST_CASE("merge rejects mismatched degrees at a forgotten vertex") {
    DpContext ctx = path_context();
    auto s1 = solution(ctx, {Walk{{0, 1, 2}, false}});
    auto s2 = solution(ctx, {Walk{{4, 3, 2}, false}});
    auto target = key_of(ctx, 0, 4, solution(ctx, {Walk{{0, 1, 2, 3, 4}, false}}));
    CHECK(!dp_merge(ctx, s1, key_of(ctx, 0, 2, s1), s2, key_of(ctx, 2, 4, s2), target));
}

TEST_CASE("merge concatenates walks meeting at the shared bag") {
    DpContext ctx = path_context();
    auto s1 = solution(ctx, {Walk{{0, 1, 2}, false}});
    auto s2 = solution(ctx, {Walk{{2, 3, 4}, false}});
    auto k1 = key_of(ctx, 0, 2, s1), k2 = key_of(ctx, 2, 4, s2);
    REQUIRE(compatible(ctx, s1, k1));
    REQUIRE(compatible(ctx, s2, k2));
    auto whole = solution(ctx, {Walk{{0, 1, 2, 3, 4}, false}});
    auto target = key_of(ctx, 0, 4, whole);
    auto merged = dp_merge(ctx, s1, k1, s2, k2, target);
    REQUIRE(merged);
    CHECK(merged->cost == Rational(12));
    CHECK(merged->cost == s1.cost + s2.cost);
    CHECK(compatible(ctx, *merged, target));
}

TEST_CASE("merge keeps a shared grip walk once") {
    DpContext ctx = path_context();
    auto s1 = solution(ctx, {Walk{{0, 1, 5, 3}, false}, Walk{{1, 2, 1}, true}});
    auto s2 = solution(ctx, {Walk{{1, 5, 3, 4}, false}, Walk{{2, 3, 2}, true}});
    auto k1 = with_grip(key_of(ctx, 0, 2, s1), 1, 3, 5);
    auto k2 = with_grip(key_of(ctx, 2, 4, s2), 1, 3, 5);
    REQUIRE(compatible(ctx, s1, k1));
    REQUIRE(compatible(ctx, s2, k2));

    auto expected = solution(ctx, {Walk{{0, 1, 5, 3, 4}, false}, Walk{{1, 2, 1}, true}, Walk{{2, 3, 2}, true}});
    auto target = with_grip(key_of(ctx, 0, 4, expected), 1, 3, 5);
    auto merged = dp_merge(ctx, s1, k1, s2, k2, target);
    REQUIRE(merged);
    CHECK(compatible(ctx, *merged, target));
    CHECK(merged->cost == s1.cost + s2.cost - Rational(2));
    CHECK(merged->cost == expected.cost);
}

TEST_CASE("compatibility conditions") {
    DpContext ctx = path_context();
    auto whole = solution(ctx, {Walk{{0, 1, 2, 3, 4}, false}});
    auto key = key_of(ctx, 0, 4, whole);
    CHECK(compatible(ctx, whole, key));
    CHECK(key.f_out == std::vector<int>{1, 0});
    CHECK(key.f_in == std::vector<int>{0, 1});

    auto missing = solution(ctx, {Walk{{0, 1, 5, 3, 4}, false}});
    auto c = check_compatible(ctx, missing, key_of(ctx, 0, 4, missing));
    CHECK(!c.t1);
    CHECK(c.t4);

    DpKey wrong = key;
    wrong.f_out = {2, 0};
    auto w = check_compatible(ctx, whole, wrong);
    CHECK(w.t1);
    CHECK(!w.t4);
}

TEST_CASE("no apices leaves the plain program") {
    Profile pr;
    pr.n = 9;
    pr.p = 1;
    auto inst = generate_instance(5, pr);
    REQUIRE(inst.apices.empty());
    auto plain = optimal_vortex_walk(inst);
    auto with = optimal_vortex_walk_with_apices(inst);
    CHECK(plain.cost == with.cost);
    CHECK(with.apex_subset.empty());
}

TEST_CASE("an apex shortcut is taken when it pays") {
    auto inst = crossing_instance();
    int apex = inst.graph.add_vertex();
    inst.planar.push_back(0);
    inst.rotation.emplace_back();
    for (int v : inst.vortices[0].vertices) {
        inst.graph.add_arc(v, apex, Rational(1, 4));
        inst.graph.add_arc(apex, v, Rational(1, 4));
    }
    inst.apices = {apex};
    inst.params.a = 1;
    auto without = optimal_vortex_walk(inst);
    auto with = optimal_vortex_walk_with_apices(inst);
    CHECK(with.apex_subset == std::vector<int>{apex});
    CHECK(with.cost < without.cost);
    CHECK(with.cost == oracle_vortex_walk(inst).cost);
    check_walk(inst, with);
}

TEST_CASE("apex enumeration matches the oracle and never loses to no apices") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Profile pr;
        pr.n = 10;
        pr.p = 1;
        pr.a = 1 + static_cast<int>(seed % 2);
        auto inst = generate_instance(seed, pr);
        auto with = optimal_vortex_walk_with_apices(inst);
        CHECK_MESSAGE(with.cost == oracle_vortex_walk(inst).cost, "seed ", seed);
        CHECK(with.cost <= optimal_vortex_walk(inst).cost);
        check_walk(inst, with);
    }
}
