#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "vatsp/oracle.hpp"

using namespace vatsp;

namespace {

// Cheapest Hamiltonian cycle of the metric closure by scanning permutations
// with the first target fixed.
Rational permutation_optimum(const MetricClosure& d, std::vector<int> t) {
    if (t.size() <= 1) return Rational(0);
    Rational best = Rational::infinity();
    std::sort(t.begin() + 1, t.end());
    do {
        Rational c(0);
        bool ok = true;
        for (std::size_t i = 0; i < t.size() && ok; ++i) {
            int u = t[i], v = t[(i + 1) % t.size()];
            if (!d.reachable(u, v)) ok = false;
            else c += d.dist(u, v);
        }
        if (ok && c < best) best = c;
    } while (std::next_permutation(t.begin() + 1, t.end()));
    return best;
}

}  // namespace

TEST_CASE("oracle agrees with permutation scan") {
    Rng rng(71);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + trial % 7;
        Digraph g = testutil::random_digraph(rng, n + 2, 1, 3, 15, true);
        MetricClosure d(g);
        std::vector<int> targets(n);
        std::iota(targets.begin(), targets.end(), 0);
        auto r = oracle_closed_walk(g, d, targets);
        REQUIRE(r.feasible);
        CHECK(r.cost == permutation_optimum(d, targets));
        CHECK(r.cost == brute_force_tour_cost(d, targets));
        CHECK(r.walk.closed);
        CHECK(walk_arc_cost(g, r.walk) == r.cost);
        auto seen = visited_set(r.walk, g.num_vertices());
        for (int v : targets) CHECK(seen[v]);
    }
}

TEST_CASE("triangle tour picks the cheaper orientation") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(1));
    g.add_arc(1, 2, Rational(1));
    g.add_arc(2, 0, Rational(1));
    g.add_arc(0, 2, Rational(5));
    g.add_arc(2, 1, Rational(5));
    g.add_arc(1, 0, Rational(5));
    auto r = oracle_atsp(g);
    CHECK(r.cost == Rational(3));
    CHECK(r.walk.seq.size() == 4);
}

TEST_CASE("single target costs zero") {
    Digraph g(3);
    g.add_arc(0, 1, Rational(2));
    auto r = oracle_closed_walk(g, {1});
    CHECK(r.feasible);
    CHECK(r.cost == Rational(0));
}

TEST_CASE("unreachable targets are infeasible") {
    Digraph g(2);
    g.add_arc(0, 1, Rational(2));
    auto r = oracle_closed_walk(g, {0, 1});
    CHECK(!r.feasible);
    CHECK(r.cost.is_inf());
}

TEST_CASE("guard rejects large target sets") {
    Rng rng(5);
    Digraph g = testutil::random_digraph(rng, 8, 1, 2, 9);
    CHECK_THROWS_AS(oracle_closed_walk(g, {0, 1, 2, 3, 4, 5}, 4), GuardExceeded);
}
