#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vatsp/gadgets.hpp"
#include "vatsp/graph.hpp"

namespace vatsp {

struct HardnessGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- non-averaging sets -------------------------------------------------

// {(k+1)^i : 1 <= i <= n}.
std::vector<std::int64_t> nonaveraging_set(int k, int n);
// Scans every k-multiset of X.
bool is_nonaveraging(const std::vector<std::int64_t>& xs, int k);

// ---- clique and multicolored biclique -----------------------------------

std::optional<std::vector<int>> solve_clique(const Ugraph& g, int k);
bool is_clique(const Ugraph& g, const std::vector<int>& vs, int k);

struct BicliqueInstance {
    Ugraph graph;
    int k = 0;
    std::vector<std::vector<int>> classes;  // 2k classes; j-th vertex of class i
};

// Classes 1..k and k+1..2k are copies of V(G); (i, u) ~ (k+i', v) iff
// u = v when i = i', and uv ∈ E(G) otherwise.
struct BicliqueReduction {
    BicliqueInstance inst;
    int source_vertices = 0;
};
BicliqueReduction clique_to_biclique(const Ugraph& g, int k);
// One original vertex per left class; a k-clique of G.
std::vector<int> clique_from_biclique(const BicliqueReduction& r, const std::vector<int>& picks);
std::vector<int> biclique_from_clique(const BicliqueReduction& r, const std::vector<int>& clique);

std::optional<std::vector<int>> solve_biclique(const BicliqueInstance& b, std::uint64_t limit = 100'000'000);
bool is_biclique_solution(const BicliqueInstance& b, const std::vector<int>& picks);

// ---- edge balancing -----------------------------------------------------

struct EdgeBalancingInstance {
    Digraph d;
    std::vector<std::vector<std::int64_t>> sets;  // per arc, sorted
};

bool is_balanced(const Digraph& d, const std::vector<std::int64_t>& chi);
bool is_edge_balancing_solution(const EdgeBalancingInstance& eb, const std::vector<std::int64_t>& chi);
std::optional<std::vector<std::int64_t>> solve_edge_balancing(const EdgeBalancingInstance& eb,
                                                              std::uint64_t limit = 200'000'000);

// Vertex 0 is w, vertex i is w_i.
struct BalancingReduction {
    EdgeBalancingInstance eb;
    int k = 0, n = 0;
    std::vector<std::int64_t> xs;
    std::int64_t m = 0, b = 0;
};
BalancingReduction biclique_to_edge_balancing(const BicliqueInstance& bi, const std::vector<std::int64_t>& xs,
                                              std::size_t max_set_size = 1'000'000);
std::vector<std::int64_t> chi_from_biclique(const BalancingReduction& r, const BicliqueInstance& bi,
                                            const std::vector<int>& picks);
std::vector<int> biclique_from_chi(const BalancingReduction& r, const BicliqueInstance& bi,
                                   const std::vector<std::int64_t>& chi);

// ---- exactly-once walks -------------------------------------------------

struct WalkInstance {
    Digraph d;
    std::vector<char> in_u;  // visited exactly once
};

bool is_exactly_once_walk(const WalkInstance& wi, const Walk& w);
// Requires V \ U to be independent.
std::optional<Walk> solve_exactly_once_walk(const WalkInstance& wi, std::uint64_t limit = 50'000'000);

struct GadgetPlacement {
    int arc = -1;
    int hub = -1;                // the internal vertex v
    std::vector<HsCopy> copies;  // one per element of X_e, same order
};

struct WalkReduction {
    WalkInstance wi;
    int k = 0;
    int c_in = -1, c_out = -1;
    std::vector<GadgetPlacement> gadgets;
    std::vector<std::vector<int>> plus_paths, minus_paths;  // middle vertices per w_i
    std::vector<int> star_paths;
    std::int64_t s_star = 0;
    PathDecomposition pd;
};
WalkReduction edge_balancing_to_walk(const EdgeBalancingInstance& eb, std::size_t max_vertices = 200'000);
Walk walk_from_chi(const WalkReduction& r, const EdgeBalancingInstance& eb, const std::vector<std::int64_t>& chi);
std::vector<std::int64_t> chi_from_walk(const WalkReduction& r, const EdgeBalancingInstance& eb, const Walk& w);

// ---- weighted ATSP ------------------------------------------------------

struct AtspReduction {
    Digraph g;                 // weight 2n² into U, 1 otherwise
    std::int64_t threshold = 0;  // yes iff the optimum is below it
    std::int64_t scale = 0;      // 2n²
};
AtspReduction walk_to_atsp(const WalkInstance& wi);
// A closed spanning walk below the threshold, read as an exactly-once walk.
Walk walk_from_tour(const AtspReduction& r, const WalkInstance& wi, const Walk& tour);

struct AtspSolution {
    bool feasible = false;
    Rational cost = Rational::infinity();
    Walk walk;
    std::uint64_t nodes = 0;
};
// Exact minimum-cost closed spanning walk by branch and bound over
// circulations with per-vertex coverage, branching on the smallest set of arcs
// leaving or entering a disconnected component.
AtspSolution solve_atsp_exact(const Digraph& g, std::uint64_t node_limit = 200'000);

}  // namespace vatsp
