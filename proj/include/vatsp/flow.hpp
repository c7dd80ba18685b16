#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vatsp/rational.hpp"

namespace vatsp {

// Max-flow / min-cut with exact rational capacities (Edmonds-Karp).
class FlowNetwork {
public:
    explicit FlowNetwork(int n) : adj_(n) {}
    void add_edge(int u, int v, Rational cap);
    Rational max_flow(int s, int t);
    // After max_flow: vertices reachable from s in the residual graph.
    std::vector<char> source_side(int s) const;

private:
    struct E {
        int to;
        Rational cap;
        int rev;
    };
    std::vector<std::vector<E>> adj_;
};

struct CircArc {
    int u = 0, v = 0;
    std::int64_t lower = 0, upper = 0;
    Rational cost;
};

// Minimum-cost integral circulation respecting lower/upper bounds, by successive
// shortest paths (costs must be nonnegative). Returns the flow per arc, or
// nullopt if no feasible circulation exists.
std::optional<std::vector<std::int64_t>> min_cost_circulation(int n, const std::vector<CircArc>& arcs);

}  // namespace vatsp
