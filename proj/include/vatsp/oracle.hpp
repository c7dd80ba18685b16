#pragma once

#include <stdexcept>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/rational.hpp"

namespace vatsp {

constexpr int kOracleGuard = 18;

struct OracleResult {
    bool feasible = false;
    Rational cost = Rational::infinity();
    // Closed walk in g (shortest paths expanded) visiting every vertex of the target set.
    Walk walk;
};

// Minimum-cost closed walk visiting every vertex of `targets`, by bitmask DP over
// the metric closure. A single target costs 0. Throws when |targets| exceeds the guard.
OracleResult oracle_closed_walk(const Digraph& g, const MetricClosure& d, const std::vector<int>& targets,
                                int guard = kOracleGuard);
OracleResult oracle_closed_walk(const Digraph& g, const std::vector<int>& targets, int guard = kOracleGuard);

// Exact ATSP optimum over every vertex of g.
OracleResult oracle_atsp(const Digraph& g, int guard = kOracleGuard);

// Reference by permutation scan (targets <= 9), kept independent of the DP.
Rational brute_force_tour_cost(const MetricClosure& d, const std::vector<int>& targets);

struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vatsp
