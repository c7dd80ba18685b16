#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vatsp/dp_merge.hpp"
#include "vatsp/instance.hpp"
#include "vatsp/oracle.hpp"

namespace vatsp {

struct VortexDpOptions {
    // Bound on |out - in| at a boundary vertex; 0 means the number of vertices.
    int multiplicity_cap = 0;
    // Discards states whose cost plus a lower bound exceeds a heuristic tour;
    // falls back to the full table when that leaves no certified optimum.
    bool prune = true;
    // Rebuilds every table entry as walks and asserts compatibility with its key.
    bool self_check = false;
    // Outer vertices a partial solution may keep open across subpaths, so that
    // excursions out of the face can share a vertex.
    int max_hubs = 1;
    std::size_t state_limit = 4'000'000;
};

struct VortexDpStats {
    std::size_t states = 0;
    std::size_t merge_pairs = 0;
    bool full_rerun = false;
    std::size_t checked = 0;       // entries verified by the self-check
    std::size_t check_failures = 0;
};

struct VortexWalkResult {
    bool feasible = false;
    Rational cost = Rational::infinity();
    Walk walk;                     // closed, in the instance graph
    std::vector<int> apex_subset;  // apices the walk was allowed to use
    VortexDpStats stats;
};

struct DpGuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Table entries for every face subpath with at most one edge.
struct DpTableEntry {
    DpKey key;
    PartialSolution solution;
};
std::vector<DpTableEntry> dp_init(const DpContext& ctx, const VortexDpOptions& opts = {});

// Cheapest closed walk through every vertex of the vortex, apices unused.
VortexWalkResult optimal_vortex_walk(const NearlyEmbeddableInstance& inst, const VortexDpOptions& opts = {});
// Minimum over apex subsets A' of the program run with A' joined to every bag.
VortexWalkResult optimal_vortex_walk_with_apices(const NearlyEmbeddableInstance& inst,
                                                 const VortexDpOptions& opts = {});
// Exact reference by subset dynamic programming over the vortex vertices.
VortexWalkResult oracle_vortex_walk(const NearlyEmbeddableInstance& inst, int guard = kOracleGuard);

// Runs the program on a prepared context (targets and bags as given).
VortexWalkResult solve_vortex_context(const DpContext& ctx, const VortexDpOptions& opts = {});

}  // namespace vatsp
