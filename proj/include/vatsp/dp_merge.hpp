#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/instance.hpp"

namespace vatsp {

// Face positions, bags and metric shared by the table keys of one vortex.
struct DpContext {
    Digraph graph;
    MetricClosure d;
    std::vector<int> face;               // face vertex at every position
    std::vector<std::vector<int>> bags;  // sorted, one per position
    std::vector<int> targets;            // every vertex the closed walk must visit

    int length() const { return static_cast<int>(face.size()); }
    // B_first ∪ B_last, sorted.
    std::vector<int> boundary(int first, int last) const;
    // Union of the bags first..last, sorted.
    std::vector<int> hp_vertices(int first, int last) const;
};

// `extra` vertices (chosen apices) join every bag and the target set. `graph`
// replaces the instance graph when given (apex-free subgraphs).
DpContext make_context(const NearlyEmbeddableInstance& inst, const std::vector<int>& extra = {},
                       const Digraph* graph = nullptr);

struct Grip {
    enum class Kind { None, Pair, TwoPairs };
    Kind kind = Kind::None;
    std::pair<int, int> first{-1, -1}, second{-1, -1};
    bool operator==(const Grip&) const = default;
};

struct DpKey {
    int first = 0, last = 0;  // face positions of the endpoints of P
    bool closed = false;      // P is the whole face
    std::vector<int> boundary;
    std::vector<int> block;  // partition label per boundary vertex
    std::vector<int> f_in, f_out;
    Grip a;
    int l = -1, r = -1, p = -1;
    bool operator==(const DpKey&) const = default;
};

struct PartialSolution {
    std::vector<Walk> walks;  // single-vertex walks mark vertices not yet reached
    Rational cost;
};

Rational solution_cost(const DpContext& ctx, const PartialSolution& s);

// Conditions T1-T5 evaluated on the walks. T4 counts the open walks that start
// (f_out) and end (f_in) at every boundary vertex.
struct Compatibility {
    bool t1 = false, t2 = false, t3 = false, t4 = false, t5 = false;
    bool ok() const { return t1 && t2 && t3 && t4 && t5; }
};
Compatibility check_compatible(const DpContext& ctx, const PartialSolution& s, const DpKey& key);
bool compatible(const DpContext& ctx, const PartialSolution& s, const DpKey& key);

// The grip walk(s) of a key: shortest paths through the waypoints.
std::vector<Walk> grip_walks(const DpContext& ctx, const DpKey& key);

// Merges solutions of P1 = [first1, w] and P2 = [w, last2] into one for `key`;
// nullopt when any merging phase rejects.
std::optional<PartialSolution> dp_merge(const DpContext& ctx, const PartialSolution& s1, const DpKey& k1,
                                        const PartialSolution& s2, const DpKey& k2, const DpKey& key);

// Key of a walk collection without grip: partition from weak components, walk-end counts.
DpKey key_of(const DpContext& ctx, int first, int last, const PartialSolution& s);

}  // namespace vatsp
