#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/heldkarp.hpp"
#include "vatsp/instance.hpp"

namespace vatsp {

struct ThinError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThinCertificate {
    std::vector<int> edges;  // edge indices of the graph the construction ran on
    Rational claimed;        // bound the construction is held to; 0 when none
    ThinMeasure measure;     // measured α*, exhaustive or a sampled lower bound
    int components = 0;      // of the subgraph on every vertex
};

// Number of connected components of (all vertices, edges).
int count_components(const Ugraph& g, const std::vector<int>& edges);
bool is_forest(const Ugraph& g, const std::vector<int>& edges);

// Graph on `vertices` (renumbered in order) keeping the edges with both ends
// inside and keep[e] set; edge_map sends new edges to old ones.
struct SubUgraph {
    Ugraph graph;
    SymZ z;
    std::vector<int> vertex_map;  // new -> old
    std::vector<int> edge_map;    // new -> old
};
SubUgraph induced_subgraph(const Ugraph& g, const SymZ& z, const std::vector<int>& vertices,
                           const std::vector<char>& keep = {});

// Repeatedly splits a part along a cut of weight below `threshold` (deleting the
// crossing edges) until no part has one. Only vertices with active[v] set take
// part; comp[v] = -1 for the others.
struct TinyCutPartition {
    std::vector<int> comp;
    int count = 0;
    std::vector<char> kept;  // per edge: inside one final part
    int splits = 0;
};
TinyCutPartition tiny_cut_partition(const Ugraph& g, const SymZ& z, const Rational& threshold,
                                    const std::vector<char>& active = {}, const ThinOptions& opt = {});

// Spanning tree with small measured α*: best over all trees up to
// exhaustive_limit vertices, edge-exchange descent from a heaviest tree above.
struct PlanarTreeOptions {
    int exhaustive_limit = 10;
    int max_exchanges = 200;
    ThinOptions measure;
};
ThinCertificate planar_thin_tree(const Ugraph& g, const SymZ& z, const PlanarTreeOptions& opt = {});

// Pairwise weights of a contracted graph. Contracting u0 into v0 sets
// w'(u, v0) = w(u, v0) + w(u, u0) and clears u0.
using PairWeights = std::vector<std::vector<Rational>>;
PairWeights pair_weights(const Ugraph& g, const SymZ& z);
PairWeights contract_pair(const PairWeights& w, int u0, int v0);

// Trace of the apex constructions, indexed by component of the tiny-cut partition.
struct ApexTrace {
    TinyCutPartition partition;
    std::vector<std::vector<int>> component_tree;  // edges of T_C
    std::vector<std::vector<int>> f_adj;           // graph of components
    std::vector<Rational> f_max_weight;            // heaviest edge of F at each component
    std::vector<int> order;                        // contraction order
    std::vector<int> parent;                       // -1 when none
    std::vector<int> apex_of;                      // apex index each component went to
    std::vector<char> originally_heavy;
    std::vector<int> link_edge;                    // T' edge added for each component
    int max_contraction_degree = 0;
};

struct ApexOptions {
    PlanarTreeOptions tree;
    ThinOptions measure;
    // Replaces the planar provider on chosen components; receives the
    // component's vertex list and returns edges of g.
    std::function<std::optional<std::vector<int>>(const std::vector<int>&, const std::vector<char>&)> component_tree;
};

struct ApexResult {
    ThinCertificate cert;
    ApexTrace trace;
};

// Spanning tree of a graph whose vertices minus `apex` induce a planar graph.
ApexResult thin_tree_one_apex(const Ugraph& g, int apex, const SymZ& z, const ApexOptions& opt = {});
// Spanning forest with at most |apices| components.
ApexResult thin_forest_a_apex(const Ugraph& g, const std::vector<int>& apices, const SymZ& z,
                              const ApexOptions& opt = {});

// The planar piece of an instance with V(H) contracted to one vertex, as a
// rotation system over edge ids so that parallel edges stay distinct.
struct ContractedPiece {
    int num_vertices = 0;
    int star = -1;                       // the contracted vertex
    std::vector<int> group;              // instance vertex -> piece vertex (-1 for apices)
    std::vector<std::vector<int>> rot;   // per piece vertex: cyclic edge ids
    std::vector<std::pair<int, int>> ends;  // per edge id: piece endpoints
    std::vector<int> original;           // per edge id: symmetrization edge, -1 if none
};
ContractedPiece contract_vortex(const NearlyEmbeddableInstance& inst, const Symmetrization& sym);

struct RibbonStep {
    enum class Kind { Central, Direct, Special };
    Kind kind = Kind::Central;
    int edge = -1;                 // symmetrization edge added to S
    Rational ribbon_weight;
    bool at_star = false;
    // Special steps: face positions of the subpath, loads, component count.
    int q_first = -1, q_last = -1;
    Rational load_w1, load_w2, load_c;
    int w1_components = 0, w2_components = 0;
};

struct RibbonResult {
    std::vector<int> edges;  // S, symmetrization edges
    std::vector<RibbonStep> steps;
};

// Ribbon contraction on the contracted piece, restricted to piece vertices with
// in_scope set and edges with kept set (both default to everything).
RibbonResult ribbon_contraction(const NearlyEmbeddableInstance& inst, const Symmetrization& sym, const SymZ& z,
                                const std::vector<int>& walk_edges, const ContractedPiece& piece,
                                const std::vector<char>& in_scope = {}, const std::vector<char>& kept = {});

struct NearlyThinResult {
    std::vector<int> s_edges;        // S
    std::vector<int> t_edges;        // W ∪ S as a set
    int components = 0;              // of W ∪ S on every vertex
    // S edges meeting V(H): to an apex, to another tiny-cut component, inside C_{v*}.
    std::vector<int> s21, s22, s23;
    ThinMeasure s_measure, t_measure, s23_measure;
    RibbonResult ribbon;
    std::optional<ApexTrace> apex;
};

// Thin subgraph S of G \ H such that W ∪ S spans G, for a one-vortex instance
// (face simple, at most one off-face edge per face vertex) and a closed walk W
// through V(H). z is indexed by edges of symmetrize(inst.graph).
NearlyThinResult thin_subgraph_nearly(const NearlyEmbeddableInstance& inst, const SymZ& z, const Walk& w,
                                      const ThinOptions& measure = {});

}  // namespace vatsp
