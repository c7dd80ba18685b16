#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vatsp/embedding.hpp"
#include "vatsp/graph.hpp"

namespace vatsp {

// One bag of a vortex path decomposition. `anchor` is the face vertex owning the
// bag, or -1 for bags that belong to no face position (vortex merging).
struct Bag {
    int anchor = -1;
    std::vector<int> members;
};

struct Vortex {
    std::vector<int> face;      // cyclic, in traced direction
    std::vector<int> vertices;  // V(H), includes the face vertices
    std::vector<Bag> bags;      // linear order, one per face position when anchored
};

struct Params {
    int a = 0, g = 0, k = 1, p = 1;
};

// Planar piece (vertices with a rotation entry) + vortices glued on faces + apices.
// Arc classes are derived: arcs touching an apex are apex arcs, arcs along a
// rotation edge are planar, everything else must lie inside one vortex.
struct NearlyEmbeddableInstance {
    Digraph graph;
    std::vector<char> planar;
    Rotation rotation;
    std::vector<Vortex> vortices;
    std::vector<int> apices;
    Params params;

    int num_vertices() const { return graph.num_vertices(); }
    bool is_apex(int v) const;
    bool planar_edge(int u, int v) const;
    // Index of the vortex containing v, or -1.
    int vortex_of(int v) const;
    bool on_face(int v) const;

    enum class ArcKind { Planar, Vortex, Apex };
    ArcKind arc_kind(int arc) const;

    // Largest bag size minus one over all vortices.
    int width() const;
};

// Every violated structural invariant; empty iff valid.
std::vector<std::string> validate(const NearlyEmbeddableInstance& inst);

void write_instance(std::ostream& os, const NearlyEmbeddableInstance& inst);
NearlyEmbeddableInstance read_instance(std::istream& is);
std::string instance_to_string(const NearlyEmbeddableInstance& inst);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vatsp
