#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/instance.hpp"

namespace vatsp {

// Maps vertices of a transformed instance back to the original one.
struct NormalizationCertificate {
    std::vector<int> new_to_old;
    std::vector<int> old_to_new;  // representative of every original vertex
    int width_before = 0;
    int width_after = 0;
    bool width_overflow = false;  // the transform had to widen the decomposition

    // Maps every vertex and drops the steps that collapse onto one vertex.
    Walk pull_back(const Walk& w) const;
    std::vector<int> pull_back_set(const std::vector<int>& vs) const;
};

NormalizationCertificate compose(const NormalizationCertificate& first, const NormalizationCertificate& second);

struct Normalized {
    NearlyEmbeddableInstance inst;
    NormalizationCertificate cert;
};

struct TransformError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Face is a simple cycle and every face vertex has at most one planar edge off the face.
bool is_facially_normalized(const NearlyEmbeddableInstance& inst);
// Largest planar degree among planar vertices on no face.
int max_offface_degree(const NearlyEmbeddableInstance& inst);

Normalized facially_normalize(const NearlyEmbeddableInstance& inst);
// Off-face planar vertices of degree > 4 become trees of zero-cost edges; with
// expand_grids every off-face planar vertex then becomes a (3n^2)x(3n^2) grid.
Normalized cross_normalize(const NearlyEmbeddableInstance& inst, bool expand_grids = false);

struct MergedVortices {
    NearlyEmbeddableInstance inst;
    // Per consecutive vortex pair: the four linked vertices (z, z', w, w').
    std::vector<std::array<int, 4>> links;
};
MergedVortices merge_vortices(const NearlyEmbeddableInstance& inst);

}  // namespace vatsp
