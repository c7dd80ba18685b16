#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vatsp/rational.hpp"

namespace vatsp {

// Exhaustive cut enumeration over integer-weighted graphs. Every kernel has a
// serial reference and an OpenMP version; both return identical results
// (ties broken toward the smallest mask).
struct CutScanGraph {
    int n = 0;
    std::vector<std::pair<int, int>> ends;  // edges (undirected kernels) or arcs (directed kernel)
    std::vector<std::int64_t> weight;
    std::vector<std::int64_t> count;  // multiplicity of the measured subgraph per edge (ratio kernel)
};

struct CutMin {
    std::int64_t value = 0;
    std::uint64_t mask = 0;
};

// Largest count(δ(U)) / weight(δ(U)); weight == 0 with count > 0 is infinite.
struct CutRatio {
    std::int64_t count = 0;
    std::int64_t weight = 1;
    bool infinite = false;
    std::uint64_t mask = 0;
};

// Undirected: masks range over subsets not containing vertex n-1 (each cut once).
CutMin undirected_min_cut_serial(const CutScanGraph& g);
CutMin undirected_min_cut_parallel(const CutScanGraph& g);
CutRatio undirected_max_ratio_serial(const CutScanGraph& g);
CutRatio undirected_max_ratio_parallel(const CutScanGraph& g);
// Directed: min over all nonempty proper U of the weight of arcs leaving U.
CutMin directed_min_out_cut_serial(const CutScanGraph& g);
CutMin directed_min_out_cut_parallel(const CutScanGraph& g);

// Common-denominator scaling: values[i] == out[i] / scale exactly.
struct ScaledValues {
    std::vector<std::int64_t> values;
    std::int64_t scale = 1;
};
ScaledValues scale_to_integers(const std::vector<Rational>& values);

constexpr int kMaxExhaustiveVertices = 24;

}  // namespace vatsp
