#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vatsp/graph.hpp"

namespace vatsp {

struct SearchGuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PathDecomposition {
    std::vector<std::vector<int>> bags;
    int width() const;
};

// Checks that the bags cover `vertices`, every arc of g with both ends in
// `vertices`, and that each vertex occupies a contiguous run of bags.
bool valid_path_decomposition(const Digraph& g, const std::vector<int>& vertices, const PathDecomposition& pd);

// A digraph with external vertices, each a pure source or a pure sink.
struct Gadget {
    Digraph graph;
    std::vector<int> externals, internals;
    int a_in = -1, a_out = -1;
    int b_in = -1, b_out = -1;  // c_in / c_out for H_X
    PathDecomposition internal_pd;
};

// Internal vertices of one H_s copy: v[i][j] for layer i in 0..5, block j in 0..s-1.
struct HsCopy {
    std::vector<std::array<int, 6>> blocks;
};

// Adds the 6s internal vertices and arcs of H_s to g, wired to the given externals.
HsCopy add_hs(Digraph& g, int s, int a_in, int a_out, int b_in, int b_out);
// Bags covering one copy's internals, width 6.
PathDecomposition hs_decomposition(const HsCopy& c);

Gadget build_gadget_Hs(int s);
Gadget build_gadget_HX(const std::vector<std::int64_t>& xs);

// A multiset of (source, sink) pairs, sorted.
using PathType = std::vector<std::pair<int, int>>;

// Every collection of external-to-external paths covering each internal vertex
// exactly once, reported as vertex sequences; the visitor returns true to stop.
// Throws SearchGuardExceeded after `limit` search nodes.
void for_each_path_cover(const Digraph& g, const std::vector<char>& inner, const std::vector<char>& is_source,
                         const std::vector<char>& is_sink,
                         const std::function<bool(const std::vector<std::vector<int>>&)>& visit,
                         std::uint64_t limit = 50'000'000);

std::set<PathType> enumerate_gadget_types(const Gadget& h, std::uint64_t limit = 50'000'000);

}  // namespace vatsp
