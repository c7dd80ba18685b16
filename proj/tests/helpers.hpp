#pragma once

#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/heldkarp.hpp"
#include "vatsp/rng.hpp"

namespace testutil {

// Random digraph; each ordered pair gets an arc with probability num/den,
// plus a Hamiltonian cycle when `strong` is set so the graph is strongly connected.
inline vatsp::Digraph random_digraph(vatsp::Rng& rng, int n, int num, int den, int max_cost, bool strong = true) {
    vatsp::Digraph g(n);
    if (strong && n > 1) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        for (int i = 0; i < n; ++i) g.add_arc(perm[i], perm[(i + 1) % n], vatsp::Rational(rng.range(1, max_cost)));
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && rng.chance(num, den)) g.add_arc(u, v, vatsp::Rational(rng.range(1, max_cost)));
    return g;
}

// Complete digraph with metric costs (shortest-path completion of random costs).
inline vatsp::Digraph random_metric(vatsp::Rng& rng, int n, int max_cost) {
    vatsp::Digraph raw = random_digraph(rng, n, 1, 1, max_cost);
    vatsp::MetricClosure d(raw);
    vatsp::Digraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v) g.add_arc(u, v, d.dist(u, v));
    return g;
}

// α* straight from the definition, over all 2^n - 2 cuts.
inline vatsp::Rational brute_ratio(const vatsp::Ugraph& g, const vatsp::SymZ& z, const std::vector<int>& sub) {
    const int n = g.num_vertices();
    vatsp::Rational best(0);
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
        vatsp::CutSide c = vatsp::CutSide::from_mask(m, n);
        vatsp::Rational w(0);
        std::int64_t k = 0;
        for (int e = 0; e < g.num_edges(); ++e)
            if (c.in[g.edge(e).u] != c.in[g.edge(e).v]) w += z.z[e];
        for (int e : sub)
            if (c.in[g.edge(e).u] != c.in[g.edge(e).v]) ++k;
        if (k == 0) continue;
        if (w.is_zero()) return vatsp::Rational::infinity();
        best = vatsp::max(best, vatsp::Rational(k) / w);
    }
    return best;
}

}  // namespace testutil
