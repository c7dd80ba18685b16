#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/rational.hpp"

namespace vatsp {

struct LpOptions {
    int max_rounds = 1000;
};

// Held-Karp LP point: one value per arc of the graph.
struct LpPoint {
    enum class Status { Optimal, Infeasible };
    Status status = Status::Infeasible;
    std::vector<Rational> x;
    Rational objective;
    // Optimum with only conservation and singleton cuts (first master solve).
    Rational degree_only_objective;
    // Every separating cut added, in order of discovery.
    std::vector<CutSide> cuts;
    int rounds = 0;
    bool used_bigint = false;
};

LpPoint solve_lp(const Digraph& g, const LpOptions& opt = {});

Rational lp_objective(const Digraph& g, const std::vector<Rational>& x);
bool flow_conserved(const Digraph& g, const std::vector<Rational>& x);
Rational cut_value(const Digraph& g, const std::vector<Rational>& x, const CutSide& u);

// A cut with x(δ⁺(U)) < 1 found by min r-v and v-r cuts (r = vertex 0), if any.
std::optional<CutSide> separate(const Digraph& g, const std::vector<Rational>& x);
// All distinct violated cuts produced by the same min-cut family.
std::vector<CutSide> separate_all(const Digraph& g, const std::vector<Rational>& x);

// Minimum of x(δ⁺(U)) over every proper nonempty U (n <= kMaxExhaustiveVertices).
struct CutValue {
    Rational value;
    CutSide side;
};
CutValue exhaustive_min_out_cut(const Digraph& g, const std::vector<Rational>& x, bool parallel = true);

// x plus one unit on the cheapest arc of every step of the closed walk w.
std::vector<Rational> augment(const Digraph& g, const std::vector<Rational>& x, const Walk& w);

struct SymZ {
    std::vector<Rational> z;  // indexed by edge of the symmetrization
};
SymZ symmetrize_x(const Symmetrization& s, const std::vector<Rational>& x);

struct ThinOptions {
    int exhaustive_limit = 16;
    int samples = 20000;
    std::uint64_t seed = 1;
    bool parallel = true;
};

// α* = max over cuts of |S ∩ δ(U)| / z(δ(U)). S is a multiset of edge indices.
struct ThinMeasure {
    Rational alpha;
    bool infinite = false;
    bool exhaustive = true;
    CutSide witness;
    std::uint64_t cuts_examined = 0;
    std::string label() const;  // "exhaustive" or "sampled-lower-bound"
};
ThinMeasure measure_thinness(const Ugraph& g, const SymZ& z, const std::vector<int>& sub_edges,
                             const ThinOptions& opt = {});

// Global min cut z(δ(U)); exhaustive for small graphs, Stoer-Wagner otherwise.
// A graph with fewer than two vertices has no cuts and reports infinity.
CutValue min_cut(const Ugraph& g, const SymZ& z, const ThinOptions& opt = {});
CutValue stoer_wagner(const Ugraph& g, const std::vector<Rational>& w);

struct Predicates {
    bool dense = false;
    bool thick = false;
    Rational min_cut;
};
// dense: z(e) >= 1 for every edge of walk_edges; thick: every cut has z-weight >= eps.
Predicates predicates(const Ugraph& g, const SymZ& z, const std::vector<int>& walk_edges, const Rational& eps,
                      const ThinOptions& opt = {});

// Edge indices (with repetition) of the symmetrization traversed by a walk.
std::vector<int> walk_edges(const Symmetrization& s, const Digraph& g, const Walk& w);

// c(S) / objective, the cost side of (α, s)-thinness.
Rational cost_ratio(const Ugraph& g, const std::vector<int>& sub_edges, const Rational& objective);

}  // namespace vatsp
