#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vatsp/graph.hpp"
#include "vatsp/heldkarp.hpp"
#include "vatsp/instance.hpp"
#include "vatsp/oracle.hpp"

namespace vatsp {

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One round's weights failed a required property.
struct InvariantBreach : PipelineError {
    InvariantBreach(int round, const std::string& what);
    int round;
};

// 3⌊z·n²⌋/n², edgewise.
SymZ initial_weights(const SymZ& z, int n);
// ⌊n²/α⌋ for a positive integer α.
int thinning_rounds(int n, std::int64_t alpha);
// Sum of edge costs over a set of symmetrization edges (cheaper arc of each pair).
Rational subgraph_cost(const Ugraph& g, const std::vector<int>& edges);

struct ThinRound {
    int index = 0;
    std::vector<int> edges;  // T_i (empty for round 0)
    Rational cost;
    Rational min_weight;     // smallest z_i(e)
    Rational min_cut;        // of z_i
    bool nonnegative = false, thick = false, dense = false;
};

struct IterateResult {
    SymZ z;        // symmetrized augmented point
    SymZ z0;
    std::int64_t alpha = 0;  // ⌈α*⌉ of T_1 against z0
    int rounds = 0;          // m
    std::vector<ThinRound> history;  // rounds 0..m
    int best = 0;                    // index into history of the cheapest T_i
    std::vector<int> best_edges;
    Rational best_cost;
};

struct IterateOptions {
    ThinOptions measure;
};

// Requires a one-vortex instance, an LP point x of its graph and a closed walk w
// through the vortex.
IterateResult iterate_thin(const NearlyEmbeddableInstance& inst, const std::vector<Rational>& x, const Walk& w,
                           const IterateOptions& opt = {});

struct RoundedWalk {
    Walk walk;
    Rational cost;
};

struct RoundingResult {
    std::vector<RoundedWalk> walks;
    Rational total;
    Rational bound;  // (2α + s)·objective
    std::vector<std::int64_t> flow;  // per arc of the graph
};

// Circulation rounding of a spanning subgraph (edges of symmetrize(g)) that is
// (alpha, s_cost)-thin against x. Throws PipelineError when the circulation is
// infeasible or the total exceeds the bound.
RoundingResult round_to_walks(const Digraph& g, const std::vector<int>& sub_edges, const std::vector<Rational>& x,
                              const Rational& alpha, const Rational& s_cost);

struct StitchResult {
    Walk walk;
    Rational walks_cost;
    Rational stitch_cost;  // closed tour through the representatives
    std::vector<int> representatives;
};

// Joins closed walks that jointly span g into one closed walk.
StitchResult stitch(const std::vector<Walk>& walks, const Digraph& g, int guard = kOracleGuard);

struct CertificateEntry {
    std::string stage;
    Rational claimed;  // 0 when the stage claims nothing
    ThinMeasure measure;
};

struct LedgerEntry {
    std::string stage;
    Rational cost;
};

struct TourResult {
    Walk walk;
    Rational cost;
    Rational lp_objective;
    std::vector<CertificateEntry> certificates;
    std::vector<LedgerEntry> ledger;
    bool normalized = false;  // the chain ran on a facially normalized copy
    int walks = 0;            // k′
    int thin_rounds = 0;      // m
    Rational alpha, s_cost, bound;
    std::optional<Rational> optimum;  // exact optimum, when requested and within the guard
    std::optional<Rational> ratio;
};

struct TourOptions {
    bool compare_oracle = false;
    int oracle_guard = kOracleGuard;
    ThinOptions measure;
};

TourResult approximate_atsp(const NearlyEmbeddableInstance& inst, const TourOptions& opt = {});

}  // namespace vatsp
