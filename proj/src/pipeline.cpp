#include "vatsp/pipeline.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "vatsp/flow.hpp"
#include "vatsp/normalize.hpp"
#include "vatsp/thin.hpp"
#include "vatsp/vortex_dp.hpp"

namespace vatsp {

InvariantBreach::InvariantBreach(int r, const std::string& what)
    : PipelineError("round " + std::to_string(r) + ": " + what), round(r) {}

SymZ initial_weights(const SymZ& z, int n) {
    const std::int64_t nn = static_cast<std::int64_t>(n) * n;
    SymZ out;
    out.z.reserve(z.z.size());
    for (const Rational& v : z.z) out.z.push_back(Rational(3 * (v * Rational(nn)).floor(), nn));
    return out;
}

int thinning_rounds(int n, std::int64_t alpha) {
    if (alpha < 1) throw std::invalid_argument("alpha must be a positive integer");
    return static_cast<int>(static_cast<std::int64_t>(n) * n / alpha);
}

Rational subgraph_cost(const Ugraph& g, const std::vector<int>& edges) {
    Rational c(0);
    for (int e : edges) c += g.edge(e).cost;
    return c;
}

namespace {

ThinRound check_round(int index, const Ugraph& g, const SymZ& z, const std::vector<int>& walk, const ThinOptions& opt) {
    ThinRound r;
    r.index = index;
    r.min_weight = z.z.empty() ? Rational(0) : *std::min_element(z.z.begin(), z.z.end());
    r.nonnegative = !(r.min_weight < Rational(0));
    Predicates p = predicates(g, z, walk, Rational(2), opt);
    r.thick = p.thick;
    r.dense = p.dense;
    r.min_cut = p.min_cut;
    if (!r.nonnegative) throw InvariantBreach(index, "negative weight");
    if (!r.thick) throw InvariantBreach(index, "a cut fell below weight 2");
    if (!r.dense) throw InvariantBreach(index, "a walk edge fell below weight 1");
    return r;
}

}  // namespace

IterateResult iterate_thin(const NearlyEmbeddableInstance& inst, const std::vector<Rational>& x, const Walk& w,
                           const IterateOptions& opt) {
    const Digraph& dg = inst.graph;
    const int n = dg.num_vertices();
    Symmetrization sym = symmetrize(dg);
    const Ugraph& g = sym.graph;
    std::vector<int> wl = w.seq.size() > 1 ? walk_edges(sym, dg, w) : std::vector<int>{};

    IterateResult res;
    res.z = symmetrize_x(sym, augment(dg, x, w));
    res.z0 = initial_weights(res.z, n);
    SymZ zi = res.z0;
    res.history.push_back(check_round(0, g, zi, wl, opt.measure));

    const Rational step(1, static_cast<std::int64_t>(n) * n);
    int m = 1;
    for (int i = 1; i <= m; ++i) {
        NearlyThinResult t = thin_subgraph_nearly(inst, zi, w, opt.measure);
        if (i == 1) {
            if (t.t_measure.infinite) throw PipelineError("first thin subgraph crosses a zero-weight cut");
            res.alpha = std::max<std::int64_t>(1, t.t_measure.alpha.ceil());
            res.rounds = m = thinning_rounds(n, res.alpha);
        }
        for (int e : t.t_edges) zi.z[e] -= step;
        ThinRound r = check_round(i, g, zi, wl, opt.measure);
        r.edges = t.t_edges;
        r.cost = subgraph_cost(g, t.t_edges);
        res.history.push_back(std::move(r));
    }
    res.best = 1;
    for (int i = 2; i < static_cast<int>(res.history.size()); ++i)
        if (res.history[i].cost < res.history[res.best].cost) res.best = i;
    res.best_edges = res.history[res.best].edges;
    res.best_cost = res.history[res.best].cost;
    return res;
}

RoundingResult round_to_walks(const Digraph& g, const std::vector<int>& sub_edges, const std::vector<Rational>& x,
                              const Rational& alpha, const Rational& s_cost) {
    const int n = g.num_vertices();
    Symmetrization sym = symmetrize(g);
    // Cheaper arc of every subgraph edge; lowest arc index on ties.
    std::vector<int> oriented(sym.graph.num_edges(), -1);
    for (int e : sub_edges) {
        const Edge& ed = sym.graph.edge(e);
        int a = g.find_arc(ed.u, ed.v), b = g.find_arc(ed.v, ed.u);
        int pick = a < 0 ? b : (b < 0 ? a : (g.arc(b).cost < g.arc(a).cost || (g.arc(b).cost == g.arc(a).cost && b < a) ? b : a));
        if (pick < 0) throw PipelineError("subgraph edge without an arc");
        oriented[e] = pick;
    }
    std::vector<char> lower(g.num_arcs(), 0);
    for (int e = 0; e < sym.graph.num_edges(); ++e)
        if (oriented[e] >= 0) lower[oriented[e]] = 1;

    std::vector<CircArc> arcs;
    arcs.reserve(g.num_arcs());
    for (int i = 0; i < g.num_arcs(); ++i) {
        const Arc& a = g.arc(i);
        std::int64_t cap = (Rational(2) * alpha * x[i]).ceil();
        arcs.push_back({a.src, a.dst, lower[i], cap + lower[i], a.cost});
    }
    auto flow = min_cost_circulation(n, arcs);
    if (!flow) throw PipelineError("circulation infeasible: the thinness certificate is defective");

    RoundingResult res;
    res.flow = *flow;
    // Weak components of the support, then one Euler walk each.
    std::vector<int> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](int v) {
        while (comp[v] != v) v = comp[v] = comp[comp[v]];
        return v;
    };
    for (int i = 0; i < g.num_arcs(); ++i)
        if (res.flow[i] > 0) comp[find(g.arc(i).src)] = find(g.arc(i).dst);
    std::vector<char> touched(n, 0);
    for (int i = 0; i < g.num_arcs(); ++i)
        if (res.flow[i] > 0) touched[g.arc(i).src] = touched[g.arc(i).dst] = 1;
    std::map<int, Digraph> parts;
    for (int i = 0; i < g.num_arcs(); ++i) {
        if (res.flow[i] == 0) continue;
        int r = find(g.arc(i).src);
        auto it = parts.try_emplace(r, Digraph(n)).first;
        for (std::int64_t k = 0; k < res.flow[i]; ++k) it->second.add_arc(g.arc(i).src, g.arc(i).dst, g.arc(i).cost);
    }
    std::vector<std::pair<int, RoundedWalk>> ordered;
    for (auto& [r, d] : parts) {
        EulerResult eu = euler_closed_walk(d);
        int first = *std::min_element(eu.walk.seq.begin(), eu.walk.seq.end());
        Walk w = rotate_closed(eu.walk, first);
        ordered.push_back({first, {w, walk_arc_cost(g, w)}});
    }
    for (int v = 0; v < n; ++v)
        if (!touched[v]) ordered.push_back({v, {Walk{{v}, true}, Rational(0)}});
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    res.total = Rational(0);
    for (auto& [v, w] : ordered) {
        res.total += w.cost;
        res.walks.push_back(std::move(w));
    }
    Rational obj = lp_objective(g, x);
    res.bound = (Rational(2) * alpha + s_cost) * obj;
    if (res.bound < res.total) throw PipelineError("rounded walks exceed the (2α + s)·objective bound");
    return res;
}

StitchResult stitch(const std::vector<Walk>& walks, const Digraph& g, int guard) {
    if (walks.empty()) throw PipelineError("nothing to stitch");
    StitchResult res;
    res.walks_cost = Rational(0);
    for (const Walk& w : walks) res.walks_cost += walk_arc_cost(g, w);
    for (const Walk& w : walks) res.representatives.push_back(w.seq.front());
    if (walks.size() == 1) {
        res.walk = walks[0];
        res.stitch_cost = Rational(0);
    } else {
        if (static_cast<int>(walks.size()) > guard) throw GuardExceeded("too many walks to stitch");
        MetricClosure d(g);
        OracleResult r = oracle_closed_walk(g, d, res.representatives, guard);
        if (!r.feasible) throw PipelineError("representatives are not mutually reachable");
        res.stitch_cost = r.cost;
        Walk tour = r.walk;
        for (const Walk& w : walks)
            if (w.seq.size() > 1) tour = shortcut(tour, w, w.seq.front());
        res.walk = tour;
    }
    std::vector<char> seen = visited_set(res.walk, g.num_vertices());
    if (std::count(seen.begin(), seen.end(), 0) > 0) throw PipelineError("stitched walk misses a vertex");
    return res;
}

TourResult approximate_atsp(const NearlyEmbeddableInstance& input, const TourOptions& opt) {
    if (input.vortices.size() != 1)
        throw std::invalid_argument("exactly one vortex is supported; merging more would raise the genus");
    if (auto errs = validate(input); !errs.empty()) throw std::invalid_argument("invalid instance: " + errs.front());
    TourResult out;
    NearlyEmbeddableInstance inst = input;
    std::optional<NormalizationCertificate> cert;
    if (!is_facially_normalized(input)) {
        Normalized nz = facially_normalize(input);
        inst = std::move(nz.inst);
        cert = std::move(nz.cert);
        out.normalized = true;
    }
    const Digraph& g = inst.graph;

    LpPoint lp = solve_lp(g);
    if (lp.status != LpPoint::Status::Optimal) throw PipelineError("LP infeasible: graph is not strongly connected");
    out.ledger.push_back({"lp", lp.objective});

    VortexWalkResult vw = optimal_vortex_walk_with_apices(inst);
    if (!vw.feasible) throw PipelineError("no closed walk through the vortex");
    out.ledger.push_back({"vortex-walk", vw.cost});

    IterateOptions io;
    io.measure = opt.measure;
    IterateResult it = iterate_thin(inst, lp.x, vw.walk, io);
    out.thin_rounds = it.rounds;
    Symmetrization sym = symmetrize(g);
    out.certificates.push_back({"thin-subgraph", Rational(0), measure_thinness(sym.graph, it.z0, it.best_edges, opt.measure)});
    out.ledger.push_back({"thin-subgraph", it.best_cost});

    SymZ zx = symmetrize_x(sym, lp.x);
    ThinMeasure against_x = measure_thinness(sym.graph, zx, it.best_edges, opt.measure);
    if (against_x.infinite) throw PipelineError("thin subgraph crosses a cut of zero LP weight");
    out.certificates.push_back({"rounding", Rational(0), against_x});
    out.alpha = against_x.alpha;
    out.s_cost = it.best_cost / lp.objective;

    RoundingResult rr = round_to_walks(g, it.best_edges, lp.x, out.alpha, out.s_cost);
    out.bound = rr.bound;
    out.walks = static_cast<int>(rr.walks.size());
    for (std::size_t i = 0; i < rr.walks.size(); ++i)
        out.ledger.push_back({"walk-" + std::to_string(i + 1), rr.walks[i].cost});

    std::vector<Walk> walks;
    for (const auto& w : rr.walks) walks.push_back(w.walk);
    StitchResult st = stitch(walks, g, opt.oracle_guard);
    out.ledger.push_back({"stitch", st.stitch_cost});
    const Rational chain_cost = st.walks_cost + st.stitch_cost;
    if (walk_arc_cost(g, st.walk) != chain_cost) throw PipelineError("ledger does not add up");

    out.walk = cert ? cert->pull_back(st.walk) : st.walk;
    out.cost = walk_arc_cost(input.graph, out.walk);
    if (cert) {
        LpPoint orig = solve_lp(input.graph);
        out.lp_objective = orig.objective;
    } else {
        out.lp_objective = lp.objective;
    }
    out.ledger.push_back({"total", out.cost});
    if (out.cost < out.lp_objective) throw PipelineError("tour cheaper than the LP bound");

    if (opt.compare_oracle && input.num_vertices() <= opt.oracle_guard) {
        OracleResult best = oracle_atsp(input.graph, opt.oracle_guard);
        if (best.feasible) {
            out.optimum = best.cost;
            out.ratio = out.cost / best.cost;
        }
    }
    return out;
}

}  // namespace vatsp
