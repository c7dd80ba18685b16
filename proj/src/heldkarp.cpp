#include "vatsp/heldkarp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "vatsp/cutscan.hpp"
#include "vatsp/flow.hpp"
#include "vatsp/rng.hpp"
#include "vatsp/simplex.hpp"

namespace vatsp {

Rational lp_objective(const Digraph& g, const std::vector<Rational>& x) {
    Rational s(0);
    for (int a = 0; a < g.num_arcs(); ++a)
        if (!x[a].is_zero()) s += g.arc(a).cost * x[a];
    return s;
}

bool flow_conserved(const Digraph& g, const std::vector<Rational>& x) {
    std::vector<Rational> bal(g.num_vertices(), Rational(0));
    for (int a = 0; a < g.num_arcs(); ++a) {
        bal[g.arc(a).src] += x[a];
        bal[g.arc(a).dst] -= x[a];
    }
    return std::all_of(bal.begin(), bal.end(), [](const Rational& r) { return r.is_zero(); });
}

Rational cut_value(const Digraph& g, const std::vector<Rational>& x, const CutSide& u) {
    Rational s(0);
    for (int a : cut_arcs(g, u, CutMode::Out)) s += x[a];
    return s;
}

namespace {

FlowNetwork capacity_network(const Digraph& g, const std::vector<Rational>& x) {
    FlowNetwork net(g.num_vertices());
    for (int a = 0; a < g.num_arcs(); ++a)
        if (Rational(0) < x[a]) net.add_edge(g.arc(a).src, g.arc(a).dst, x[a]);
    return net;
}

template <class Visit>
void scan_root_cuts(const Digraph& g, const std::vector<Rational>& x, Visit&& visit) {
    const int n = g.num_vertices();
    const int r = 0;
    for (int v = 1; v < n; ++v) {
        for (int dir = 0; dir < 2; ++dir) {
            int s = dir == 0 ? r : v, t = dir == 0 ? v : r;
            FlowNetwork net = capacity_network(g, x);
            if (net.max_flow(s, t) < Rational(1)) {
                CutSide side;
                side.in = net.source_side(s);
                if (!visit(side)) return;
            }
        }
    }
}

}  // namespace

std::optional<CutSide> separate(const Digraph& g, const std::vector<Rational>& x) {
    std::optional<CutSide> found;
    scan_root_cuts(g, x, [&](const CutSide& c) {
        found = c;
        return false;
    });
    return found;
}

std::vector<CutSide> separate_all(const Digraph& g, const std::vector<Rational>& x) {
    std::vector<CutSide> out;
    std::set<std::vector<char>> seen;
    scan_root_cuts(g, x, [&](const CutSide& c) {
        if (seen.insert(c.in).second) out.push_back(c);
        return true;
    });
    return out;
}

LpPoint solve_lp(const Digraph& g, const LpOptions& opt) {
    LpPoint pt;
    const int n = g.num_vertices();
    const int m = g.num_arcs();
    pt.x.assign(m, Rational(0));
    if (n <= 1) {
        pt.status = LpPoint::Status::Optimal;
        return pt;
    }
    if (!g.strongly_connected()) return pt;

    LpProblem lp;
    lp.num_vars = m;
    for (const Arc& a : g.arcs()) lp.cost.push_back(a.cost);
    for (int v = 0; v < n; ++v) {
        LpProblem::Row bal;
        bal.sense = LpProblem::Sense::Eq;
        bal.rhs = Rational(0);
        for (int a : g.out_arcs(v)) bal.coef.push_back({a, Rational(1)});
        for (int a : g.in_arcs(v)) bal.coef.push_back({a, Rational(-1)});
        lp.rows.push_back(std::move(bal));
        LpProblem::Row deg;
        deg.sense = LpProblem::Sense::Ge;
        deg.rhs = Rational(1);
        for (int a : g.out_arcs(v)) deg.coef.push_back({a, Rational(1)});
        lp.rows.push_back(std::move(deg));
    }
    for (int round = 0; round < opt.max_rounds; ++round) {
        LpSolution sol = solve_simplex(lp);
        pt.used_bigint = pt.used_bigint || sol.used_bigint;
        pt.rounds = round + 1;
        if (sol.status != LpSolution::Status::Optimal) return pt;
        if (round == 0) pt.degree_only_objective = sol.objective;
        pt.x = sol.x;
        pt.objective = sol.objective;
        std::vector<CutSide> cuts = separate_all(g, pt.x);
        if (cuts.empty()) {
            pt.status = LpPoint::Status::Optimal;
            return pt;
        }
        for (CutSide& c : cuts) {
            LpProblem::Row row;
            row.sense = LpProblem::Sense::Ge;
            row.rhs = Rational(1);
            for (int a : cut_arcs(g, c, CutMode::Out)) row.coef.push_back({a, Rational(1)});
            lp.rows.push_back(std::move(row));
            pt.cuts.push_back(std::move(c));
        }
    }
    throw std::runtime_error("cutting-plane loop did not converge");
}

CutValue exhaustive_min_out_cut(const Digraph& g, const std::vector<Rational>& x, bool parallel) {
    ScaledValues s = scale_to_integers(x);
    CutScanGraph cg;
    cg.n = g.num_vertices();
    for (int a = 0; a < g.num_arcs(); ++a) {
        if (s.values[a] == 0) continue;
        cg.ends.push_back({g.arc(a).src, g.arc(a).dst});
        cg.weight.push_back(s.values[a]);
    }
    CutMin r = parallel ? directed_min_out_cut_parallel(cg) : directed_min_out_cut_serial(cg);
    return {Rational(r.value, s.scale), CutSide::from_mask(r.mask, cg.n)};
}

std::vector<Rational> augment(const Digraph& g, const std::vector<Rational>& x, const Walk& w) {
    std::vector<Rational> out = x;
    for (int i = 0; i + 1 < static_cast<int>(w.seq.size()); ++i) {
        int a = g.find_arc(w.seq[i], w.seq[i + 1]);
        if (a < 0) throw std::invalid_argument("walk step is not an arc");
        out[a] += Rational(1);
    }
    return out;
}

SymZ symmetrize_x(const Symmetrization& s, const std::vector<Rational>& x) {
    SymZ z;
    z.z.assign(s.graph.num_edges(), Rational(0));
    for (std::size_t a = 0; a < x.size(); ++a) z.z[s.arc_to_edge[a]] += x[a];
    return z;
}

std::string ThinMeasure::label() const { return exhaustive ? "exhaustive" : "sampled-lower-bound"; }

namespace {

CutScanGraph scan_graph(const Ugraph& g, const ScaledValues& s, const std::vector<int>& sub_edges) {
    CutScanGraph cg;
    cg.n = g.num_vertices();
    std::vector<std::int64_t> cnt(g.num_edges(), 0);
    for (int e : sub_edges) ++cnt[e];
    for (int e = 0; e < g.num_edges(); ++e) {
        if (s.values[e] == 0 && cnt[e] == 0) continue;
        cg.ends.push_back({g.edge(e).u, g.edge(e).v});
        cg.weight.push_back(s.values[e]);
        cg.count.push_back(cnt[e]);
    }
    return cg;
}

// Counts and weights of one cut, exactly.
std::pair<std::int64_t, Rational> cut_stats(const Ugraph& g, const SymZ& z, const std::vector<std::int64_t>& cnt,
                                            const std::vector<char>& in) {
    std::int64_t c = 0;
    Rational w(0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        if (in[ed.u] == in[ed.v]) continue;
        c += cnt[e];
        w += z.z[e];
    }
    return {c, w};
}

}  // namespace

ThinMeasure measure_thinness(const Ugraph& g, const SymZ& z, const std::vector<int>& sub_edges,
                             const ThinOptions& opt) {
    ThinMeasure m;
    m.alpha = Rational(0);
    const int n = g.num_vertices();
    if (n < 2) return m;
    if (n <= std::min(opt.exhaustive_limit, kMaxExhaustiveVertices)) {
        ScaledValues s = scale_to_integers(z.z);
        CutScanGraph cg = scan_graph(g, s, sub_edges);
        CutRatio r = opt.parallel ? undirected_max_ratio_parallel(cg) : undirected_max_ratio_serial(cg);
        m.exhaustive = true;
        m.cuts_examined = (std::uint64_t{1} << (n - 1)) - 1;
        m.witness = CutSide::from_mask(r.mask, n);
        m.infinite = r.infinite;
        if (r.infinite)
            m.alpha = Rational::infinity();
        else
            m.alpha = Rational(r.count) * Rational(s.scale) / Rational(r.weight);
        return m;
    }
    // Sampled lower bound: singletons, BFS balls, then uniform random cuts.
    m.exhaustive = false;
    std::vector<std::int64_t> cnt(g.num_edges(), 0);
    for (int e : sub_edges) ++cnt[e];
    bool have = false;
    auto offer = [&](const std::vector<char>& in) {
        int k = 0;
        for (char c : in) k += c;
        if (k == 0 || k == n) return;
        ++m.cuts_examined;
        auto [c, w] = cut_stats(g, z, cnt, in);
        bool inf = w.is_zero() && c > 0;
        Rational ratio = inf ? Rational::infinity() : (w.is_zero() ? Rational(0) : Rational(c) / w);
        if (!have || m.alpha < ratio) {
            have = true;
            m.alpha = ratio;
            m.infinite = inf;
            m.witness.in = in;
        }
    };
    for (int v = 0; v < n; ++v) {
        std::vector<char> in(n, 0);
        in[v] = 1;
        offer(in);
        // Growing BFS ball around v.
        std::vector<int> order{v};
        for (std::size_t h = 0; h < order.size(); ++h)
            for (int e : g.incident(order[h])) {
                int w = g.edge(e).other(order[h]);
                if (!in[w]) {
                    in[w] = 1;
                    order.push_back(w);
                }
            }
        std::vector<char> ball(n, 0);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            ball[order[k]] = 1;
            offer(ball);
        }
    }
    Rng rng(opt.seed);
    for (int i = 0; i < opt.samples; ++i) {
        std::vector<char> in(n);
        for (int v = 0; v < n; ++v) in[v] = static_cast<char>(rng.below(2));
        offer(in);
    }
    return m;
}

CutValue stoer_wagner(const Ugraph& g, const std::vector<Rational>& w) {
    const int n = g.num_vertices();
    CutValue best{Rational::infinity(), {}};
    if (n < 2) return best;
    std::vector<std::vector<Rational>> adj(n, std::vector<Rational>(n, Rational(0)));
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        if (ed.u == ed.v) continue;
        adj[ed.u][ed.v] += w[e];
        adj[ed.v][ed.u] += w[e];
    }
    std::vector<std::vector<int>> members(n);
    for (int v = 0; v < n; ++v) members[v] = {v};
    std::vector<int> alive(n);
    for (int v = 0; v < n; ++v) alive[v] = v;
    while (alive.size() > 1) {
        std::vector<Rational> conn(n, Rational(0));
        std::vector<char> added(n, 0);
        int prev = -1, last = -1;
        for (std::size_t step = 0; step < alive.size(); ++step) {
            int pick = -1;
            for (int v : alive)
                if (!added[v] && (pick < 0 || conn[pick] < conn[v])) pick = v;
            if (pick < 0) break;
            added[pick] = 1;
            prev = last;
            last = pick;
            for (int v : alive)
                if (!added[v]) conn[v] += adj[pick][v];
        }
        Rational phase(0);
        for (int v : alive)
            if (v != last) phase += adj[last][v];
        if (phase < best.value) {
            best.value = phase;
            best.side.in.assign(n, 0);
            for (int v : members[last]) best.side.in[v] = 1;
        }
        for (int v : alive) {
            adj[prev][v] += adj[last][v];
            adj[v][prev] = adj[prev][v];
        }
        adj[prev][prev] = Rational(0);
        members[prev].insert(members[prev].end(), members[last].begin(), members[last].end());
        alive.erase(std::find(alive.begin(), alive.end(), last));
    }
    return best;
}

CutValue min_cut(const Ugraph& g, const SymZ& z, const ThinOptions& opt) {
    const int n = g.num_vertices();
    if (n < 2) return {Rational::infinity(), {}};
    if (n <= std::min(opt.exhaustive_limit, kMaxExhaustiveVertices)) {
        ScaledValues s = scale_to_integers(z.z);
        CutScanGraph cg = scan_graph(g, s, {});
        CutMin r = opt.parallel ? undirected_min_cut_parallel(cg) : undirected_min_cut_serial(cg);
        return {Rational(r.value, s.scale), CutSide::from_mask(r.mask, n)};
    }
    return stoer_wagner(g, z.z);
}

Predicates predicates(const Ugraph& g, const SymZ& z, const std::vector<int>& walk_edges, const Rational& eps,
                      const ThinOptions& opt) {
    Predicates p;
    p.dense = std::all_of(walk_edges.begin(), walk_edges.end(), [&](int e) { return !(z.z[e] < Rational(1)); });
    p.min_cut = min_cut(g, z, opt).value;
    p.thick = !(p.min_cut < eps);
    return p;
}

std::vector<int> walk_edges(const Symmetrization& s, const Digraph& g, const Walk& w) {
    std::vector<int> out;
    for (int i = 0; i + 1 < static_cast<int>(w.seq.size()); ++i) {
        int a = g.find_arc(w.seq[i], w.seq[i + 1]);
        if (a < 0) throw std::invalid_argument("walk step is not an arc");
        out.push_back(s.arc_to_edge[a]);
    }
    return out;
}

Rational cost_ratio(const Ugraph& g, const std::vector<int>& sub_edges, const Rational& objective) {
    Rational c(0);
    for (int e : sub_edges) c += g.edge(e).cost;
    if (objective.is_zero()) return c.is_zero() ? Rational(0) : Rational::infinity();
    return c / objective;
}

}  // namespace vatsp
