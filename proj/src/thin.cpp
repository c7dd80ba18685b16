#include "vatsp/thin.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "vatsp/cutscan.hpp"

namespace vatsp {

namespace {

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        p[b] = a;
        return true;
    }
};

// Component label per vertex of the edge set, numbered by smallest vertex.
std::vector<int> component_labels(int n, const std::vector<std::pair<int, int>>& ends, const std::vector<int>& edges,
                                  int* count = nullptr) {
    Dsu d(n);
    for (int e : edges) d.unite(ends[e].first, ends[e].second);
    std::vector<int> lab(n, -1), root_lab(n, -1);
    int c = 0;
    for (int v = 0; v < n; ++v) {
        int r = d.find(v);
        if (root_lab[r] < 0) root_lab[r] = c++;
        lab[v] = root_lab[r];
    }
    if (count) *count = c;
    return lab;
}

std::vector<std::pair<int, int>> ends_of(const Ugraph& g) {
    std::vector<std::pair<int, int>> out;
    out.reserve(g.num_edges());
    for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
    return out;
}

std::vector<int> dedup(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Heaviest edge (lowest index on ties) among candidates, or -1.
int heaviest(const SymZ& z, const std::vector<int>& cand) {
    int best = -1;
    for (int e : cand)
        if (best < 0 || z.z[best] < z.z[e] || (z.z[best] == z.z[e] && e < best)) best = e;
    return best;
}

// Edge of an ordered run with at least half the run weight on each side
// (itself included on both); lowest edge id among those.
int central_edge(const SymZ& z, const std::vector<int>& run) {
    Rational total(0);
    for (int e : run) total += z.z[e];
    Rational half = total / Rational(2);
    Rational prefix(0);
    int best = -1;
    for (int e : run) {
        Rational before = prefix;
        prefix += z.z[e];
        Rational suffix = total - before;
        if (!(prefix < half) && !(suffix < half) && (best < 0 || e < best)) best = e;
    }
    return best;
}

Rational scaled_min_cut_factor(const Ugraph& g, const SymZ& z, const ThinOptions& opt) {
    Rational beta = min_cut(g, z, opt).value;
    if (beta.is_inf() || !(beta < Rational(2))) return Rational(1);
    if (beta.is_zero()) throw ThinError("weights are not thick: some cut has zero weight");
    return Rational(2) / beta;
}

// Exact α* of a tree against precomputed cut weights, on masks over n-1 bits.
struct CutTable {
    int n = 0;
    std::vector<std::int64_t> weight;  // per mask
    std::vector<std::vector<std::uint32_t>> crossing;  // per edge: masks it crosses
};

CutTable cut_table(const Ugraph& g, const SymZ& z) {
    CutTable t;
    t.n = g.num_vertices();
    ScaledValues s = scale_to_integers(z.z);
    const std::uint32_t masks = 1u << (t.n - 1);
    t.weight.assign(masks, 0);
    t.crossing.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        for (std::uint32_t m = 1; m < masks; ++m) {
            bool a = ed.u < t.n - 1 && ((m >> ed.u) & 1u);
            bool b = ed.v < t.n - 1 && ((m >> ed.v) & 1u);
            if (a != b) {
                t.weight[m] += s.values[e];
                t.crossing[e].push_back(m);
            }
        }
    }
    return t;
}

// Searches all spanning trees for one with α* below the bound (num/den),
// branching on edges in the given order.
class TreeSearch {
public:
    TreeSearch(const Ugraph& g, const CutTable& t, std::vector<int> order, std::int64_t num, std::int64_t den)
        : g_(g), t_(t), order_(std::move(order)), num_(num), den_(den), count_(t.weight.size(), 0) {}

    bool run(std::vector<int>& best, std::int64_t& num, std::int64_t& den, long node_limit) {
        limit_ = node_limit;
        std::vector<int> dsu(g_.num_vertices());
        std::iota(dsu.begin(), dsu.end(), 0);
        chosen_.clear();
        found_ = false;
        recurse(0, dsu);
        if (found_) {
            best = best_;
            num = num_;
            den = den_;
        }
        return !aborted_;
    }

private:
    static int find(std::vector<int>& d, int x) {
        while (d[x] != x) x = d[x] = d[d[x]];
        return x;
    }

    bool connectable(std::size_t from) const {
        std::vector<int> d(g_.num_vertices());
        std::iota(d.begin(), d.end(), 0);
        int comps = g_.num_vertices();
        auto join = [&](int e) {
            int a = find(d, g_.edge(e).u), b = find(d, g_.edge(e).v);
            if (a != b) {
                d[b] = a;
                --comps;
            }
        };
        for (int e : chosen_) join(e);
        for (std::size_t i = from; i < order_.size(); ++i) join(order_[i]);
        return comps == 1;
    }

    void recurse(std::size_t idx, std::vector<int> dsu) {
        if (aborted_) return;
        if (--limit_ < 0) {
            aborted_ = true;
            return;
        }
        if (static_cast<int>(chosen_.size()) == g_.num_vertices() - 1) {
            // Exact ratio of this tree.
            std::int64_t bn = 0, bd = 1;
            for (std::size_t m = 1; m < count_.size(); ++m) {
                if (count_[m] == 0) continue;
                if (bn * t_.weight[m] < count_[m] * bd) {
                    bn = count_[m];
                    bd = t_.weight[m];
                }
            }
            if (bn * den_ < num_ * bd) {
                num_ = bn;
                den_ = bd;
                best_ = chosen_;
                found_ = true;
            }
            return;
        }
        if (idx >= order_.size()) return;
        const int e = order_[idx];
        int a = find(dsu, g_.edge(e).u), b = find(dsu, g_.edge(e).v);
        if (a != b) {
            bool ok = true;
            for (std::uint32_t m : t_.crossing[e]) {
                ++count_[m];
                // Prune once some cut reaches the incumbent ratio.
                if (count_[m] * den_ >= num_ * t_.weight[m]) ok = false;
            }
            if (ok) {
                std::vector<int> d2 = dsu;
                d2[b] = a;
                chosen_.push_back(e);
                recurse(idx + 1, std::move(d2));
                chosen_.pop_back();
            }
            for (std::uint32_t m : t_.crossing[e]) --count_[m];
        }
        if (connectable(idx + 1)) recurse(idx + 1, std::move(dsu));
    }

    const Ugraph& g_;
    const CutTable& t_;
    std::vector<int> order_;
    std::int64_t num_, den_;
    std::vector<std::int64_t> count_;
    std::vector<int> chosen_, best_;
    bool found_ = false, aborted_ = false;
    long limit_ = 0;
};

std::vector<int> heaviest_tree(const Ugraph& g, const SymZ& z) {
    std::vector<int> order(g.num_edges());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z.z[b] < z.z[a]; });
    Dsu d(g.num_vertices());
    std::vector<int> tree;
    for (int e : order)
        if (g.edge(e).u != g.edge(e).v && d.unite(g.edge(e).u, g.edge(e).v)) tree.push_back(e);
    return tree;
}

std::vector<int> exchange_descent(const Ugraph& g, const SymZ& z, std::vector<int> tree, const PlanarTreeOptions& opt) {
    ThinMeasure cur = measure_thinness(g, z, tree, opt.measure);
    for (int round = 0; round < opt.max_exchanges; ++round) {
        std::vector<char> in_tree(g.num_edges(), 0);
        for (int e : tree) in_tree[e] = 1;
        const auto& side = cur.witness.in;
        bool improved = false;
        ThinMeasure best = cur;
        std::vector<int> best_tree;
        for (std::size_t i = 0; i < tree.size(); ++i) {
            const Edge& te = g.edge(tree[i]);
            if (side.empty() || side[te.u] == side[te.v]) continue;
            // Components of the tree without edge i.
            Dsu d(g.num_vertices());
            for (std::size_t j = 0; j < tree.size(); ++j)
                if (j != i) d.unite(g.edge(tree[j]).u, g.edge(tree[j]).v);
            for (int f = 0; f < g.num_edges(); ++f) {
                if (in_tree[f]) continue;
                const Edge& fe = g.edge(f);
                if (d.find(fe.u) == d.find(fe.v)) continue;
                std::vector<int> cand = tree;
                cand[i] = f;
                ThinMeasure m = measure_thinness(g, z, cand, opt.measure);
                if (m.alpha < best.alpha) {
                    best = m;
                    best_tree = cand;
                    improved = true;
                }
            }
        }
        if (!improved) break;
        tree = best_tree;
        cur = best;
    }
    return tree;
}

}  // namespace

int count_components(const Ugraph& g, const std::vector<int>& edges) {
    int c = 0;
    component_labels(g.num_vertices(), ends_of(g), edges, &c);
    return c;
}

bool is_forest(const Ugraph& g, const std::vector<int>& edges) {
    Dsu d(g.num_vertices());
    for (int e : edges)
        if (!d.unite(g.edge(e).u, g.edge(e).v)) return false;
    return true;
}

SubUgraph induced_subgraph(const Ugraph& g, const SymZ& z, const std::vector<int>& vertices,
                           const std::vector<char>& keep) {
    SubUgraph s;
    std::vector<int> id(g.num_vertices(), -1);
    for (int v : vertices) {
        id[v] = static_cast<int>(s.vertex_map.size());
        s.vertex_map.push_back(v);
    }
    s.graph = Ugraph(static_cast<int>(vertices.size()));
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        if (id[ed.u] < 0 || id[ed.v] < 0 || ed.u == ed.v) continue;
        if (!keep.empty() && !keep[e]) continue;
        s.graph.add_edge(id[ed.u], id[ed.v], ed.cost);
        s.z.z.push_back(z.z[e]);
        s.edge_map.push_back(e);
    }
    return s;
}

TinyCutPartition tiny_cut_partition(const Ugraph& g, const SymZ& z, const Rational& threshold,
                                    const std::vector<char>& active_in, const ThinOptions& opt) {
    const int n = g.num_vertices();
    std::vector<char> active = active_in.empty() ? std::vector<char>(n, 1) : active_in;
    TinyCutPartition out;
    out.kept.assign(g.num_edges(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        out.kept[e] = active[ed.u] && active[ed.v] && ed.u != ed.v;
    }
    auto ends = ends_of(g);
    for (;;) {
        std::vector<int> kept_list;
        for (int e = 0; e < g.num_edges(); ++e)
            if (out.kept[e]) kept_list.push_back(e);
        auto lab = component_labels(n, ends, kept_list);
        std::map<int, std::vector<int>> parts;
        for (int v = 0; v < n; ++v)
            if (active[v]) parts[lab[v]].push_back(v);
        bool split = false;
        for (const auto& [id, verts] : parts) {
            if (verts.size() < 2) continue;
            SubUgraph s = induced_subgraph(g, z, verts, out.kept);
            CutValue cut = min_cut(s.graph, s.z, opt);
            if (!(cut.value < threshold)) continue;
            for (int e = 0; e < s.graph.num_edges(); ++e) {
                const Edge& ed = s.graph.edge(e);
                if (cut.side.in[ed.u] != cut.side.in[ed.v]) out.kept[s.edge_map[e]] = 0;
            }
            ++out.splits;
            split = true;
            break;
        }
        if (split) continue;
        out.comp.assign(n, -1);
        std::map<int, int> renum;
        for (int v = 0; v < n; ++v) {
            if (!active[v]) continue;
            auto it = renum.try_emplace(lab[v], static_cast<int>(renum.size())).first;
            out.comp[v] = it->second;
        }
        out.count = static_cast<int>(renum.size());
        return out;
    }
}

ThinCertificate planar_thin_tree(const Ugraph& g, const SymZ& z, const PlanarTreeOptions& opt) {
    const int n = g.num_vertices();
    ThinCertificate cert;
    if (n > 0 && count_components(g, {}) > 1) {
        std::vector<int> all(g.num_edges());
        std::iota(all.begin(), all.end(), 0);
        if (count_components(g, all) > 1) throw ThinError("planar tree: graph is disconnected");
    }
    std::vector<int> tree = n > 1 ? heaviest_tree(g, z) : std::vector<int>{};
    if (n > 1) {
        tree = exchange_descent(g, z, tree, opt);
        if (n <= opt.exhaustive_limit && n <= 20) {
            ThinMeasure start = measure_thinness(g, z, tree, opt.measure);
            if (!start.infinite && start.alpha > Rational(0)) {
                CutTable t = cut_table(g, z);
                ScaledValues s = scale_to_integers(z.z);
                // Incumbent ratio in the table's integer scale.
                Rational r = start.alpha / Rational(s.scale);
                std::vector<int> order(g.num_edges());
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z.z[b] < z.z[a]; });
                TreeSearch search(g, t, order, r.num(), r.den());
                std::vector<int> best;
                std::int64_t num = 0, den = 1;
                search.run(best, num, den, 5'000'000);
                if (!best.empty()) tree = best;
            }
        }
    }
    cert.edges = tree;
    cert.measure = measure_thinness(g, z, tree, opt.measure);
    cert.components = count_components(g, tree);
    return cert;
}

PairWeights pair_weights(const Ugraph& g, const SymZ& z) {
    const int n = g.num_vertices();
    PairWeights w(n, std::vector<Rational>(n, Rational(0)));
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        if (ed.u == ed.v) continue;
        w[ed.u][ed.v] += z.z[e];
        w[ed.v][ed.u] += z.z[e];
    }
    return w;
}

PairWeights contract_pair(const PairWeights& w, int u0, int v0) {
    PairWeights out = w;
    const int n = static_cast<int>(w.size());
    for (int u = 0; u < n; ++u) {
        if (u == u0 || u == v0) continue;
        out[u][v0] = w[u][v0] + w[u][u0];
        out[v0][u] = out[u][v0];
    }
    for (int u = 0; u < n; ++u) out[u][u0] = out[u0][u] = Rational(0);
    out[v0][v0] = Rational(0);
    return out;
}

namespace {

// Phases shared by the apex constructions: tiny-cut partition of the apex-free
// part, a tree per part and the graph of components.
struct ComponentStage {
    ApexTrace trace;
    std::vector<std::vector<int>> members;
    std::vector<std::map<int, Rational>> f_weight;     // component -> neighbour -> z
    std::vector<std::map<int, std::vector<int>>> f_edges;
    std::vector<std::vector<Rational>> apex_weight;     // component x apex index
    std::vector<std::vector<std::vector<int>>> apex_edges;
};

ComponentStage component_stage(const Ugraph& g, const std::vector<int>& apices, const SymZ& zc,
                               const Rational& threshold, const ApexOptions& opt) {
    const int n = g.num_vertices();
    std::vector<int> apex_index(n, -1);
    for (std::size_t i = 0; i < apices.size(); ++i) apex_index[apices[i]] = static_cast<int>(i);
    std::vector<char> active(n, 0);
    for (int v = 0; v < n; ++v) active[v] = apex_index[v] < 0;

    ComponentStage st;
    ApexTrace& tr = st.trace;
    tr.partition = tiny_cut_partition(g, zc, threshold, active, opt.measure);
    const int k = tr.partition.count;
    st.members.assign(k, {});
    for (int v = 0; v < n; ++v)
        if (tr.partition.comp[v] >= 0) st.members[tr.partition.comp[v]].push_back(v);

    tr.component_tree.assign(k, {});
    for (int c = 0; c < k; ++c) {
        std::optional<std::vector<int>> custom;
        if (opt.component_tree) custom = opt.component_tree(st.members[c], tr.partition.kept);
        if (custom) {
            tr.component_tree[c] = *custom;
            continue;
        }
        SubUgraph s = induced_subgraph(g, zc, st.members[c], tr.partition.kept);
        ThinCertificate t = planar_thin_tree(s.graph, s.z, opt.tree);
        for (int e : t.edges) tr.component_tree[c].push_back(s.edge_map[e]);
    }

    st.f_weight.assign(k, {});
    st.f_edges.assign(k, {});
    st.apex_weight.assign(k, std::vector<Rational>(apices.size(), Rational(0)));
    st.apex_edges.assign(k, std::vector<std::vector<int>>(apices.size()));
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        if (ed.u == ed.v) continue;
        int cu = tr.partition.comp[ed.u], cv = tr.partition.comp[ed.v];
        if (cu >= 0 && cv >= 0 && cu != cv) {
            st.f_weight[cu][cv] += zc.z[e];
            st.f_weight[cv][cu] += zc.z[e];
            st.f_edges[cu][cv].push_back(e);
            st.f_edges[cv][cu].push_back(e);
        } else if (cu >= 0 && apex_index[ed.v] >= 0) {
            st.apex_weight[cu][apex_index[ed.v]] += zc.z[e];
            st.apex_edges[cu][apex_index[ed.v]].push_back(e);
        } else if (cv >= 0 && apex_index[ed.u] >= 0) {
            st.apex_weight[cv][apex_index[ed.u]] += zc.z[e];
            st.apex_edges[cv][apex_index[ed.u]].push_back(e);
        }
    }
    tr.f_adj.assign(k, {});
    tr.f_max_weight.assign(k, Rational(0));
    for (int c = 0; c < k; ++c)
        for (const auto& [d, w] : st.f_weight[c]) {
            tr.f_adj[c].push_back(d);
            if (tr.f_max_weight[c] < w) tr.f_max_weight[c] = w;
        }
    tr.parent.assign(k, -1);
    tr.apex_of.assign(k, -1);
    tr.originally_heavy.assign(k, 0);
    tr.link_edge.assign(k, -1);
    return st;
}

// Remaining component of least degree, lowest id on ties.
int min_degree(const std::vector<char>& alive, const std::vector<int>& deg) {
    int best = -1;
    for (int c = 0; c < static_cast<int>(alive.size()); ++c)
        if (alive[c] && (best < 0 || deg[c] < deg[best])) best = c;
    return best;
}

ApexResult finish(const Ugraph& g, const SymZ& z, ApexTrace trace, const Rational& claimed, const ApexOptions& opt) {
    ApexResult res;
    std::vector<int> edges;
    for (const auto& t : trace.component_tree) edges.insert(edges.end(), t.begin(), t.end());
    for (int e : trace.link_edge)
        if (e >= 0) edges.push_back(e);
    std::sort(edges.begin(), edges.end());
    res.cert.edges = edges;
    res.cert.claimed = claimed;
    res.cert.measure = measure_thinness(g, z, edges, opt.measure);
    res.cert.components = count_components(g, edges);
    res.trace = std::move(trace);
    return res;
}

}  // namespace

ApexResult thin_tree_one_apex(const Ugraph& g, int apex, const SymZ& z, const ApexOptions& opt) {
    if (apex < 0 || apex >= g.num_vertices()) throw std::invalid_argument("apex out of range");
    // Constructions assume 2-thick weights; thinner ones are scaled up.
    Rational factor = scaled_min_cut_factor(g, z, opt.measure);
    SymZ zc = z;
    for (auto& v : zc.z) v *= factor;
    ComponentStage st = component_stage(g, {apex}, zc, Rational(1, 10), opt);
    ApexTrace& tr = st.trace;
    const int k = tr.partition.count;

    std::vector<int> deg(k);
    for (int c = 0; c < k; ++c) {
        deg[c] = static_cast<int>(tr.f_adj[c].size());
        tr.originally_heavy[c] = deg[c] <= 15;
    }
    std::vector<char> alive(k, 1);
    for (int step = 0; step < k; ++step) {
        int c = min_degree(alive, deg);
        tr.order.push_back(c);
        tr.max_contraction_degree = std::max(tr.max_contraction_degree, deg[c]);
        for (int d : tr.f_adj[c])
            if (alive[d] && tr.parent[d] < 0) tr.parent[d] = c;
        if (tr.originally_heavy[c]) {
            tr.link_edge[c] = heaviest(zc, st.apex_edges[c][0]);
            if (tr.link_edge[c] < 0) throw ThinError("heavy component has no edge to the apex");
            tr.apex_of[c] = 0;
        } else if (tr.parent[c] >= 0) {
            tr.link_edge[c] = heaviest(zc, st.f_edges[c][tr.parent[c]]);
            tr.apex_of[c] = 0;
        } else {
            throw ThinError("component is neither originally heavy nor has a parent");
        }
        alive[c] = 0;
        for (int d : tr.f_adj[c]) --deg[d];
    }
    return finish(g, z, std::move(tr), Rational(320), opt);
}

ApexResult thin_forest_a_apex(const Ugraph& g, const std::vector<int>& apices, const SymZ& z, const ApexOptions& opt) {
    const int a = static_cast<int>(apices.size());
    if (a < 1) throw std::invalid_argument("at least one apex is required");
    Rational factor = scaled_min_cut_factor(g, z, opt.measure);
    SymZ zc = z;
    for (auto& v : zc.z) v *= factor;
    ComponentStage st = component_stage(g, apices, zc, Rational(1, 100 * a), opt);
    ApexTrace& tr = st.trace;
    const int k = tr.partition.count;
    const Rational heavy(1, a);

    std::vector<std::vector<Rational>> za = st.apex_weight;  // induced weights z_j(C, a_i)
    std::vector<int> deg(k), root(k, -1);
    std::vector<char> in_p(k, 0), alive(k, 1);
    for (int c = 0; c < k; ++c) {
        deg[c] = static_cast<int>(tr.f_adj[c].size());
        for (int i = 0; i < a; ++i)
            if (!(st.apex_weight[c][i] < heavy)) tr.originally_heavy[c] = 1;
    }
    auto heavy_now = [&](int c) {
        for (int i = 0; i < a; ++i)
            if (!(za[c][i] < heavy)) return true;
        return false;
    };
    for (int step = 0; step < k; ++step) {
        int v = min_degree(alive, deg);
        tr.order.push_back(v);
        tr.max_contraction_degree = std::max(tr.max_contraction_degree, deg[v]);
        int j = -1;
        if (tr.originally_heavy[v]) {
            for (int i = 0; i < a; ++i)
                if (!(st.apex_weight[v][i] < heavy) && (j < 0 || st.apex_weight[v][j] < st.apex_weight[v][i])) j = i;
            tr.link_edge[v] = heaviest(zc, st.apex_edges[v][j]);
            in_p[v] = 1;
            root[v] = j;
        } else if (in_p[v]) {
            j = root[v];
            tr.link_edge[v] = heaviest(zc, st.f_edges[v][tr.parent[v]]);
        } else {
            throw ThinError("invariant broken: least-degree component is neither heavy nor in the forest");
        }
        tr.apex_of[v] = j;
        for (int u : tr.f_adj[v]) {
            if (!alive[u] || u == v) continue;
            bool before = heavy_now(u);
            za[u][j] += st.f_weight[u][v];
            if (!in_p[u] && !before && !(za[u][j] < heavy)) {
                in_p[u] = 1;
                tr.parent[u] = v;
                root[u] = j;
            }
        }
        alive[v] = 0;
        for (int u : tr.f_adj[v]) --deg[u];
    }
    return finish(g, z, std::move(tr), Rational(2400 * a), opt);
}

ContractedPiece contract_vortex(const NearlyEmbeddableInstance& inst, const Symmetrization& sym) {
    if (inst.vortices.size() != 1) throw std::invalid_argument("expected exactly one vortex");
    const Vortex& h = inst.vortices[0];
    const int n = inst.num_vertices();
    ContractedPiece pc;
    std::vector<char> in_h(n, 0);
    for (int v : h.vertices) in_h[v] = 1;
    pc.group.assign(n, -1);
    pc.star = 0;
    int next = 1;
    for (int v = 0; v < n; ++v) {
        if (inst.is_apex(v)) continue;
        pc.group[v] = in_h[v] ? pc.star : next++;
    }
    pc.num_vertices = next;

    // Edge ids over rotation pairs; rotations as dart lists per instance vertex.
    std::map<std::pair<int, int>, int> pair_id;
    std::vector<std::pair<int, int>> inst_ends;
    std::vector<std::vector<int>> rot(n);
    for (int u = 0; u < n; ++u) {
        if (!inst.planar[u]) continue;
        for (int v : inst.rotation[u]) {
            auto key = std::minmax(u, v);
            auto it = pair_id.find(key);
            if (it == pair_id.end()) {
                it = pair_id.emplace(key, static_cast<int>(inst_ends.size())).first;
                inst_ends.push_back(key);
                pc.original.push_back(sym.graph.find_edge(u, v));
            }
            rot[u].push_back(it->second);
        }
    }
    // Contract the face path into its first vertex.
    std::vector<int> owner(n);
    std::iota(owner.begin(), owner.end(), 0);
    auto find = [&](int v) {
        while (owner[v] != v) v = owner[v] = owner[owner[v]];
        return v;
    };
    auto contract = [&](int e) {
        int x = find(inst_ends[e].first), y = find(inst_ends[e].second);
        if (x == y) return;
        auto after = [&](const std::vector<int>& r) {
            auto pos = std::find(r.begin(), r.end(), e) - r.begin();
            std::vector<int> out;
            for (std::size_t i = 1; i < r.size(); ++i) {
                int d = r[(pos + i) % r.size()];
                if (d != e) out.push_back(d);
            }
            return out;
        };
        std::vector<int> merged = after(rot[x]);
        auto tail = after(rot[y]);
        merged.insert(merged.end(), tail.begin(), tail.end());
        rot[x] = std::move(merged);
        rot[y].clear();
        owner[y] = x;
    };
    const int L = static_cast<int>(h.face.size());
    for (int q = 0; q + 1 < L; ++q) {
        auto it = pair_id.find(std::minmax(h.face[q], h.face[q + 1]));
        if (it == pair_id.end()) throw std::invalid_argument("face vertices are not adjacent in the rotation");
        contract(it->second);
    }
    pc.rot.assign(pc.num_vertices, {});
    for (int v = 0; v < n; ++v) {
        if (!inst.planar[v] || find(v) != v) continue;
        int pv = pc.group[v];
        for (int d : rot[v])
            if (pc.original[d] >= 0) pc.rot[pv].push_back(d);
    }
    for (const auto& [u, v] : inst_ends) pc.ends.emplace_back(pc.group[u], pc.group[v]);
    return pc;
}

RibbonResult ribbon_contraction(const NearlyEmbeddableInstance& inst, const Symmetrization& sym, const SymZ& z,
                                const std::vector<int>& walk_edge_list, const ContractedPiece& piece,
                                const std::vector<char>& in_scope_in, const std::vector<char>& kept) {
    const Vortex& h = inst.vortices[0];
    const int P = piece.num_vertices;
    std::vector<char> in_scope = in_scope_in.empty() ? std::vector<char>(P, 1) : in_scope_in;
    std::set<int> walk_set(walk_edge_list.begin(), walk_edge_list.end());
    auto active = [&](int d) {
        int e = piece.original[d];
        auto [u, v] = piece.ends[d];
        return e >= 0 && in_scope[u] && in_scope[v] && (kept.empty() || kept[e]);
    };
    std::vector<std::vector<int>> rot(P);
    for (int v = 0; v < P; ++v)
        if (in_scope[v])
            for (int d : piece.rot[v])
                if (active(d)) rot[v].push_back(d);
    std::vector<int> owner(P);
    std::iota(owner.begin(), owner.end(), 0);
    auto find = [&](int v) {
        while (owner[v] != v) v = owner[v] = owner[owner[v]];
        return v;
    };
    auto other = [&](int d, int x) {
        int a = find(piece.ends[d].first), b = find(piece.ends[d].second);
        return a == x ? b : a;
    };
    std::vector<int> face_pos(inst.num_vertices(), -1);
    for (int q = 0; q < static_cast<int>(h.face.size()); ++q) face_pos[h.face[q]] = q;

    RibbonResult res;
    for (;;) {
        // Maximal runs of darts to one neighbour, per vertex.
        std::map<std::pair<int, int>, std::vector<std::vector<int>>> runs;  // (x, y) -> runs at x
        for (int x = 0; x < P; ++x) {
            if (find(x) != x || rot[x].empty()) continue;
            const auto& r = rot[x];
            const int m = static_cast<int>(r.size());
            int start = -1;
            for (int i = 0; i < m && start < 0; ++i)
                if (other(r[i], x) != other(r[(i + m - 1) % m], x)) start = i;
            if (start < 0) start = 0;
            std::vector<int> cur;
            int cur_y = -2;
            for (int t = 0; t < m; ++t) {
                int d = r[(start + t) % m];
                int y = other(d, x);
                if (y != cur_y) {
                    if (!cur.empty() && cur_y != x) runs[{x, cur_y}].push_back(cur);
                    cur.clear();
                    cur_y = y;
                }
                cur.push_back(d);
            }
            if (!cur.empty() && cur_y != x) runs[{x, cur_y}].push_back(cur);
        }
        std::vector<std::pair<int, int>> best_key;
        std::vector<int> best;
        Rational best_w(-1);
        for (const auto& [key, rx] : runs) {
            auto [x, y] = key;
            if (x > y) continue;
            auto it = runs.find({y, x});
            if (it == runs.end()) continue;
            for (const auto& a : rx)
                for (const auto& b : it->second) {
                    std::vector<int> ribbon;
                    for (int d : a)
                        if (std::find(b.begin(), b.end(), d) != b.end()) ribbon.push_back(d);
                    if (ribbon.empty()) continue;
                    Rational w(0);
                    for (int d : ribbon) w += z.z[piece.original[d]];
                    int lo = *std::min_element(ribbon.begin(), ribbon.end());
                    int best_lo = best.empty() ? 0 : *std::min_element(best.begin(), best.end());
                    if (best.empty() || best_w < w || (w == best_w && lo < best_lo)) {
                        best = ribbon;
                        best_w = w;
                        best_key = {key};
                    }
                }
        }
        if (best.empty()) break;
        auto [x, y] = best_key[0];
        std::vector<int> sym_edges;
        for (int d : best) sym_edges.push_back(piece.original[d]);

        RibbonStep step;
        step.ribbon_weight = best_w;
        step.at_star = find(piece.star) == x || find(piece.star) == y;
        if (!step.at_star) {
            step.kind = RibbonStep::Kind::Central;
            step.edge = central_edge(z, sym_edges);
        } else {
            std::vector<int> direct;
            for (int e : sym_edges)
                if (walk_set.count(e) || !(z.z[e] < Rational(1, 10))) direct.push_back(e);
            if (!direct.empty()) {
                step.kind = RibbonStep::Kind::Direct;
                step.edge = heaviest(z, direct);
            } else {
                // Face positions touched by the ribbon and the shortest cyclic
                // stretch of the face covering them.
                std::vector<int> pos;
                for (int e : sym_edges)
                    for (int v : {sym.graph.edge(e).u, sym.graph.edge(e).v})
                        if (face_pos[v] >= 0) pos.push_back(face_pos[v]);
                pos = dedup(pos);
                step.kind = RibbonStep::Kind::Central;
                step.edge = central_edge(z, sym_edges);
                if (!pos.empty()) {
                    const int L = static_cast<int>(h.face.size());
                    const int m = static_cast<int>(pos.size());
                    int gap_at = m - 1, gap = (pos[0] + L - pos[m - 1]) % L;
                    if (m == 1) gap = L;
                    for (int i = 0; i + 1 < m; ++i)
                        if (pos[i + 1] - pos[i] > gap) {
                            gap = pos[i + 1] - pos[i];
                            gap_at = i;
                        }
                    int first = pos[(gap_at + 1) % m], last = pos[gap_at];
                    step.q_first = first;
                    step.q_last = last;
                    std::set<int> x_set;
                    for (int q = first;; q = (q + 1) % L) {
                        x_set.insert(h.bags[q].members.begin(), h.bags[q].members.end());
                        if (q == last) break;
                    }
                    const auto& b1 = h.bags[first].members;
                    const auto& b2 = h.bags[last].members;
                    auto in = [](const std::vector<int>& b, int v) { return std::count(b.begin(), b.end(), v) > 0; };
                    std::vector<int> w1, w2;
                    for (int e : walk_set) {
                        const Edge& ed = sym.graph.edge(e);
                        if (!x_set.count(ed.u) || !x_set.count(ed.v)) continue;
                        w1.push_back(e);
                        bool inner = (in(b1, ed.u) && in(b1, ed.v)) || (in(b2, ed.u) && in(b2, ed.v));
                        if (!inner) w2.push_back(e);
                    }
                    auto ends = ends_of(sym.graph);
                    const int n = inst.num_vertices();
                    auto load_of = [&](const std::vector<char>& mark) {
                        Rational l(0);
                        for (int e : sym_edges)
                            if (mark[sym.graph.edge(e).u] || mark[sym.graph.edge(e).v]) l += z.z[e];
                        return l;
                    };
                    auto touched = [&](const std::vector<int>& es) {
                        std::vector<char> mark(n, 0);
                        for (int e : es) mark[ends[e].first] = mark[ends[e].second] = 1;
                        return mark;
                    };
                    auto count_comps = [&](const std::vector<int>& es) {
                        auto lab = component_labels(n, ends, es);
                        auto mark = touched(es);
                        std::set<int> c;
                        for (int v = 0; v < n; ++v)
                            if (mark[v]) c.insert(lab[v]);
                        return std::pair{lab, static_cast<int>(c.size())};
                    };
                    step.load_w1 = load_of(touched(w1));
                    step.load_w2 = load_of(touched(w2));
                    step.w1_components = count_comps(w1).second;
                    auto [lab, comps] = count_comps(w2);
                    step.w2_components = comps;
                    auto mark2 = touched(w2);
                    // Component of W'' with the largest load.
                    std::map<int, Rational> load;
                    std::map<int, int> low;
                    for (int v = 0; v < n; ++v)
                        if (mark2[v] && !low.count(lab[v])) low[lab[v]] = v;
                    for (auto& [c, v] : low) {
                        std::vector<char> mark(n, 0);
                        for (int u = 0; u < n; ++u) mark[u] = mark2[u] && lab[u] == c;
                        load[c] = load_of(mark);
                    }
                    int chosen = -1;
                    for (auto& [c, l] : load)
                        if (chosen < 0 || load[chosen] < l || (l == load[chosen] && low[c] < low[chosen])) chosen = c;
                    if (chosen >= 0 && load[chosen] > Rational(0)) {
                        std::vector<int> y_edges;
                        for (int e : sym_edges) {
                            const Edge& ed = sym.graph.edge(e);
                            if ((mark2[ed.u] && lab[ed.u] == chosen) || (mark2[ed.v] && lab[ed.v] == chosen))
                                y_edges.push_back(e);
                        }
                        step.load_c = load[chosen];
                        step.kind = RibbonStep::Kind::Special;
                        step.edge = central_edge(z, y_edges);
                    }
                }
            }
        }
        res.edges.push_back(step.edge);
        res.steps.push_back(step);

        // Contract the ribbon, keeping the star as representative.
        int keep = x, gone = y;
        if (find(piece.star) == y) std::swap(keep, gone);
        const int e0 = best[0];
        auto after = [&](const std::vector<int>& r) {
            auto p = std::find(r.begin(), r.end(), e0) - r.begin();
            std::vector<int> out;
            for (std::size_t i = 1; i < r.size(); ++i) out.push_back(r[(p + i) % r.size()]);
            return out;
        };
        std::vector<int> merged = after(rot[keep]);
        auto tail = after(rot[gone]);
        merged.insert(merged.end(), tail.begin(), tail.end());
        std::set<int> drop(best.begin(), best.end());
        std::vector<int> clean;
        for (int d : merged)
            if (!drop.count(d)) clean.push_back(d);
        rot[keep] = std::move(clean);
        rot[gone].clear();
        owner[gone] = keep;
    }
    return res;
}

NearlyThinResult thin_subgraph_nearly(const NearlyEmbeddableInstance& inst, const SymZ& z, const Walk& w,
                                      const ThinOptions& measure) {
    if (inst.vortices.size() != 1) throw std::invalid_argument("expected exactly one vortex");
    Symmetrization sym = symmetrize(inst.graph);
    const Ugraph& g = sym.graph;
    if (static_cast<int>(z.z.size()) != g.num_edges()) throw std::invalid_argument("weight vector size mismatch");
    std::vector<int> wl = w.seq.size() > 1 ? walk_edges(sym, inst.graph, w) : std::vector<int>{};
    ContractedPiece piece = contract_vortex(inst, sym);
    const int n = inst.num_vertices();
    std::vector<char> in_h(n, 0);
    for (int v : inst.vortices[0].vertices) in_h[v] = 1;

    NearlyThinResult res;
    const int a = static_cast<int>(inst.apices.size());
    if (a == 0) {
        res.ribbon = ribbon_contraction(inst, sym, z, wl, piece);
        res.s_edges = res.ribbon.edges;
        for (int e : res.s_edges)
            if (in_h[g.edge(e).u] || in_h[g.edge(e).v]) res.s23.push_back(e);
    } else {
        // Quotient graph: piece vertices, then apices.
        const int P = piece.num_vertices;
        std::vector<int> qid(n, -1), apex_q;
        for (int v = 0; v < n; ++v) qid[v] = piece.group[v];
        for (int x : inst.apices) {
            qid[x] = P + static_cast<int>(apex_q.size());
            apex_q.push_back(qid[x]);
        }
        Ugraph q(P + a);
        SymZ zq;
        std::vector<int> q_to_sym, sym_to_q(g.num_edges(), -1);
        for (int e = 0; e < g.num_edges(); ++e) {
            int u = qid[g.edge(e).u], v = qid[g.edge(e).v];
            if (u < 0 || v < 0 || u == v) continue;
            sym_to_q[e] = q.add_edge(u, v, g.edge(e).cost);
            zq.z.push_back(z.z[e]);
            q_to_sym.push_back(e);
        }
        ApexOptions opt;
        opt.measure = measure;
        opt.tree.measure = measure;
        opt.component_tree = [&](const std::vector<int>& verts,
                                 const std::vector<char>& kept_q) -> std::optional<std::vector<int>> {
            if (std::find(verts.begin(), verts.end(), piece.star) == verts.end()) return std::nullopt;
            std::vector<char> scope(P, 0), kept(g.num_edges(), 0);
            for (int v : verts) scope[v] = 1;
            for (int e = 0; e < g.num_edges(); ++e)
                if (sym_to_q[e] >= 0) kept[e] = kept_q[sym_to_q[e]];
            res.ribbon = ribbon_contraction(inst, sym, z, wl, piece, scope, kept);
            std::vector<int> out;
            for (int e : res.ribbon.edges) out.push_back(sym_to_q[e]);
            return out;
        };
        ApexResult ar = thin_forest_a_apex(q, apex_q, zq, opt);
        for (int e : ar.cert.edges) res.s_edges.push_back(q_to_sym[e]);
        const auto& comp = ar.trace.partition.comp;
        const int star_comp = comp[piece.star];
        for (int e : res.s_edges) {
            int u = g.edge(e).u, v = g.edge(e).v;
            if (!in_h[u] && !in_h[v]) continue;
            int o = in_h[u] ? v : u;
            if (inst.is_apex(o))
                res.s21.push_back(e);
            else if (comp[qid[o]] != star_comp)
                res.s22.push_back(e);
            else
                res.s23.push_back(e);
        }
        res.apex = std::move(ar.trace);
    }
    std::sort(res.s_edges.begin(), res.s_edges.end());
    std::vector<int> t = res.s_edges;
    t.insert(t.end(), wl.begin(), wl.end());
    res.t_edges = dedup(t);
    res.components = count_components(g, res.t_edges);
    res.s_measure = measure_thinness(g, z, res.s_edges, measure);
    res.t_measure = measure_thinness(g, z, res.t_edges, measure);
    res.s23_measure = measure_thinness(g, z, res.s23, measure);
    return res;
}

}  // namespace vatsp
