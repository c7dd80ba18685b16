#include "vatsp/hardness.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "vatsp/flow.hpp"

namespace vatsp {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw HardnessGuard("integer overflow while building the reduction");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw HardnessGuard("integer overflow while building the reduction");
    return r;
}

bool contains(const std::vector<std::int64_t>& sorted, std::int64_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

std::vector<std::vector<char>> adjacency(const Ugraph& g) {
    const int n = g.num_vertices();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (const Edge& e : g.edges())
        if (e.u != e.v) adj[e.u][e.v] = adj[e.v][e.u] = 1;
    return adj;
}

Walk euler_from_arcs(int n, const std::vector<std::pair<int, int>>& arcs) {
    Digraph h(n);
    for (auto [u, v] : arcs) h.add_arc(u, v, Rational(1));
    return euler_closed_walk(h).walk;
}

}  // namespace

std::vector<std::int64_t> nonaveraging_set(int k, int n) {
    if (k < 1 || n < 1) throw std::invalid_argument("k and n must be positive");
    std::vector<std::int64_t> xs;
    std::int64_t p = 1;
    for (int i = 1; i <= n; ++i) {
        p = checked_mul(p, k + 1);
        xs.push_back(p);
    }
    return xs;
}

bool is_nonaveraging(const std::vector<std::int64_t>& xs, int k) {
    std::vector<std::int64_t> s = xs;
    std::sort(s.begin(), s.end());
    const int n = static_cast<int>(s.size());
    if (k < 1 || n == 0) return true;
    // Nondecreasing index sequences = k-multisets.
    std::vector<int> idx(k, 0);
    for (;;) {
        std::int64_t sum = 0;
        for (int i : idx) sum += s[i];
        if (sum % k == 0 && contains(s, sum / k) && idx.front() != idx.back()) return false;
        int p = k - 1;
        while (p >= 0 && idx[p] == n - 1) --p;
        if (p < 0) return true;
        ++idx[p];
        for (int q = p + 1; q < k; ++q) idx[q] = idx[p];
    }
}

bool is_clique(const Ugraph& g, const std::vector<int>& vs, int k) {
    if (static_cast<int>(vs.size()) != k) return false;
    auto adj = adjacency(g);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i] < 0 || vs[i] >= g.num_vertices()) return false;
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (!adj[vs[i]][vs[j]]) return false;
    }
    return true;
}

std::optional<std::vector<int>> solve_clique(const Ugraph& g, int k) {
    const int n = g.num_vertices();
    if (k < 0) return std::nullopt;
    auto adj = adjacency(g);
    std::vector<int> cur;
    std::optional<std::vector<int>> found;
    auto rec = [&](auto&& self, int from) -> bool {
        if (static_cast<int>(cur.size()) == k) {
            found = cur;
            return true;
        }
        for (int v = from; v < n; ++v) {
            bool ok = true;
            for (int u : cur) ok = ok && adj[u][v];
            if (!ok) continue;
            cur.push_back(v);
            if (self(self, v + 1)) return true;
            cur.pop_back();
        }
        return false;
    };
    rec(rec, 0);
    return found;
}

BicliqueReduction clique_to_biclique(const Ugraph& g, int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    const int n = g.num_vertices();
    auto adj = adjacency(g);
    BicliqueReduction r;
    r.source_vertices = n;
    r.inst.k = k;
    r.inst.graph = Ugraph(2 * k * n);
    r.inst.classes.assign(2 * k, {});
    for (int i = 0; i < 2 * k; ++i)
        for (int v = 0; v < n; ++v) r.inst.classes[i].push_back(i * n + v);
    for (int i1 = 0; i1 < k; ++i1)
        for (int i2 = 0; i2 < k; ++i2)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (i1 == i2 ? u == v : static_cast<bool>(adj[u][v]))
                        r.inst.graph.add_edge(i1 * n + u, (k + i2) * n + v, Rational(1));
    return r;
}

std::vector<int> clique_from_biclique(const BicliqueReduction& r, const std::vector<int>& picks) {
    std::vector<int> out;
    for (int i = 0; i < r.inst.k; ++i) out.push_back(picks[i] - i * r.source_vertices);
    return out;
}

std::vector<int> biclique_from_clique(const BicliqueReduction& r, const std::vector<int>& clique) {
    const int k = r.inst.k, n = r.source_vertices;
    if (static_cast<int>(clique.size()) != k) throw std::invalid_argument("clique size differs from k");
    std::vector<int> picks(2 * k);
    for (int i = 0; i < k; ++i) {
        picks[i] = i * n + clique[i];
        picks[k + i] = (k + i) * n + clique[i];
    }
    return picks;
}

bool is_biclique_solution(const BicliqueInstance& b, const std::vector<int>& picks) {
    if (static_cast<int>(picks.size()) != 2 * b.k) return false;
    for (int i = 0; i < 2 * b.k; ++i)
        if (std::find(b.classes[i].begin(), b.classes[i].end(), picks[i]) == b.classes[i].end()) return false;
    auto adj = adjacency(b.graph);
    for (int i1 = 0; i1 < b.k; ++i1)
        for (int i2 = b.k; i2 < 2 * b.k; ++i2)
            if (!adj[picks[i1]][picks[i2]]) return false;
    return true;
}

std::optional<std::vector<int>> solve_biclique(const BicliqueInstance& b, std::uint64_t limit) {
    const int k = b.k;
    auto adj = adjacency(b.graph);
    std::vector<int> picks;
    std::uint64_t nodes = 0;
    std::optional<std::vector<int>> found;
    auto rec = [&](auto&& self, int cls) -> bool {
        if (++nodes > limit) throw SearchGuardExceeded("biclique search exceeded its node limit");
        if (cls == 2 * k) {
            found = picks;
            return true;
        }
        for (int v : b.classes[cls]) {
            bool ok = true;
            if (cls >= k)
                for (int i = 0; i < k && ok; ++i) ok = adj[picks[i]][v];
            if (!ok) continue;
            picks.push_back(v);
            if (self(self, cls + 1)) return true;
            picks.pop_back();
        }
        return false;
    };
    if (k >= 1) rec(rec, 0);
    return found;
}

bool is_balanced(const Digraph& d, const std::vector<std::int64_t>& chi) {
    std::vector<std::int64_t> net(d.num_vertices(), 0);
    for (int a = 0; a < d.num_arcs(); ++a) {
        net[d.arc(a).src] += chi[a];
        net[d.arc(a).dst] -= chi[a];
    }
    return std::all_of(net.begin(), net.end(), [](std::int64_t v) { return v == 0; });
}

bool is_edge_balancing_solution(const EdgeBalancingInstance& eb, const std::vector<std::int64_t>& chi) {
    if (static_cast<int>(chi.size()) != eb.d.num_arcs()) return false;
    for (int a = 0; a < eb.d.num_arcs(); ++a)
        if (!contains(eb.sets[a], chi[a])) return false;
    return is_balanced(eb.d, chi);
}

std::optional<std::vector<std::int64_t>> solve_edge_balancing(const EdgeBalancingInstance& eb, std::uint64_t limit) {
    const Digraph& d = eb.d;
    const int n = d.num_vertices(), m = d.num_arcs();
    std::vector<std::int64_t> chi(m, 0);
    std::vector<char> set(m, 0);
    std::vector<std::int64_t> out(n, 0), in(n, 0);
    std::vector<int> open(n, 0);
    for (int a = 0; a < m; ++a) {
        if (eb.sets[a].empty()) return std::nullopt;
        ++open[d.arc(a).src];
        ++open[d.arc(a).dst];
    }
    auto assign = [&](int a, std::int64_t v) {
        chi[a] = v;
        set[a] = 1;
        out[d.arc(a).src] += v;
        in[d.arc(a).dst] += v;
        --open[d.arc(a).src];
        --open[d.arc(a).dst];
    };
    auto unassign = [&](int a) {
        set[a] = 0;
        out[d.arc(a).src] -= chi[a];
        in[d.arc(a).dst] -= chi[a];
        ++open[d.arc(a).src];
        ++open[d.arc(a).dst];
    };
    std::uint64_t nodes = 0;
    auto rec = [&](auto&& self) -> bool {
        if (++nodes > limit) throw SearchGuardExceeded("edge balancing search exceeded its node limit");
        for (int v = 0; v < n; ++v)
            if (open[v] == 0 && out[v] != in[v]) return false;
        // A vertex with one open arc fixes its value.
        for (int v = 0; v < n; ++v) {
            if (open[v] != 1) continue;
            int a = -1;
            for (int b : d.out_arcs(v))
                if (!set[b]) a = b;
            for (int b : d.in_arcs(v))
                if (!set[b]) a = b;
            std::int64_t val = d.arc(a).src == v ? in[v] - out[v] : out[v] - in[v];
            if (val <= 0 || !contains(eb.sets[a], val)) return false;
            assign(a, val);
            if (self(self)) return true;
            unassign(a);
            return false;
        }
        int pick = -1;
        for (int a = 0; a < m; ++a)
            if (!set[a] && (pick < 0 || eb.sets[a].size() < eb.sets[pick].size())) pick = a;
        if (pick < 0) return true;
        for (std::int64_t val : eb.sets[pick]) {
            assign(pick, val);
            if (self(self)) return true;
            unassign(pick);
        }
        return false;
    };
    if (rec(rec)) return chi;
    return std::nullopt;
}

BalancingReduction biclique_to_edge_balancing(const BicliqueInstance& bi, const std::vector<std::int64_t>& xs,
                                              std::size_t max_set_size) {
    const int k = bi.k;
    if (k < 1 || static_cast<int>(bi.classes.size()) != 2 * k) throw std::invalid_argument("expected 2k classes");
    const int n = static_cast<int>(bi.classes[0].size());
    for (const auto& c : bi.classes)
        if (static_cast<int>(c.size()) != n) throw std::invalid_argument("classes have unequal sizes");
    if (static_cast<int>(xs.size()) != n) throw std::invalid_argument("need one integer per class member");
    BalancingReduction r;
    r.k = k;
    r.n = n;
    r.xs = xs;
    r.m = n ? *std::max_element(xs.begin(), xs.end()) : 0;
    r.b = checked_mul(2 * k, r.m);
    const std::int64_t km = checked_mul(k, r.m);
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(km) > max_set_size)
        throw HardnessGuard("arc sets would exceed the size cap");
    auto adj = adjacency(bi.graph);
    r.eb.d = Digraph(2 * k + 1);
    for (int i1 = 1; i1 <= k; ++i1)
        for (int i2 = k + 1; i2 <= 2 * k; ++i2) {
            r.eb.d.add_arc(i1, i2, Rational(1));
            std::vector<std::int64_t> s;
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = 0; j2 < n; ++j2)
                    if (adj[bi.classes[i1 - 1][j1]][bi.classes[i2 - 1][j2]])
                        s.push_back(checked_add(xs[j1], checked_mul(r.b, xs[j2])));
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            r.eb.sets.push_back(std::move(s));
        }
    for (int i = 1; i <= k; ++i) {
        r.eb.d.add_arc(0, i, Rational(1));
        std::vector<std::int64_t> s;
        for (std::int64_t x : xs)
            for (std::int64_t y = 1; y <= km; ++y) s.push_back(checked_add(checked_mul(k, x), checked_mul(r.b, y)));
        std::sort(s.begin(), s.end());
        r.eb.sets.push_back(std::move(s));
    }
    for (int i = k + 1; i <= 2 * k; ++i) {
        r.eb.d.add_arc(i, 0, Rational(1));
        std::vector<std::int64_t> s;
        for (std::int64_t x : xs)
            for (std::int64_t y = 1; y <= km; ++y) s.push_back(checked_add(y, checked_mul(checked_mul(r.b, k), x)));
        std::sort(s.begin(), s.end());
        r.eb.sets.push_back(std::move(s));
    }
    return r;
}

std::vector<std::int64_t> chi_from_biclique(const BalancingReduction& r, const BicliqueInstance& bi,
                                            const std::vector<int>& picks) {
    const int k = r.k;
    std::vector<int> j(2 * k);
    for (int i = 0; i < 2 * k; ++i) {
        auto it = std::find(bi.classes[i].begin(), bi.classes[i].end(), picks[i]);
        if (it == bi.classes[i].end()) throw std::invalid_argument("pick outside its class");
        j[i] = static_cast<int>(it - bi.classes[i].begin());
    }
    std::int64_t y1 = 0, y2 = 0;
    for (int i = 0; i < k; ++i) y1 += r.xs[j[i]];
    for (int i = k; i < 2 * k; ++i) y2 += r.xs[j[i]];
    std::vector<std::int64_t> chi;
    for (int i1 = 0; i1 < k; ++i1)
        for (int i2 = k; i2 < 2 * k; ++i2) chi.push_back(r.xs[j[i1]] + r.b * r.xs[j[i2]]);
    for (int i = 0; i < k; ++i) chi.push_back(k * r.xs[j[i]] + r.b * y2);
    for (int i = k; i < 2 * k; ++i) chi.push_back(y1 + r.b * k * r.xs[j[i]]);
    return chi;
}

std::vector<int> biclique_from_chi(const BalancingReduction& r, const BicliqueInstance& bi,
                                   const std::vector<std::int64_t>& chi) {
    const int k = r.k;
    auto index_of = [&](std::int64_t kx) {
        for (int j = 0; j < r.n; ++j)
            if (k * r.xs[j] == kx) return j;
        throw std::invalid_argument("assignment does not decode to a class member");
    };
    std::vector<int> picks(2 * k);
    const int base = k * k;
    for (int i = 0; i < k; ++i) picks[i] = bi.classes[i][index_of(chi[base + i] % r.b)];
    for (int i = k; i < 2 * k; ++i) picks[i] = bi.classes[i][index_of(chi[base + i] / r.b)];
    return picks;
}

bool is_exactly_once_walk(const WalkInstance& wi, const Walk& w) {
    const int n = wi.d.num_vertices();
    if (w.seq.empty() || w.seq.front() != w.seq.back()) return false;
    if (w.seq.size() > 1 && !walk_uses_arcs(wi.d, w)) return false;
    std::vector<int> count(n, 0);
    // The closing repeat of the start is not a second visit.
    const std::size_t len = w.seq.size() == 1 ? 1 : w.seq.size() - 1;
    for (std::size_t i = 0; i < len; ++i) ++count[w.seq[i]];
    for (int v = 0; v < n; ++v) {
        if (count[v] == 0) return false;
        if (wi.in_u[v] && count[v] != 1) return false;
    }
    return true;
}

std::optional<Walk> solve_exactly_once_walk(const WalkInstance& wi, std::uint64_t limit) {
    const Digraph& d = wi.d;
    const int n = d.num_vertices();
    if (n == 0) return std::nullopt;
    std::vector<int> zs;
    for (int v = 0; v < n; ++v)
        if (!wi.in_u[v]) zs.push_back(v);
    for (const Arc& a : d.arcs())
        if (!wi.in_u[a.src] && !wi.in_u[a.dst]) throw std::invalid_argument("vertices outside U must be independent");

    if (zs.empty()) {
        // Every vertex exactly once: a Hamiltonian cycle.
        if (n == 1) return Walk{{0}, true};
        std::vector<int> path{0};
        std::vector<char> used(n, 0);
        used[0] = 1;
        std::uint64_t nodes = 0;
        auto rec = [&](auto&& self) -> bool {
            if (++nodes > limit) throw SearchGuardExceeded("exactly-once walk search exceeded its node limit");
            int u = path.back();
            if (static_cast<int>(path.size()) == n) return d.find_arc(u, 0) >= 0;
            for (int a : d.out_arcs(u)) {
                int v = d.arc(a).dst;
                if (used[v]) continue;
                used[v] = 1;
                path.push_back(v);
                if (self(self)) return true;
                path.pop_back();
                used[v] = 0;
            }
            return false;
        };
        if (!rec(rec)) return std::nullopt;
        path.push_back(0);
        return Walk{path, true};
    }
    if (zs.size() == static_cast<std::size_t>(n)) {
        if (n == 1) return Walk{{zs[0]}, true};
        return std::nullopt;
    }

    std::vector<char> inner(n, 0), ext(n, 0);
    for (int v = 0; v < n; ++v) (wi.in_u[v] ? inner : ext)[v] = 1;
    std::optional<Walk> found;
    for_each_path_cover(
        d, inner, ext, ext,
        [&](const std::vector<std::vector<int>>& paths) {
            std::vector<int> starts(n, 0), ends(n, 0);
            std::vector<int> comp(n);
            std::iota(comp.begin(), comp.end(), 0);
            auto find = [&](int v) {
                while (comp[v] != v) v = comp[v] = comp[comp[v]];
                return v;
            };
            for (const auto& p : paths) {
                ++starts[p.front()];
                ++ends[p.back()];
                for (std::size_t i = 0; i + 1 < p.size(); ++i) comp[find(p[i])] = find(p[i + 1]);
            }
            for (int z : zs)
                if (starts[z] != ends[z] || starts[z] == 0) return false;
            for (int v = 0; v < n; ++v)
                if (find(v) != find(zs[0])) return false;
            std::vector<std::pair<int, int>> arcs;
            for (const auto& p : paths)
                for (std::size_t i = 0; i + 1 < p.size(); ++i) arcs.emplace_back(p[i], p[i + 1]);
            found = rotate_closed(euler_from_arcs(n, arcs), zs[0]);
            return true;
        },
        limit);
    return found;
}

WalkReduction edge_balancing_to_walk(const EdgeBalancingInstance& eb, std::size_t max_vertices) {
    const Digraph& d = eb.d;
    const int k = d.num_vertices(), m = d.num_arcs();
    WalkReduction r;
    r.k = k;
    std::vector<std::int64_t> s_e(m, 0), s_plus(k, 0), s_minus(k, 0);
    for (int e = 0; e < m; ++e) {
        for (std::int64_t x : eb.sets[e]) {
            if (x < 1) throw std::invalid_argument("arc sets must hold positive integers");
            s_e[e] = checked_add(s_e[e], x);
        }
        s_plus[d.arc(e).src] += s_e[e];
        s_minus[d.arc(e).dst] += s_e[e];
        r.s_star = checked_add(r.s_star, s_e[e]);
    }
    // A w_i without arcs gets one path of each bundle, so that the walk can reach it.
    std::int64_t isolated = 0;
    for (int i = 0; i < k; ++i)
        if (s_plus[i] == 0 && s_minus[i] == 0) {
            s_plus[i] = s_minus[i] = 1;
            ++isolated;
        }
    // Z, one hub and 6S_e internals per gadget, three bundles of two-arc paths.
    std::int64_t total =
        checked_add(k + 2 + 2 * static_cast<std::int64_t>(m) + 3 * isolated, checked_mul(9, r.s_star));
    if (total > static_cast<std::int64_t>(max_vertices)) throw HardnessGuard("walk instance would exceed the vertex cap");

    Digraph g(k + 2);
    r.c_in = k;
    r.c_out = k + 1;
    std::vector<int> z_set(k + 2);
    std::iota(z_set.begin(), z_set.end(), 0);
    auto with_z = [&](std::vector<int> bag) {
        bag.insert(bag.end(), z_set.begin(), z_set.end());
        return bag;
    };
    for (int e = 0; e < m; ++e) {
        GadgetPlacement gp;
        gp.arc = e;
        gp.hub = g.add_vertex();
        g.add_arc(r.c_in, gp.hub, Rational(1));
        for (std::int64_t x : eb.sets[e]) {
            gp.copies.push_back(add_hs(g, static_cast<int>(x), d.arc(e).src, d.arc(e).dst, gp.hub, r.c_out));
            for (auto bag : hs_decomposition(gp.copies.back()).bags) {
                bag.push_back(gp.hub);
                r.pd.bags.push_back(with_z(std::move(bag)));
            }
        }
        if (eb.sets[e].empty()) r.pd.bags.push_back(with_z({gp.hub}));
        r.gadgets.push_back(std::move(gp));
    }
    auto two_arc = [&](int from, int to) {
        int mid = g.add_vertex();
        g.add_arc(from, mid, Rational(1));
        g.add_arc(mid, to, Rational(1));
        r.pd.bags.push_back(with_z({mid}));
        return mid;
    };
    r.plus_paths.assign(k, {});
    r.minus_paths.assign(k, {});
    for (int i = 0; i < k; ++i) {
        for (std::int64_t c = 0; c < s_plus[i]; ++c) r.plus_paths[i].push_back(two_arc(r.c_in, i));
        for (std::int64_t c = 0; c < s_minus[i]; ++c) r.minus_paths[i].push_back(two_arc(i, r.c_out));
    }
    for (std::int64_t c = 0; c < r.s_star + m + isolated; ++c) r.star_paths.push_back(two_arc(r.c_out, r.c_in));
    if (r.pd.bags.empty()) r.pd.bags.push_back(z_set);
    r.wi.d = std::move(g);
    r.wi.in_u.assign(r.wi.d.num_vertices(), 1);
    for (int z : z_set) r.wi.in_u[z] = 0;
    return r;
}

Walk walk_from_chi(const WalkReduction& r, const EdgeBalancingInstance& eb, const std::vector<std::int64_t>& chi) {
    const Digraph& d = eb.d;
    std::vector<std::pair<int, int>> arcs;
    auto path = [&](const std::vector<int>& p) {
        for (std::size_t i = 0; i + 1 < p.size(); ++i) arcs.emplace_back(p[i], p[i + 1]);
    };
    for (int mid : r.star_paths) path({r.c_out, mid, r.c_in});
    for (int i = 0; i < r.k; ++i) {
        for (int mid : r.plus_paths[i]) path({r.c_in, mid, i});
        for (int mid : r.minus_paths[i]) path({i, mid, r.c_out});
    }
    for (const GadgetPlacement& gp : r.gadgets) {
        const auto& xs = eb.sets[gp.arc];
        auto it = std::find(xs.begin(), xs.end(), chi[gp.arc]);
        if (it == xs.end()) throw std::invalid_argument("assignment outside the arc set");
        const std::size_t chosen = it - xs.begin();
        const int a_in = d.arc(gp.arc).src, a_out = d.arc(gp.arc).dst;
        for (std::size_t c = 0; c < gp.copies.size(); ++c) {
            const auto& blocks = gp.copies[c].blocks;
            if (c == chosen) {
                std::vector<int> p{r.c_in, gp.hub};
                for (const auto& b : blocks) p.insert(p.end(), b.begin(), b.end());
                p.push_back(r.c_out);
                path(p);
            } else {
                for (const auto& b : blocks) path({a_in, b[2], b[1], b[0], b[5], b[4], b[3], a_out});
            }
        }
    }
    Walk w = euler_from_arcs(r.wi.d.num_vertices(), arcs);
    return rotate_closed(w, r.c_in);
}

std::vector<std::int64_t> chi_from_walk(const WalkReduction& r, const EdgeBalancingInstance& eb, const Walk& w) {
    std::vector<std::int64_t> chi(eb.d.num_arcs(), 0);
    for (const GadgetPlacement& gp : r.gadgets) {
        auto it = std::find(w.seq.begin(), w.seq.end(), gp.hub);
        if (it == w.seq.end() || it + 1 == w.seq.end()) throw std::invalid_argument("walk misses a gadget hub");
        const int next = *(it + 1);
        bool found = false;
        for (std::size_t c = 0; c < gp.copies.size() && !found; ++c)
            if (gp.copies[c].blocks[0][0] == next) {
                chi[gp.arc] = eb.sets[gp.arc][c];
                found = true;
            }
        if (!found) throw std::invalid_argument("walk leaves a hub outside every copy");
    }
    return chi;
}

AtspReduction walk_to_atsp(const WalkInstance& wi) {
    const std::int64_t n = wi.d.num_vertices();
    AtspReduction r;
    r.scale = checked_mul(2, checked_mul(n, n));
    std::int64_t u = std::count(wi.in_u.begin(), wi.in_u.end(), 1);
    r.threshold = checked_mul(r.scale, u + 1);
    r.g = Digraph(static_cast<int>(n));
    for (const Arc& a : wi.d.arcs()) r.g.add_arc(a.src, a.dst, Rational(wi.in_u[a.dst] ? r.scale : 1));
    return r;
}

Walk walk_from_tour(const AtspReduction& r, const WalkInstance& wi, const Walk& tour) {
    if (!(walk_arc_cost(r.g, tour) < Rational(r.threshold))) throw std::invalid_argument("tour is not below the threshold");
    if (!is_exactly_once_walk(wi, tour)) throw std::invalid_argument("tour is not an exactly-once walk");
    return tour;
}

AtspSolution solve_atsp_exact(const Digraph& g, std::uint64_t node_limit) {
    const int n = g.num_vertices(), m = g.num_arcs();
    AtspSolution best;
    if (n == 0) return best;
    if (n == 1) {
        best.feasible = true;
        best.cost = Rational(0);
        best.walk = Walk{{0}, true};
        return best;
    }
    const std::int64_t cap = static_cast<std::int64_t>(n) * n;
    // -1 forbidden, 0 free, 1 forced.
    std::vector<int> state(m, 0);
    auto rec = [&](auto&& self) -> void {
        if (++best.nodes > node_limit) throw SearchGuardExceeded("ATSP branch and bound exceeded its node limit");
        // Vertex v splits into v (entry) and n + v (exit) joined by an arc used at least once.
        std::vector<CircArc> arcs;
        for (int v = 0; v < n; ++v) arcs.push_back({v, n + v, 1, cap, Rational(0)});
        for (int a = 0; a < m; ++a) {
            const Arc& e = g.arc(a);
            arcs.push_back({n + e.src, e.dst, state[a] == 1 ? 1 : 0, state[a] == -1 ? 0 : cap, e.cost});
        }
        auto flow = min_cost_circulation(2 * n, arcs);
        if (!flow) return;
        Rational cost(0);
        for (int a = 0; a < m; ++a) cost += g.arc(a).cost * Rational((*flow)[n + a]);
        if (best.feasible && !(cost < best.cost)) return;
        std::vector<int> comp(n);
        std::iota(comp.begin(), comp.end(), 0);
        std::vector<int> leaving;
        auto find = [&](int v) {
            while (comp[v] != v) v = comp[v] = comp[comp[v]];
            return v;
        };
        for (int a = 0; a < m; ++a)
            if ((*flow)[n + a] > 0) comp[find(g.arc(a).src)] = find(g.arc(a).dst);
        bool connected = true;
        for (int v = 0; v < n; ++v) connected = connected && find(v) == find(0);
        if (!connected) {
            // Every component needs an arc out and an arc in; branch on the
            // smallest such set, and prune when one is empty.
            std::vector<std::vector<int>> out(n), in(n);
            for (int a = 0; a < m; ++a) {
                const int cs = find(g.arc(a).src), cd = find(g.arc(a).dst);
                if (cs == cd || state[a] == -1) continue;
                out[cs].push_back(a);
                in[cd].push_back(a);
            }
            const std::vector<int>* pick = nullptr;
            for (int v = 0; v < n; ++v) {
                if (find(v) != v) continue;
                for (const auto* set : {&out[v], &in[v]})
                    if (!pick || set->size() < pick->size()) pick = set;
            }
            if (pick->empty()) return;
            leaving = *pick;
        }
        if (connected) {
            std::vector<std::pair<int, int>> used;
            for (int a = 0; a < m; ++a)
                for (std::int64_t c = 0; c < (*flow)[n + a]; ++c) used.emplace_back(g.arc(a).src, g.arc(a).dst);
            best.feasible = true;
            best.cost = cost;
            best.walk = rotate_closed(euler_from_arcs(n, used), 0);
            return;
        }
        // Branch on which arc of the set is the first one used, forbidding the
        // earlier ones.
        std::vector<int> saved = state;
        for (int a : leaving) {
            if (state[a] == 0) state[a] = 1;
            self(self);
            state = saved;
            for (int b : leaving) {
                if (b == a) break;
                state[b] = -1;
            }
            if (state[a] == 1) break;  // already forced: later branches are covered
            state[a] = -1;
        }
        state = saved;
    };
    rec(rec);
    return best;
}

}  // namespace vatsp
