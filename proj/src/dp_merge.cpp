#include "vatsp/dp_merge.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace vatsp {

DpContext make_context(const NearlyEmbeddableInstance& inst, const std::vector<int>& extra, const Digraph* graph) {
    if (inst.vortices.size() != 1) throw std::invalid_argument("vortex program needs exactly one vortex");
    const Vortex& h = inst.vortices[0];
    if (h.bags.size() != h.face.size()) throw std::invalid_argument("vortex program needs one bag per face position");
    DpContext ctx;
    ctx.graph = graph ? *graph : inst.graph;
    ctx.d = MetricClosure(ctx.graph);
    ctx.face = h.face;
    for (const Bag& b : h.bags) {
        std::set<int> s(b.members.begin(), b.members.end());
        s.insert(extra.begin(), extra.end());
        ctx.bags.emplace_back(s.begin(), s.end());
    }
    std::set<int> t(h.vertices.begin(), h.vertices.end());
    t.insert(extra.begin(), extra.end());
    ctx.targets.assign(t.begin(), t.end());
    return ctx;
}

std::vector<int> DpContext::boundary(int first, int last) const {
    std::set<int> s(bags[first].begin(), bags[first].end());
    s.insert(bags[last].begin(), bags[last].end());
    return {s.begin(), s.end()};
}

std::vector<int> DpContext::hp_vertices(int first, int last) const {
    std::set<int> s;
    for (int q = first; q <= last; ++q) s.insert(bags[q].begin(), bags[q].end());
    return {s.begin(), s.end()};
}

Rational solution_cost(const DpContext& ctx, const PartialSolution& s) {
    Rational c(0);
    for (const Walk& w : s.walks) c += walk_cost(ctx.d, w);
    return c;
}

namespace {

bool is_open(const Walk& w) { return !w.closed && w.seq.size() >= 2; }
bool is_trivial(const Walk& w) { return w.seq.size() <= 1; }

struct Dsu {
    std::map<int, int> parent;
    int find(int x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        if (it->second == x) return x;
        int r = find(it->second);
        parent[x] = r;
        return r;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

Dsu components(const PartialSolution& s) {
    Dsu u;
    for (const Walk& w : s.walks)
        for (std::size_t i = 0; i < w.seq.size(); ++i) {
            u.find(w.seq[i]);
            if (i > 0) u.unite(w.seq[i - 1], w.seq[i]);
        }
    return u;
}

std::set<int> visited(const PartialSolution& s) {
    std::set<int> v;
    for (const Walk& w : s.walks) v.insert(w.seq.begin(), w.seq.end());
    return v;
}

int index_of(const std::vector<int>& xs, int x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    return it != xs.end() && *it == x ? static_cast<int>(it - xs.begin()) : -1;
}

// Concatenated shortest paths through the given vertices (-1 entries skipped).
Walk via(const DpContext& ctx, std::initializer_list<int> pts) {
    Walk w;
    for (int x : pts) {
        if (x < 0) continue;
        if (w.seq.empty()) {
            w.seq.push_back(x);
            continue;
        }
        if (!ctx.d.reachable(w.seq.back(), x)) return {};
        auto p = ctx.d.path(w.seq.back(), x);
        w.seq.insert(w.seq.end(), p.begin() + 1, p.end());
    }
    return w;
}

// Cyclic view of a closed walk without the repeated end vertex.
std::vector<int> cycle_of(const Walk& w) {
    std::vector<int> c(w.seq.begin(), w.seq.end());
    if (c.size() > 1 && c.front() == c.back()) c.pop_back();
    return c;
}

struct Occurrence {
    int walk = -1;
    int pos = -1;
};

std::vector<Occurrence> occurrences(const std::vector<Walk>& walks, const Walk& q) {
    std::vector<Occurrence> out;
    const auto& qs = q.seq;
    if (qs.size() < 2) return out;
    for (int i = 0; i < static_cast<int>(walks.size()); ++i) {
        const Walk& w = walks[i];
        if (is_trivial(w)) continue;
        if (w.closed) {
            auto c = cycle_of(w);
            const int m = static_cast<int>(c.size());
            for (int s = 0; s < m; ++s) {
                bool ok = true;
                for (std::size_t t = 0; t < qs.size() && ok; ++t) ok = c[(s + t) % m] == qs[t];
                if (ok) out.push_back({i, s});
            }
        } else {
            const auto& ws = w.seq;
            for (std::size_t s = 0; s + qs.size() <= ws.size(); ++s)
                if (std::equal(qs.begin(), qs.end(), ws.begin() + s)) out.push_back({i, static_cast<int>(s)});
        }
    }
    return out;
}

bool contains(const std::vector<Walk>& walks, const Walk& q) {
    if (q.seq.empty()) return false;
    if (q.seq.size() == 1) {
        for (const Walk& w : walks)
            if (std::count(w.seq.begin(), w.seq.end(), q.seq[0])) return true;
        return false;
    }
    return !occurrences(walks, q).empty();
}

// Splits walk at an occurrence of q into the part before q (ending at q's start)
// and the part after (starting at q's end). A closed walk yields a trivial
// prefix and the rest of the cycle as suffix.
std::pair<Walk, Walk> cut_out(const Walk& w, const Occurrence& o, const Walk& q) {
    const int len = static_cast<int>(q.seq.size());
    Walk a, b;
    if (w.closed) {
        auto c = cycle_of(w);
        const int m = static_cast<int>(c.size());
        a.seq = {q.seq.front()};
        for (int t = len - 1; t <= m; ++t) b.seq.push_back(c[(o.pos + t) % m]);
    } else {
        a.seq.assign(w.seq.begin(), w.seq.begin() + o.pos + 1);
        b.seq.assign(w.seq.begin() + o.pos + len - 1, w.seq.end());
    }
    return {a, b};
}

Walk concat(std::initializer_list<const Walk*> parts) {
    Walk out;
    for (const Walk* p : parts) {
        if (p->seq.empty()) continue;
        if (out.seq.empty())
            out.seq = p->seq;
        else
            out.seq.insert(out.seq.end(), p->seq.begin() + 1, p->seq.end());
    }
    return out;
}

// Joins open walks ending at x with open walks starting at x (least indices first)
// for every x in `at`, closing a walk that returns to its own start. Drops
// single-vertex walks of vertices covered elsewhere.
void join_walks(std::vector<Walk>& walks, const std::vector<int>& at) {
    for (int x : at) {
        for (;;) {
            int e = -1, s = -1;
            for (int i = 0; i < static_cast<int>(walks.size()); ++i) {
                if (!is_open(walks[i])) continue;
                if (e < 0 && walks[i].seq.back() == x) e = i;
                if (s < 0 && walks[i].seq.front() == x) s = i;
            }
            if (e < 0 || s < 0) break;
            if (e == s) {
                walks[e].closed = true;
                continue;
            }
            walks[e].seq.insert(walks[e].seq.end(), walks[s].seq.begin() + 1, walks[s].seq.end());
            walks.erase(walks.begin() + s);
        }
    }
    std::set<int> covered;
    for (const Walk& w : walks)
        if (!is_trivial(w)) covered.insert(w.seq.begin(), w.seq.end());
    std::vector<Walk> kept;
    std::set<int> trivial;
    for (Walk& w : walks) {
        if (w.seq.empty()) continue;
        if (is_trivial(w)) {
            if (covered.count(w.seq[0]) || !trivial.insert(w.seq[0]).second) continue;
            w.closed = true;
        }
        kept.push_back(std::move(w));
    }
    walks = std::move(kept);
}

std::vector<int> all_vertices(const std::vector<Walk>& walks) {
    std::set<int> s;
    for (const Walk& w : walks) s.insert(w.seq.begin(), w.seq.end());
    return {s.begin(), s.end()};
}

bool nil(const DpKey& k) { return k.a.kind == Grip::Kind::None && k.l < 0 && k.r < 0 && k.p < 0; }

bool on_path(const DpContext& ctx, int first, int last, int v) {
    for (int q = first; q <= last; ++q)
        if (ctx.face[q] == v) return true;
    return false;
}

// Replaces grip occurrences q1 (u1->v1) and q2 (u2->v2) by r1 (u1->v2) and r2 (u2->v1).
bool swap_grips(std::vector<Walk>& walks, const Walk& q1, const Walk& q2, const Walk& r1, const Walk& r2) {
    if (r1.seq.empty() || r2.seq.empty()) return false;
    auto o1 = occurrences(walks, q1);
    auto o2 = occurrences(walks, q2);
    if (o1.empty() || o2.empty()) return false;
    if (o1[0].walk != o2[0].walk) {
        auto [a, b] = cut_out(walks[o1[0].walk], o1[0], q1);
        auto [c, dd] = cut_out(walks[o2[0].walk], o2[0], q2);
        Walk n1 = concat({&a, &r1, &dd});
        Walk n2 = concat({&c, &r2, &b});
        int hi = std::max(o1[0].walk, o2[0].walk), lo = std::min(o1[0].walk, o2[0].walk);
        walks.erase(walks.begin() + hi);
        walks.erase(walks.begin() + lo);
        walks.push_back(n1);
        walks.push_back(n2);
    } else {
        // Both grips on one walk: A q1 M q2 D becomes A r1 D plus the cycle M r2.
        Walk w = walks[o1[0].walk];
        if (w.closed) return false;
        int p1 = o1[0].pos, p2 = o2[0].pos;
        if (p1 > p2) return false;
        const auto& s = w.seq;
        int e1 = p1 + static_cast<int>(q1.seq.size()) - 1;
        if (e1 > p2) return false;
        Walk a{{s.begin(), s.begin() + p1 + 1}, false};
        Walk m{{s.begin() + e1, s.begin() + p2 + 1}, false};
        Walk dd{{s.begin() + p2 + static_cast<int>(q2.seq.size()) - 1, s.end()}, false};
        Walk n1 = concat({&a, &r1, &dd});
        Walk cyc = concat({&m, &r2});
        cyc.closed = true;
        walks.erase(walks.begin() + o1[0].walk);
        walks.push_back(n1);
        walks.push_back(cyc);
    }
    return true;
}

}  // namespace

std::vector<Walk> grip_walks(const DpContext& ctx, const DpKey& key) {
    switch (key.a.kind) {
        case Grip::Kind::None:
            return {};
        case Grip::Kind::Pair:
            return {via(ctx, {key.a.first.first, key.l, key.r, key.a.first.second})};
        case Grip::Kind::TwoPairs:
            return {via(ctx, {key.a.first.first, key.l, key.a.first.second}),
                    via(ctx, {key.a.second.first, key.r, key.a.second.second})};
    }
    return {};
}

Compatibility check_compatible(const DpContext& ctx, const PartialSolution& s, const DpKey& key) {
    Compatibility c;
    const auto seen = visited(s);
    const auto hp = key.closed ? ctx.targets : ctx.hp_vertices(key.first, key.last);
    c.t1 = std::all_of(hp.begin(), hp.end(), [&](int x) { return seen.count(x) > 0; });

    auto grips = grip_walks(ctx, key);
    c.t2 = std::all_of(grips.begin(), grips.end(), [&](const Walk& g) { return contains(s.walks, g); });

    const auto& bd = key.boundary;
    auto in_bd = [&](int x) { return index_of(bd, x) >= 0; };
    int exempt = 0;
    c.t3 = true;
    for (const Walk& w : s.walks) {
        if (!is_open(w) || (in_bd(w.seq.front()) && in_bd(w.seq.back()))) continue;
        bool holds = std::any_of(grips.begin(), grips.end(), [&](const Walk& g) { return contains({w}, g); });
        if (!holds) c.t3 = false;
        ++exempt;
    }
    if (exempt > static_cast<int>(grips.size())) c.t3 = false;

    c.t4 = key.f_in.size() == bd.size() && key.f_out.size() == bd.size();
    if (c.t4) {
        std::vector<int> fin(bd.size(), 0), fout(bd.size(), 0);
        for (const Walk& w : s.walks) {
            if (!is_open(w)) continue;
            int a = index_of(bd, w.seq.front()), b = index_of(bd, w.seq.back());
            if (a >= 0) ++fout[a];
            if (b >= 0) ++fin[b];
        }
        c.t4 = fin == key.f_in && fout == key.f_out;
    }

    Dsu comp = components(s);
    c.t5 = key.block.size() == bd.size();
    for (std::size_t i = 0; i < bd.size() && c.t5; ++i)
        for (std::size_t j = i + 1; j < bd.size() && c.t5; ++j)
            if (key.block[i] == key.block[j] && comp.find(bd[i]) != comp.find(bd[j])) c.t5 = false;
    if (!key.closed)
        for (int z : hp) {
            if (!c.t5) break;
            if (!seen.count(z)) continue;
            bool anchored = std::any_of(bd.begin(), bd.end(),
                                        [&](int y) { return seen.count(y) && comp.find(y) == comp.find(z); });
            if (!anchored) c.t5 = false;
        }
    return c;
}

bool compatible(const DpContext& ctx, const PartialSolution& s, const DpKey& key) {
    return check_compatible(ctx, s, key).ok();
}

DpKey key_of(const DpContext& ctx, int first, int last, const PartialSolution& s) {
    DpKey k;
    k.first = first;
    k.last = last;
    k.closed = first == 0 && last == ctx.length() - 1;
    k.boundary = ctx.boundary(first, last);
    const auto& bd = k.boundary;
    k.f_in.assign(bd.size(), 0);
    k.f_out.assign(bd.size(), 0);
    for (const Walk& w : s.walks) {
        if (!is_open(w)) continue;
        int a = index_of(bd, w.seq.front()), b = index_of(bd, w.seq.back());
        if (a >= 0) ++k.f_out[a];
        if (b >= 0) ++k.f_in[b];
    }
    Dsu comp = components(s);
    std::map<int, int> label;
    for (int x : bd) {
        int r = comp.find(x);
        auto it = label.find(r);
        if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size())).first;
        k.block.push_back(it->second);
    }
    return k;
}

std::optional<PartialSolution> dp_merge(const DpContext& ctx, const PartialSolution& s1, const DpKey& k1,
                                        const PartialSolution& s2, const DpKey& k2, const DpKey& key) {
    if (k1.last != k2.first) throw std::invalid_argument("merged paths must share an endpoint");
    const int w = k1.last;
    const auto& bw = ctx.bags[w];

    // Phase 1: ends at the shared bag must pair up exactly where the bag is forgotten.
    for (int x : bw) {
        if (index_of(key.boundary, x) >= 0) continue;
        int i1 = index_of(k1.boundary, x), i2 = index_of(k2.boundary, x);
        if (i1 < 0 || i2 < 0) return std::nullopt;
        if (k1.f_in[i1] != k2.f_out[i2] || k2.f_in[i2] != k1.f_out[i1]) return std::nullopt;
    }
    PartialSolution s;
    s.walks = s1.walks;
    s.walks.insert(s.walks.end(), s2.walks.begin(), s2.walks.end());
    join_walks(s.walks, bw);

    // Phase 2: grip update.
    const int u = k1.first, v = k2.last;
    bool handled = false;
    if (nil(k1) && nil(k2) && nil(key)) handled = true;
    for (int side = 0; side < 2 && !handled; ++side) {
        const DpKey& empty = side == 0 ? k1 : k2;
        const DpKey& full = side == 0 ? k2 : k1;
        int lo = side == 0 ? k1.first : k2.first, hi = side == 0 ? k1.last : k2.last;
        int e1 = side == 0 ? u : w, e2 = side == 0 ? w : v;
        if (!nil(empty) || full.a != key.a || full.l != key.l || full.r != key.r || full.p != key.p) continue;
        if (key.a.kind == Grip::Kind::Pair) {
            auto [a0, a1] = key.a.first;
            bool clear = true;
            for (int x : {a0, a1})
                if (on_path(ctx, lo, hi, x) && x != ctx.face[e1] && x != ctx.face[e2]) clear = false;
            handled = clear;  // case (2)
        } else if (key.a.kind == Grip::Kind::TwoPairs) {
            handled = true;  // case (5)
        }
    }
    if (!handled && k1.a.kind == Grip::Kind::Pair && k1.a == k2.a && k2.a == key.a && k1.l == key.l &&
        k2.l == key.l && k1.r == key.r && k2.r == key.r && k1.p == key.p && k2.p == key.p) {
        // Case (3): both halves carry the same crossing grip; drop one copy.
        auto [us, vs] = key.a.first;
        bool crossing = (on_path(ctx, k1.first, k1.last, us) && on_path(ctx, k2.first, k2.last, vs)) ||
                        (on_path(ctx, k2.first, k2.last, us) && on_path(ctx, k1.first, k1.last, vs));
        if (crossing) {
            Walk q = grip_walks(ctx, key)[0];
            auto occ = occurrences(s.walks, q);
            if (occ.size() >= 2) {
                const Occurrence& o = occ.back();
                auto [c, dd] = cut_out(s.walks[o.walk], o, q);
                s.walks.erase(s.walks.begin() + o.walk);
                s.walks.push_back(c);
                s.walks.push_back(dd);
                join_walks(s.walks, {us, vs});
                handled = true;
            }
        }
    }
    if (!handled && k1.a.kind == Grip::Kind::Pair && k2.a.kind == Grip::Kind::Pair &&
        key.a.kind == Grip::Kind::Pair) {
        // Case (4): exchange the tails of the two grips.
        auto [u1, v1] = k1.a.first;
        auto [u2, v2] = k2.a.first;
        auto [us, vs] = key.a.first;
        bool ends = (us == u1 || us == u2) && (vs == v1 || vs == v2);
        const int l = key.l, r = key.r, p = key.p;
        bool way = (k1.l == l && k2.l == r && k2.r == r && k1.p == p && k2.p == p) ||
                   (k2.l == l && k1.l == r && k1.r == r && k1.p == p && k2.p == p) ||
                   (l == r && r == k1.p && k1.p == k2.p && k2.l == k2.r) ||
                   (l == r && r == k1.p && k1.p == k2.p && k1.l == k1.r);
        if (ends && way) {
            if (key.a == k1.a || key.a == k2.a) {
                handled = true;
            } else {
                Walk q1 = grip_walks(ctx, k1)[0], q2 = grip_walks(ctx, k2)[0];
                Walk r1, r2;
                if (us == u2 && vs == v1) {
                    r1 = via(ctx, {u1, k1.r, k2.l, v2});
                    r2 = via(ctx, {u2, p, k1.l, v1});
                    handled = swap_grips(s.walks, q1, q2, r1, r2);
                } else {
                    r1 = via(ctx, {u2, k2.r, k1.l, v1});
                    r2 = via(ctx, {u1, p, k2.l, v2});
                    handled = swap_grips(s.walks, q2, q1, r1, r2);
                }
            }
        }
    }
    if (!handled && k1.a.kind == Grip::Kind::Pair && k2.a.kind == Grip::Kind::Pair &&
        key.a.kind == Grip::Kind::TwoPairs) {
        // Case (6): two grips become one joined grip plus a broken pair.
        for (int side = 0; side < 2 && !handled; ++side) {
            const DpKey& ka = side == 0 ? k1 : k2;
            const DpKey& kb = side == 0 ? k2 : k1;
            auto [ua, va] = ka.a.first;
            auto [ub, vb] = kb.a.first;
            auto [up, vp] = key.a.first;
            auto [upp, vpp] = key.a.second;
            if (vp != va || upp != ub) continue;
            if (!(key.l == ka.l && ka.l == ka.r && key.r == kb.l && kb.l == kb.r && key.p == ka.p && ka.p == kb.p))
                continue;
            Walk qa = grip_walks(ctx, ka)[0], qb = grip_walks(ctx, kb)[0];
            Walk j1 = via(ctx, {ua, ka.l, kb.l, vb});
            Walk j2 = via(ctx, {up, ka.l, va});
            Walk j3 = via(ctx, {ub, kb.l, vpp});
            if (j1.seq.empty() || j2.seq.empty() || j3.seq.empty()) continue;
            auto oa = occurrences(s.walks, qa);
            auto ob = occurrences(s.walks, qb);
            if (oa.empty() || ob.empty() || oa[0].walk == ob[0].walk) continue;
            auto [a, b] = cut_out(s.walks[oa[0].walk], oa[0], qa);
            auto [c, dd] = cut_out(s.walks[ob[0].walk], ob[0], qb);
            int hi = std::max(oa[0].walk, ob[0].walk), lo = std::min(oa[0].walk, ob[0].walk);
            s.walks.erase(s.walks.begin() + hi);
            s.walks.erase(s.walks.begin() + lo);
            s.walks.push_back(concat({&a, &j1, &dd}));
            s.walks.push_back(concat({&j2, &b}));
            s.walks.push_back(concat({&c, &j3}));
            handled = true;
        }
    }
    if (!handled && key.a.kind == Grip::Kind::TwoPairs) {
        // Case (7): a broken grip absorbs a single grip from the other half.
        for (int side = 0; side < 2 && !handled; ++side) {
            const DpKey& kb = side == 0 ? k1 : k2;  // broken
            const DpKey& ks = side == 0 ? k2 : k1;  // single
            if (kb.a.kind != Grip::Kind::TwoPairs || ks.a.kind != Grip::Kind::Pair) continue;
            auto [u1, v1] = kb.a.first;
            auto [u1p, v1p] = kb.a.second;
            auto [u2, v2] = ks.a.first;
            if (key.a.first != std::pair{u1, v1} || key.a.second != std::pair{u2, v1p}) continue;
            if (!(key.l == kb.l && key.r == ks.l && ks.l == ks.r && key.p == kb.p && kb.p == ks.p)) continue;
            Walk qb = grip_walks(ctx, kb)[1], qs = grip_walks(ctx, ks)[0];
            Walk r1 = via(ctx, {u1p, kb.r, ks.r, v2});
            Walk r2 = via(ctx, {u2, ks.r, v1p});
            handled = swap_grips(s.walks, qb, qs, r1, r2);
        }
    }
    if (!handled) return std::nullopt;
    join_walks(s.walks, all_vertices(s.walks));

    // Phase 3: the result must match the requested key.
    if (!compatible(ctx, s, key)) return std::nullopt;
    s.cost = solution_cost(ctx, s);
    return s;
}

}  // namespace vatsp
