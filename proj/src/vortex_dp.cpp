#include "vatsp/vortex_dp.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

#include "vatsp/cutscan.hpp"

namespace vatsp {

namespace {

using i64 = std::int64_t;
constexpr i64 kInf = std::numeric_limits<i64>::max() / 4;
constexpr int kSlots = 28;
constexpr int kHubs = 3;

// A state gives every vertex of X = B_first ∪ B_last, followed by the outer
// vertices still open ("hubs"), a balance (out - in) and a block label; label 0
// marks a vertex of X not yet visited. Hubs only appear once they carry an arc,
// and are kept sorted.
struct Key {
    std::uint8_t n = 0, h = 0;  // slots in use, of which the last h are hubs
    std::array<std::int8_t, kSlots> bal{};
    std::array<std::uint8_t, kSlots> lab{};
    std::array<std::uint16_t, kHubs> hub{};

    int hub_slot(int v, int m) const {
        for (int q = 0; q < h; ++q)
            if (hub[q] == v) return m + q;
        return -1;
    }
    friend bool operator==(const Key& a, const Key& b) {
        return a.n == b.n && a.h == b.h && std::memcmp(a.bal.data(), b.bal.data(), a.n) == 0 &&
               std::memcmp(a.lab.data(), b.lab.data(), a.n) == 0 &&
               std::memcmp(a.hub.data(), b.hub.data(), a.h * sizeof(std::uint16_t)) == 0;
    }
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t x = 1469598103934665603ull ^ k.n ^ (std::uint64_t{k.h} << 8);
        auto mix = [&](std::uint64_t v) { x = (x ^ v) * 1099511628211ull; };
        for (int i = 0; i < k.n; ++i) mix(static_cast<std::uint8_t>(k.bal[i]) | k.lab[i] << 8);
        for (int i = 0; i < k.h; ++i) mix(k.hub[i]);
        return static_cast<std::size_t>(x ^ (x >> 29));
    }
};

void canonicalize(Key& k) {
    std::array<std::uint8_t, 2 * kSlots + 2> relabel{};
    int next = 0;
    for (int i = 0; i < k.n; ++i) {
        int l = k.lab[i];
        if (l == 0) continue;
        if (!relabel[l]) relabel[l] = static_cast<std::uint8_t>(++next);
        k.lab[i] = relabel[l];
    }
}

int top_label(const Key& k) {
    int t = 0;
    for (int i = 0; i < k.n; ++i) t = std::max<int>(t, k.lab[i]);
    return t;
}

enum class Kind : std::uint8_t { Start, Arc, Merge, Alias };

struct Entry {
    i64 cost = kInf;
    Kind kind = Kind::Start;
    int prev = -1;       // Arc, Alias: earlier entry of the same table
    int u = -1, v = -1;  // Arc: vertex ids
    int left = -1, right = -1;  // Merge: entries of [first, split] and [rsplit, last]
    int split = -1, rsplit = -1;
};

struct Table {
    int first = 0, last = 0;
    std::vector<int> x;  // sorted vertex ids
    std::vector<Key> states;
    std::vector<Entry> entries;
    std::unordered_map<Key, int, KeyHash> index;
    int m() const { return static_cast<int>(x.size()); }
    int pos(int v) const {
        auto it = std::lower_bound(x.begin(), x.end(), v);
        return it != x.end() && *it == v ? static_cast<int>(it - x.begin()) : -1;
    }
};

// Minimum-cost perfect assignment of rows to columns (square matrix).
i64 assignment_cost(const std::vector<i64>& c, int k) {
    if (k == 0) return 0;
    std::vector<i64> u(k + 1, 0), v(k + 1, 0);
    std::vector<int> p(k + 1, 0), way(k + 1, 0);
    for (int i = 1; i <= k; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<i64> minv(k + 1, kInf);
        std::vector<char> used(k + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            i64 delta = kInf;
            for (int j = 1; j <= k; ++j) {
                if (used[j]) continue;
                i64 cur = c[static_cast<std::size_t>(i0 - 1) * k + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= k; ++j)
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    i64 total = 0;
    for (int j = 1; j <= k; ++j) total += c[static_cast<std::size_t>(p[j] - 1) * k + (j - 1)];
    return total;
}

class Solver {
public:
    Solver(const DpContext& ctx, const VortexDpOptions& opts, bool prune) : ctx_(ctx), opts_(opts), prune_(prune) {
        n_ = ctx.graph.num_vertices();
        cap_ = opts.multiplicity_cap > 0 ? opts.multiplicity_cap : n_;
        cap_ = std::min(cap_, 120);
        max_hubs_ = std::clamp(opts.max_hubs, 0, kHubs);
        if (n_ >= 65536) max_hubs_ = 0;
        len_ = ctx.length();
        for (int q = 0; q < len_; ++q)
            for (int r = q; r < len_; ++r)
                if (static_cast<int>(ctx.boundary(q, r).size()) + max_hubs_ > kSlots)
                    throw DpGuardExceeded("vortex program: bags too wide");
        is_target_.assign(n_, 0);
        for (int v : ctx.targets) is_target_[v] = 1;
        std::vector<Rational> vals;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                if (a != b && ctx.d.reachable(a, b)) vals.push_back(ctx.d.dist(a, b));
        ScaledValues sv = scale_to_integers(vals);
        scale_ = sv.scale;
        w_.assign(static_cast<std::size_t>(n_) * n_, kInf);
        std::size_t c = 0;
        unit_ = kInf;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                if (a != b && ctx.d.reachable(a, b)) {
                    w_[static_cast<std::size_t>(a) * n_ + b] = sv.values[c++];
                    if (is_target_[a] && is_target_[b]) unit_ = std::min(unit_, weight(a, b));
                }
        if (unit_ == kInf) unit_ = 0;
        min_in_.assign(n_, 0);
        min_out_.assign(n_, 0);
        for (int v = 0; v < n_; ++v) {
            i64 a = kInf, b = kInf;
            for (int u = 0; u < n_; ++u) {
                if (u == v) continue;
                a = std::min(a, weight(u, v));
                b = std::min(b, weight(v, u));
            }
            min_in_[v] = a == kInf ? 0 : a;
            min_out_[v] = b == kInf ? 0 : b;
        }
        cycle_.assign(n_, kInf);
        for (int v = 0; v < n_; ++v)
            for (int u = 0; u < n_; ++u)
                if (u != v && weight(v, u) < kInf && weight(u, v) < kInf)
                    cycle_[v] = std::min(cycle_[v], weight(v, u) + weight(u, v));
        span_.assign(n_, {len_, -1});
        for (int q = 0; q < len_; ++q)
            for (int v : ctx.bags[q]) {
                auto& [lo, hi] = span_[v];
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
        for (int v = 0; v < n_; ++v)
            if (!is_target_[v] && (!ctx.graph.out_arcs(v).empty() || !ctx.graph.in_arcs(v).empty()))
                candidates_.push_back(v);
        tables_.resize(static_cast<std::size_t>(len_) * len_);
        ub_ = prune_ ? upper_bound() : kInf;
    }

    i64 weight(int u, int v) const { return w_[static_cast<std::size_t>(u) * n_ + v]; }
    i64 scale() const { return scale_; }
    i64 ub() const { return ub_; }
    std::size_t states() const { return total_states_; }
    std::size_t merge_pairs() const { return merge_pairs_; }
    Table& table(int i, int j) { return tables_[static_cast<std::size_t>(i) * len_ + j]; }

    void build_base(int k) {
        Table& t = table(k, k);
        init_table(t, k, k);
        Key start;
        start.n = static_cast<std::uint8_t>(t.m());
        insert(t, start, 0, Entry{});
        std::vector<std::pair<int, int>> arcs;
        for (int u : t.x)
            for (int v : t.x)
                if (u != v && weight(u, v) < kInf && canonical_bag(u, v) == k) arcs.emplace_back(u, v);
        // Excursions from the face vertex into the outer region.
        const int f = ctx_.face[k];
        if (max_hubs_ > 0 && t.pos(f) >= 0)
            for (int h : candidates_) {
                if (weight(f, h) < kInf) arcs.emplace_back(f, h);
                if (weight(h, f) < kInf) arcs.emplace_back(h, f);
            }
        close(t, arcs);
    }

    void build_interval(int i, int j) {
        Table& t = table(i, j);
        init_table(t, i, j);
        if (j == i + 1)
            merge(t, table(i, i), table(j, j), i, j);
        else
            for (int k = i + 1; k < j; ++k) merge(t, table(i, k), table(k, j), k, k);
        std::vector<std::pair<int, int>> arcs;
        int fi = ctx_.face[i], fj = ctx_.face[j];
        if (fi != fj && t.pos(fi) >= 0 && t.pos(fj) >= 0) {
            if (weight(fi, fj) < kInf) arcs.emplace_back(fi, fj);
            if (weight(fj, fi) < kInf) arcs.emplace_back(fj, fi);
        }
        close(t, arcs);
    }

    void build_all() {
        for (int k = 0; k < len_; ++k) build_base(k);
        for (int d = 1; d < len_; ++d)
            for (int i = 0; i + d < len_; ++i) build_interval(i, i + d);
    }

    // Root entry: balanced, everything visited, one block, no open hub.
    int root() {
        Table& t = table(0, len_ - 1);
        Key k;
        k.n = static_cast<std::uint8_t>(t.m());
        for (int i = 0; i < k.n; ++i) k.lab[i] = 1;
        auto it = t.index.find(k);
        return it == t.index.end() ? -1 : it->second;
    }

    // Arc multiset of an entry, as vertex pairs.
    std::vector<std::pair<int, int>> collect(int i, int j, int e) {
        std::vector<std::pair<int, int>> arcs;
        std::vector<std::tuple<int, int, int>> stack{{i, j, e}};
        while (!stack.empty()) {
            auto [a, b, id] = stack.back();
            stack.pop_back();
            const Entry& en = table(a, b).entries[id];
            if (en.kind == Kind::Arc) {
                arcs.emplace_back(en.u, en.v);
                stack.emplace_back(a, b, en.prev);
            } else if (en.kind == Kind::Alias) {
                stack.emplace_back(a, b, en.prev);
            } else if (en.kind == Kind::Merge) {
                stack.emplace_back(a, en.split, en.left);
                stack.emplace_back(en.rsplit, b, en.right);
            }
        }
        return arcs;
    }

private:
    int canonical_bag(int u, int v) const {
        const auto& su = span_[u];
        const auto& sv = span_[v];
        int lo = std::max(su.first, sv.first), hi = std::min(su.second, sv.second);
        return lo <= hi ? lo : -1;
    }

    void init_table(Table& t, int i, int j) {
        t.first = i;
        t.last = j;
        t.x = ctx_.boundary(i, j);
        outside_ = 0;
        outside_in_ = outside_out_ = 0;
        outside_list_.clear();
        lb_cache_.clear();
        for (int v : ctx_.targets) {
            const auto& [lo, hi] = span_[v];
            if (hi < i || lo > j) {
                ++outside_;
                outside_in_ += min_in_[v];
                outside_out_ += min_out_[v];
                outside_list_.push_back(v);
            }
        }
    }

    int vertex_at(const Key& k, const Table& t, int i) const { return i < t.m() ? t.x[i] : k.hub[i - t.m()]; }

    // The arcs still missing must leave every vertex short of out-arcs and enter
    // every vertex short of in-arcs (unvisited and unreached ones count on both
    // sides). Pairing those demands, a path between two of them costs at least
    // their distance and a cycle through one costs at least its shortest cycle,
    // so a cheapest assignment of leaving to entering demands is a lower bound.
    // Connecting the remaining pieces also needs one arc less than their number.
    i64 lower_bound(const Key& k, const Table& t) {
        auto [it, fresh] = lb_cache_.try_emplace(k, 0);
        if (!fresh) return it->second;
        const int m = t.m();
        std::vector<int> src = outside_list_, dst = outside_list_;
        int unvisited = 0;
        for (int i = 0; i < k.n; ++i) {
            int v = vertex_at(k, t, i);
            for (int b = 0; b < k.bal[i]; ++b) dst.push_back(v);
            for (int b = 0; b < -k.bal[i]; ++b) src.push_back(v);
            if (k.lab[i] == 0) {
                src.push_back(v);
                dst.push_back(v);
                if (i < m) ++unvisited;
            }
        }
        const int q = static_cast<int>(src.size());
        std::vector<i64> c(static_cast<std::size_t>(q) * q);
        const i64 big = ub_ < kInf ? ub_ + 1 : kInf / (4 * (q + 1));
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) {
                i64 w = src[a] == dst[b] ? cycle_[src[a]] : weight(src[a], dst[b]);
                c[static_cast<std::size_t>(a) * q + b] = std::min(w, big);
            }
        int pieces = top_label(k) + unvisited + outside_;
        it->second = std::max(assignment_cost(c, q), unit_ * (pieces - 1));
        return it->second;
    }

    // Returns the entry index when the state was added or improved, else -1.
    // Every hub that is balanced and attached to another open vertex may also be
    // closed; those variants are recorded as aliases of the same arcs.
    int insert(Table& t, const Key& k, i64 cost, const Entry& how) {
        int id = insert_one(t, k, cost, how);
        if (id < 0 || k.h == 0) return id;
        const int m = t.m(), h = k.h;
        for (int mask = 1; mask < (1 << h); ++mask) {
            Key v;
            v.n = static_cast<std::uint8_t>(m);
            std::copy_n(k.bal.begin(), m, v.bal.begin());
            std::copy_n(k.lab.begin(), m, v.lab.begin());
            bool ok = true;
            for (int q = 0; q < h && ok; ++q)
                if (mask >> q & 1) {
                    if (k.bal[m + q] != 0) ok = false;
                } else {
                    v.bal[v.n] = k.bal[m + q];
                    v.lab[v.n++] = k.lab[m + q];
                    v.hub[v.h++] = k.hub[q];
                }
            // A closed hub must share its block with something still open.
            for (int q = 0; q < h && ok; ++q)
                if (mask >> q & 1) ok = std::find(v.lab.begin(), v.lab.begin() + v.n, k.lab[m + q]) != v.lab.begin() + v.n;
            if (!ok) continue;
            canonicalize(v);
            Entry alias;
            alias.kind = Kind::Alias;
            alias.prev = id;
            insert_one(t, v, cost, alias);
        }
        return id;
    }

    int insert_one(Table& t, const Key& k, i64 cost, const Entry& how) {
        if (prune_ && ub_ < kInf && cost + lower_bound(k, t) > ub_) return -1;
        auto [it, fresh] = t.index.try_emplace(k, static_cast<int>(t.states.size()));
        if (!fresh) {
            Entry& cur = t.entries[it->second];
            if (cost >= cur.cost) return -1;
            cur = how;
            cur.cost = cost;
            return it->second;
        }
        if (++total_states_ > opts_.state_limit) throw DpGuardExceeded("vortex program state limit exceeded");
        t.states.push_back(k);
        Entry e = how;
        e.cost = cost;
        t.entries.push_back(e);
        return it->second;
    }

    // Slot of vertex v in the state, opening a hub slot when allowed; -1 if impossible.
    int slot(Key& k, const Table& t, int v) const {
        const int m = t.m();
        int p = t.pos(v);
        if (p >= 0) return p;
        int q = 0;
        while (q < k.h && k.hub[q] < v) ++q;
        if (q < k.h && k.hub[q] == v) return m + q;
        if (is_target_[v] || k.h >= max_hubs_) return -1;
        for (int r = k.h; r > q; --r) {
            k.hub[r] = k.hub[r - 1];
            k.bal[m + r] = k.bal[m + r - 1];
            k.lab[m + r] = k.lab[m + r - 1];
        }
        k.hub[q] = static_cast<std::uint16_t>(v);
        k.bal[m + q] = 0;
        k.lab[m + q] = 0;
        ++k.h;
        ++k.n;
        return m + q;
    }

    bool apply_arc(Key& k, const Table& t, int u, int v) const {
        if (slot(k, t, u) < 0 || slot(k, t, v) < 0) return false;
        int a = slot(k, t, u), b = slot(k, t, v);  // both open now, slots final
        if (k.bal[a] + 1 > cap_ || k.bal[b] - 1 < -cap_) return false;
        ++k.bal[a];
        --k.bal[b];
        int la = k.lab[a], lb = k.lab[b];
        if (la == 0 && lb == 0) {
            k.lab[a] = k.lab[b] = static_cast<std::uint8_t>(top_label(k) + 1);
        } else if (la == 0) {
            k.lab[a] = static_cast<std::uint8_t>(lb);
        } else if (lb == 0) {
            k.lab[b] = static_cast<std::uint8_t>(la);
        } else if (la != lb) {
            for (int i = 0; i < k.n; ++i)
                if (k.lab[i] == lb) k.lab[i] = static_cast<std::uint8_t>(la);
        }
        canonicalize(k);
        return true;
    }

    // Dijkstra over states: repeatedly adds any of `arcs`, or an arc between two
    // open hubs, to the cheapest state.
    void close(Table& t, const std::vector<std::pair<int, int>>& arcs) {
        using Item = std::pair<i64, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (int id = 0; id < static_cast<int>(t.entries.size()); ++id) pq.emplace(t.entries[id].cost, id);
        std::vector<std::pair<int, int>> all;
        while (!pq.empty()) {
            auto [c, id] = pq.top();
            pq.pop();
            if (c != t.entries[id].cost) continue;
            const Key base = t.states[id];
            all = arcs;
            for (int x = 0; x < base.h; ++x)
                for (int y = 0; y < base.h; ++y)
                    if (x != y && weight(base.hub[x], base.hub[y]) < kInf) all.emplace_back(base.hub[x], base.hub[y]);
            for (auto [u, v] : all) {
                Key k = base;
                if (!apply_arc(k, t, u, v)) continue;
                Entry how;
                how.kind = Kind::Arc;
                how.prev = id;
                how.u = u;
                how.v = v;
                i64 nc = c + weight(u, v);
                int nid = insert(t, k, nc, how);
                if (nid >= 0) pq.emplace(nc, nid);
            }
        }
    }

    void merge(Table& t, const Table& lt, const Table& rt, int split, int rsplit) {
        const int m = t.m(), ml = lt.m(), mr = rt.m();
        std::vector<int> u;
        std::set_union(lt.x.begin(), lt.x.end(), rt.x.begin(), rt.x.end(), std::back_inserter(u));
        const int mu = static_cast<int>(u.size());
        std::vector<int> pl(mu), pr(mu), px(mu), forgotten;
        for (int q = 0; q < mu; ++q) {
            pl[q] = lt.pos(u[q]);
            pr[q] = rt.pos(u[q]);
            px[q] = t.pos(u[q]);
            if (px[q] < 0) forgotten.push_back(q);
        }
        auto signature = [&](const Key& k, const std::vector<int>& where, int sign) {
            std::string sig;
            for (int q : forgotten) sig.push_back(static_cast<char>(sign * k.bal[where[q]]));
            return sig;
        };
        std::unordered_map<std::string, std::vector<int>> buckets;
        for (int r = 0; r < static_cast<int>(rt.states.size()); ++r) buckets[signature(rt.states[r], pr, 1)].push_back(r);
        for (auto& [sig, list] : buckets)
            std::stable_sort(list.begin(), list.end(),
                             [&](int a, int b) { return rt.entries[a].cost < rt.entries[b].cost; });
        // Part of the lower bound that no merged state can avoid.
        const i64 floor = std::max(outside_in_, outside_out_);

        std::array<int, 2 * kSlots + 2> parent{};
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (int l = 0; l < static_cast<int>(lt.states.size()); ++l) {
            const Key& kl = lt.states[l];
            auto bit = buckets.find(signature(kl, pl, -1));
            if (bit == buckets.end()) continue;
            const i64 cl = lt.entries[l].cost;
            const int nl = top_label(kl);
            for (int r : bit->second) {
                const Key& kr = rt.states[r];
                const i64 cost = cl + rt.entries[r].cost;
                if (prune_ && ub_ < kInf && cost + floor > ub_) break;
                ++merge_pairs_;
                Key k;
                k.n = static_cast<std::uint8_t>(m);
                // Hub union, sorted.
                {
                    int a = 0, b = 0;
                    bool fits = true;
                    while (a < kl.h || b < kr.h) {
                        int v;
                        if (b >= kr.h || (a < kl.h && kl.hub[a] < kr.hub[b])) v = kl.hub[a++];
                        else if (a >= kl.h || kr.hub[b] < kl.hub[a]) v = kr.hub[b++];
                        else v = kl.hub[a++], ++b;
                        if (k.h >= max_hubs_) {
                            fits = false;
                            break;
                        }
                        k.hub[k.h++] = static_cast<std::uint16_t>(v);
                    }
                    if (!fits) continue;
                    k.n = static_cast<std::uint8_t>(m + k.h);
                }
                const int nr = top_label(kr);
                std::iota(parent.begin(), parent.begin() + nl + nr + 1, 0);
                std::array<int, kSlots> rootlab{};
                bool ok = true;
                // Left label a stays a, right label b becomes nl + b.
                auto combine = [&](int la, int lb, int b, int out) {
                    if (la && lb) parent[find(la)] = find(nl + lb);
                    if (out < 0) {
                        if (b != 0 || (!la && !lb)) ok = false;
                        return;
                    }
                    if (b > cap_ || b < -cap_) ok = false;
                    k.bal[out] = static_cast<std::int8_t>(b);
                    rootlab[out] = la ? la : (lb ? nl + lb : 0);
                };
                for (int q = 0; q < mu && ok; ++q) {
                    int b = 0, la = 0, lb = 0;
                    if (pl[q] >= 0) {
                        b += kl.bal[pl[q]];
                        la = kl.lab[pl[q]];
                    }
                    if (pr[q] >= 0) {
                        b += kr.bal[pr[q]];
                        lb = kr.lab[pr[q]];
                    }
                    combine(la, lb, b, px[q]);
                }
                for (int q = 0; q < k.h && ok; ++q) {
                    int b = 0, la = 0, lb = 0;
                    int sl = kl.hub_slot(k.hub[q], ml), sr = kr.hub_slot(k.hub[q], mr);
                    if (sl >= 0) {
                        b += kl.bal[sl];
                        la = kl.lab[sl];
                    }
                    if (sr >= 0) {
                        b += kr.bal[sr];
                        lb = kr.lab[sr];
                    }
                    combine(la, lb, b, m + q);
                }
                if (!ok) continue;
                // Every block must still reach an open vertex.
                std::array<char, 2 * kSlots + 2> anchored{};
                for (int q = 0; q < k.n; ++q)
                    if (rootlab[q]) {
                        int root = find(rootlab[q]);
                        anchored[root] = 1;
                        k.lab[q] = static_cast<std::uint8_t>(root);
                    }
                for (int a = 1; a <= nl + nr && ok; ++a)
                    if (!anchored[find(a)]) ok = false;
                if (!ok) continue;
                canonicalize(k);
                Entry how;
                how.kind = Kind::Merge;
                how.left = l;
                how.right = r;
                how.split = split;
                how.rsplit = rsplit;
                insert(t, k, cost, how);
            }
        }
    }

    i64 tour_cost(const std::vector<int>& order) const {
        i64 c = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            i64 w = weight(order[i], order[(i + 1) % order.size()]);
            if (w >= kInf) return kInf;
            c += w;
        }
        return c;
    }

    // Nearest neighbour from every start, improved by moving single vertices.
    i64 upper_bound() const {
        const auto& tg = ctx_.targets;
        if (tg.size() <= 1) return 0;
        i64 best = kInf;
        for (int start : tg) {
            std::vector<int> order{start};
            std::vector<char> used(n_, 0);
            used[start] = 1;
            for (std::size_t step = 1; step < tg.size(); ++step) {
                int nxt = -1;
                for (int v : tg)
                    if (!used[v] && weight(order.back(), v) < kInf &&
                        (nxt < 0 || weight(order.back(), v) < weight(order.back(), nxt)))
                        nxt = v;
                if (nxt < 0) break;
                used[nxt] = 1;
                order.push_back(nxt);
            }
            if (order.size() != tg.size()) continue;
            i64 cur = tour_cost(order);
            for (bool improved = cur < kInf; improved;) {
                improved = false;
                for (std::size_t a = 0; a < order.size() && !improved; ++a)
                    for (std::size_t b = 0; b < order.size() && !improved; ++b) {
                        if (a == b) continue;
                        auto cand = order;
                        int v = cand[a];
                        cand.erase(cand.begin() + a);
                        cand.insert(cand.begin() + b, v);
                        i64 c = tour_cost(cand);
                        if (c < cur) {
                            cur = c;
                            order = std::move(cand);
                            improved = true;
                        }
                    }
            }
            best = std::min(best, cur);
        }
        return best;
    }

    const DpContext& ctx_;
    VortexDpOptions opts_;
    bool prune_;
    int n_ = 0, cap_ = 0, len_ = 0, outside_ = 0, max_hubs_ = 0;
    i64 outside_in_ = 0, outside_out_ = 0;
    std::vector<i64> min_in_, min_out_;  // cheapest arc entering / leaving every vertex
    std::vector<i64> cycle_;             // shortest closed walk through every vertex
    std::vector<int> outside_list_;      // targets in no bag of the current table
    std::unordered_map<Key, i64, KeyHash> lb_cache_;
    std::vector<char> is_target_;
    std::vector<int> candidates_;
    std::vector<i64> w_;
    i64 scale_ = 1, unit_ = 0, ub_ = kInf;
    std::vector<std::pair<int, int>> span_;  // bag range of every vertex
    std::vector<Table> tables_;
    std::size_t total_states_ = 0, merge_pairs_ = 0;
};

// Open walks from surplus vertices first, then closed walks over what is left.
std::vector<Walk> decompose(std::vector<std::pair<int, int>> arcs) {
    std::sort(arcs.begin(), arcs.end());
    std::map<int, std::vector<int>> out;  // vertex -> arc indices, consumed from the back
    std::map<int, int> balance;
    for (int i = static_cast<int>(arcs.size()) - 1; i >= 0; --i) out[arcs[i].first].push_back(i);
    for (auto [u, v] : arcs) {
        ++balance[u];
        --balance[v];
    }
    auto follow = [&](int start, bool closed) {
        Walk w;
        w.seq = {start};
        int cur = start;
        while (!out[cur].empty()) {
            int a = out[cur].back();
            out[cur].pop_back();
            cur = arcs[a].second;
            w.seq.push_back(cur);
            if (closed && cur == start) break;
        }
        w.closed = closed;
        return w;
    };
    std::vector<Walk> walks;
    for (auto& [v, b] : balance)
        while (b > 0) {
            Walk w = follow(v, false);
            --b;
            --balance[w.seq.back()];
            walks.push_back(std::move(w));
        }
    for (auto& [v, list] : out)
        while (!list.empty()) walks.push_back(follow(v, true));
    return walks;
}

DpKey key_of_state(const DpContext& ctx, const Table& t, const Key& s) {
    const int m = t.m();
    DpKey k;
    k.first = t.first;
    k.last = t.last;
    k.closed = t.first == 0 && t.last == ctx.length() - 1;
    k.boundary = t.x;
    int fresh = 1000;
    std::map<int, int> relabel;
    for (int i = 0; i < m; ++i) {
        k.f_out.push_back(std::max<int>(s.bal[i], 0));
        k.f_in.push_back(std::max<int>(-s.bal[i], 0));
        int lab = s.lab[i] == 0 ? fresh++ : s.lab[i];
        auto it = relabel.find(lab);
        if (it == relabel.end()) it = relabel.emplace(lab, static_cast<int>(relabel.size())).first;
        k.block.push_back(it->second);
    }
    return k;
}

const Key& key_at(const Table& t, int id) { return t.states[id]; }

PartialSolution solution_of(const DpContext& ctx, Solver& sv, const Table& t, int id) {
    PartialSolution p;
    p.walks = decompose(sv.collect(t.first, t.last, id));
    std::vector<char> seen(ctx.graph.num_vertices(), 0);
    for (const Walk& w : p.walks)
        for (int v : w.seq) seen[v] = 1;
    for (int v : t.x)
        if (!seen[v]) p.walks.push_back(Walk{{v}, true});
    p.cost = solution_cost(ctx, p);
    return p;
}

// Entries without open hubs must satisfy every condition of their key, and merged
// ones must be reproduced by dp_merge from their two parts. Entries with an open
// hub have walk ends outside the boundary; they are checked for coverage and cost.
void self_check(const DpContext& ctx, Solver& sv, VortexDpStats& stats) {
    const int len = ctx.length();
    for (int i = 0; i < len; ++i)
        for (int j = i; j < len; ++j) {
            Table& t = sv.table(i, j);
            for (int id = 0; id < static_cast<int>(t.states.size()); ++id) {
                ++stats.checked;
                const Entry& e = t.entries[id];
                const Key& key = key_at(t, id);
                PartialSolution s = solution_of(ctx, sv, t, id);
                DpKey dk = key_of_state(ctx, t, key);
                Compatibility c = check_compatible(ctx, s, dk);
                bool good = s.cost == Rational(e.cost, sv.scale()) && (key.h == 0 ? c.ok() : c.t1);
                if (good && key.h == 0 && e.kind == Kind::Merge && e.split == e.rsplit) {
                    Table& lt = sv.table(i, e.split);
                    Table& rt = sv.table(e.rsplit, j);
                    const Key &kl = key_at(lt, e.left), &kr = key_at(rt, e.right);
                    if (kl.h == 0 && kr.h == 0) {
                        auto merged = dp_merge(ctx, solution_of(ctx, sv, lt, e.left), key_of_state(ctx, lt, kl),
                                               solution_of(ctx, sv, rt, e.right), key_of_state(ctx, rt, kr), dk);
                        good = merged && merged->cost == s.cost;
                    }
                }
                if (!good) ++stats.check_failures;
            }
        }
}

}  // namespace

std::vector<DpTableEntry> dp_init(const DpContext& ctx, const VortexDpOptions& opts) {
    Solver sv(ctx, opts, false);
    const int len = ctx.length();
    for (int k = 0; k < len; ++k) sv.build_base(k);
    for (int i = 0; i + 1 < len; ++i) sv.build_interval(i, i + 1);
    std::vector<DpTableEntry> out;
    for (int i = 0; i < len; ++i)
        for (int j = i; j <= std::min(i + 1, len - 1); ++j) {
            Table& t = sv.table(i, j);
            for (int id = 0; id < static_cast<int>(t.states.size()); ++id)
                out.push_back({key_of_state(ctx, t, key_at(t, id)), solution_of(ctx, sv, t, id)});
        }
    return out;
}

VortexWalkResult solve_vortex_context(const DpContext& ctx, const VortexDpOptions& opts) {
    VortexWalkResult res;
    if (ctx.targets.size() <= 1) {
        res.feasible = true;
        res.cost = Rational(0);
        if (!ctx.targets.empty()) res.walk = Walk{{ctx.targets[0]}, true};
        return res;
    }
    auto run = [&](bool prune) {
        auto sv = std::make_unique<Solver>(ctx, opts, prune);
        sv->build_all();
        return sv;
    };
    auto sv = run(opts.prune);
    int root = sv->root();
    if (opts.prune && (root < 0 || sv->table(0, ctx.length() - 1).entries[root].cost > sv->ub())) {
        res.stats.full_rerun = true;
        res.stats.states += sv->states();
        res.stats.merge_pairs += sv->merge_pairs();
        sv = run(false);
        root = sv->root();
    }
    res.stats.states += sv->states();
    res.stats.merge_pairs += sv->merge_pairs();
    if (opts.self_check) self_check(ctx, *sv, res.stats);
    if (root < 0) return res;
    const int last = ctx.length() - 1;
    auto arcs = sv->collect(0, last, root);
    Digraph mg(ctx.graph.num_vertices());
    for (auto [u, v] : arcs) mg.add_arc(u, v, ctx.d.dist(u, v));
    Walk tour = euler_closed_walk(mg).walk;
    res.walk = expand_walk(ctx.d, tour);
    res.walk.closed = true;
    res.cost = Rational(sv->table(0, last).entries[root].cost, sv->scale());
    res.feasible = true;
    return res;
}

namespace {

Digraph without(const NearlyEmbeddableInstance& inst, const std::vector<int>& dropped) {
    std::vector<char> gone(inst.num_vertices(), 0);
    for (int v : dropped) gone[v] = 1;
    std::vector<char> keep(inst.graph.num_arcs(), 1);
    for (int i = 0; i < inst.graph.num_arcs(); ++i) {
        const Arc& a = inst.graph.arc(i);
        if (gone[a.src] || gone[a.dst]) keep[i] = 0;
    }
    return inst.graph.filter_arcs(keep);
}

void accumulate(VortexDpStats& into, const VortexDpStats& s) {
    into.states += s.states;
    into.merge_pairs += s.merge_pairs;
    into.full_rerun = into.full_rerun || s.full_rerun;
    into.checked += s.checked;
    into.check_failures += s.check_failures;
}

}  // namespace

VortexWalkResult optimal_vortex_walk(const NearlyEmbeddableInstance& inst, const VortexDpOptions& opts) {
    Digraph g = without(inst, inst.apices);
    DpContext ctx = make_context(inst, {}, &g);
    return solve_vortex_context(ctx, opts);
}

VortexWalkResult optimal_vortex_walk_with_apices(const NearlyEmbeddableInstance& inst, const VortexDpOptions& opts) {
    const int a = static_cast<int>(inst.apices.size());
    if (a > 16) throw DpGuardExceeded("too many apices to enumerate");
    VortexWalkResult best;
    VortexDpStats total;
    for (std::uint32_t mask = 0; mask < (1u << a); ++mask) {
        std::vector<int> chosen, dropped;
        for (int i = 0; i < a; ++i) (mask >> i & 1 ? chosen : dropped).push_back(inst.apices[i]);
        Digraph g = without(inst, dropped);
        DpContext ctx = make_context(inst, chosen, &g);
        VortexWalkResult r = solve_vortex_context(ctx, opts);
        accumulate(total, r.stats);
        if (r.feasible && (!best.feasible || r.cost < best.cost)) {
            best = std::move(r);
            best.apex_subset = chosen;
        }
    }
    best.stats = total;
    return best;
}

VortexWalkResult oracle_vortex_walk(const NearlyEmbeddableInstance& inst, int guard) {
    if (inst.vortices.empty()) throw std::invalid_argument("instance has no vortex");
    std::vector<int> targets = inst.vortices[0].vertices;
    std::sort(targets.begin(), targets.end());
    OracleResult o = oracle_closed_walk(inst.graph, targets, guard);
    VortexWalkResult res;
    res.feasible = o.feasible;
    res.cost = o.cost;
    res.walk = o.walk;
    return res;
}

}  // namespace vatsp
