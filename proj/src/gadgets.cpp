#include "vatsp/gadgets.hpp"

#include <algorithm>
#include <array>

namespace vatsp {

int PathDecomposition::width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return static_cast<int>(w) - 1;
}

bool valid_path_decomposition(const Digraph& g, const std::vector<int>& vertices, const PathDecomposition& pd) {
    const int n = g.num_vertices();
    std::vector<char> want(n, 0);
    for (int v : vertices) want[v] = 1;
    std::vector<int> first(n, -1), last(n, -1), count(n, 0);
    for (int i = 0; i < static_cast<int>(pd.bags.size()); ++i)
        for (int v : pd.bags[i]) {
            if (v < 0 || v >= n || !want[v]) return false;
            if (first[v] < 0) first[v] = i;
            last[v] = i;
            ++count[v];
        }
    for (int v : vertices)
        if (first[v] < 0 || count[v] != last[v] - first[v] + 1) return false;
    for (const Arc& a : g.arcs()) {
        if (!want[a.src] || !want[a.dst] || a.src == a.dst) continue;
        // Contiguous runs intersect iff some bag holds both ends.
        if (std::max(first[a.src], first[a.dst]) > std::min(last[a.src], last[a.dst])) return false;
    }
    return true;
}

HsCopy add_hs(Digraph& g, int s, int a_in, int a_out, int b_in, int b_out) {
    if (s < 1) throw std::invalid_argument("H_s needs s >= 1");
    HsCopy c;
    c.blocks.resize(s);
    for (int j = 0; j < s; ++j)
        for (int i = 0; i < 6; ++i) c.blocks[j][i] = g.add_vertex();
    auto arc = [&](int u, int v) { g.add_arc(u, v, Rational(1)); };
    arc(b_in, c.blocks[0][0]);
    arc(c.blocks[s - 1][5], b_out);
    for (int j = 0; j < s; ++j) {
        const auto& v = c.blocks[j];
        // Chain v1..v6 and the reversed loop v3 v2 v1 v6 v5 v4.
        for (int i = 0; i < 5; ++i) arc(v[i], v[i + 1]);
        arc(v[2], v[1]);
        arc(v[1], v[0]);
        arc(v[0], v[5]);
        arc(v[5], v[4]);
        arc(v[4], v[3]);
        if (j + 1 < s) arc(v[5], c.blocks[j + 1][0]);
        arc(a_in, v[2]);
        arc(v[3], a_out);
    }
    return c;
}

PathDecomposition hs_decomposition(const HsCopy& c) {
    PathDecomposition pd;
    for (std::size_t j = 0; j < c.blocks.size(); ++j) {
        std::vector<int> bag(c.blocks[j].begin(), c.blocks[j].end());
        if (j + 1 < c.blocks.size()) bag.push_back(c.blocks[j + 1][0]);
        pd.bags.push_back(std::move(bag));
    }
    return pd;
}

Gadget build_gadget_Hs(int s) {
    Gadget h;
    h.graph = Digraph(4);
    h.a_in = 0;
    h.a_out = 1;
    h.b_in = 2;
    h.b_out = 3;
    h.externals = {0, 1, 2, 3};
    HsCopy c = add_hs(h.graph, s, h.a_in, h.a_out, h.b_in, h.b_out);
    for (const auto& b : c.blocks) h.internals.insert(h.internals.end(), b.begin(), b.end());
    h.internal_pd = hs_decomposition(c);
    return h;
}

Gadget build_gadget_HX(const std::vector<std::int64_t>& xs) {
    if (xs.empty()) throw std::invalid_argument("H_X needs a nonempty set");
    Gadget h;
    h.graph = Digraph(4);
    h.a_in = 0;
    h.a_out = 1;
    h.b_in = 2;  // c_in
    h.b_out = 3;  // c_out
    h.externals = {0, 1, 2, 3};
    const int v = h.graph.add_vertex();
    h.graph.add_arc(h.b_in, v, Rational(1));
    h.internals.push_back(v);
    for (std::int64_t x : xs) {
        if (x < 1) throw std::invalid_argument("H_X needs positive integers");
        HsCopy c = add_hs(h.graph, static_cast<int>(x), h.a_in, h.a_out, v, h.b_out);
        for (const auto& b : c.blocks) h.internals.insert(h.internals.end(), b.begin(), b.end());
        for (auto bag : hs_decomposition(c).bags) {
            bag.push_back(v);
            h.internal_pd.bags.push_back(std::move(bag));
        }
    }
    return h;
}

namespace {

class CoverSearch {
public:
    CoverSearch(const Digraph& g, const std::vector<char>& inner, const std::vector<char>& src,
                const std::vector<char>& snk, const std::function<bool(const std::vector<std::vector<int>>&)>& visit,
                std::uint64_t limit)
        : g_(g), inner_(inner), src_(src), snk_(snk), visit_(visit), limit_(limit), used_(g.num_vertices(), 0) {}

    void run() { recurse(); }

private:
    void tick() {
        if (++nodes_ > limit_) throw SearchGuardExceeded("path-cover search exceeded its node limit");
    }

    // Partial paths from u: backwards to a source or forwards to a sink.
    void extend(int u, bool forward, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
        tick();
        const auto& arcs = forward ? g_.out_arcs(u) : g_.in_arcs(u);
        for (int a : arcs) {
            int w = forward ? g_.arc(a).dst : g_.arc(a).src;
            if (inner_[w]) {
                if (used_[w]) continue;
                used_[w] = 1;
                cur.push_back(w);
                extend(w, forward, cur, out);
                cur.pop_back();
                used_[w] = 0;
            } else if (forward ? snk_[w] : src_[w]) {
                cur.push_back(w);
                out.push_back(cur);
                cur.pop_back();
            }
        }
    }

    void recurse() {
        if (stop_) return;
        tick();
        int u = -1;
        for (int v = 0; v < g_.num_vertices() && u < 0; ++v)
            if (inner_[v] && !used_[v]) u = v;
        if (u < 0) {
            stop_ = visit_(paths_);
            return;
        }
        used_[u] = 1;
        std::vector<std::vector<int>> backs, fronts;
        std::vector<int> cur;
        extend(u, false, cur, backs);
        for (const auto& b : backs) {
            for (std::size_t i = 0; i + 1 < b.size(); ++i) used_[b[i]] = 1;
            fronts.clear();
            extend(u, true, cur, fronts);
            for (const auto& f : fronts) {
                std::vector<int> path(b.rbegin(), b.rend());
                path.push_back(u);
                path.insert(path.end(), f.begin(), f.end());
                for (std::size_t i = 0; i + 1 < f.size(); ++i) used_[f[i]] = 1;
                paths_.push_back(std::move(path));
                recurse();
                paths_.pop_back();
                if (stop_) return;
                for (std::size_t i = 0; i + 1 < f.size(); ++i) used_[f[i]] = 0;
            }
            for (std::size_t i = 0; i + 1 < b.size(); ++i) used_[b[i]] = 0;
        }
        used_[u] = 0;
    }

    const Digraph& g_;
    const std::vector<char>& inner_;
    const std::vector<char>& src_;
    const std::vector<char>& snk_;
    const std::function<bool(const std::vector<std::vector<int>>&)>& visit_;
    std::uint64_t limit_, nodes_ = 0;
    std::vector<char> used_;
    std::vector<std::vector<int>> paths_;
    bool stop_ = false;
};

}  // namespace

void for_each_path_cover(const Digraph& g, const std::vector<char>& inner, const std::vector<char>& is_source,
                         const std::vector<char>& is_sink,
                         const std::function<bool(const std::vector<std::vector<int>>&)>& visit, std::uint64_t limit) {
    CoverSearch(g, inner, is_source, is_sink, visit, limit).run();
}

std::set<PathType> enumerate_gadget_types(const Gadget& h, std::uint64_t limit) {
    const int n = h.graph.num_vertices();
    std::vector<char> inner(n, 0), src(n, 0), snk(n, 0);
    for (int v : h.internals) inner[v] = 1;
    for (int v : h.externals) {
        if (!h.graph.in_arcs(v).empty() && !h.graph.out_arcs(v).empty())
            throw std::invalid_argument("external vertex with both in- and out-arcs");
        src[v] = h.graph.in_arcs(v).empty();
        snk[v] = h.graph.out_arcs(v).empty();
    }
    std::set<PathType> types;
    for_each_path_cover(
        h.graph, inner, src, snk,
        [&](const std::vector<std::vector<int>>& paths) {
            PathType t;
            for (const auto& p : paths) t.emplace_back(p.front(), p.back());
            std::sort(t.begin(), t.end());
            types.insert(std::move(t));
            return false;
        },
        limit);
    return types;
}

}  // namespace vatsp
