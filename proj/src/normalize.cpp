#include "vatsp/normalize.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vatsp {

Walk NormalizationCertificate::pull_back(const Walk& w) const {
    Walk out;
    out.closed = w.closed;
    for (int v : w.seq) {
        int o = new_to_old.at(v);
        if (out.seq.empty() || out.seq.back() != o) out.seq.push_back(o);
    }
    if (w.closed && out.seq.size() > 1 && out.seq.front() != out.seq.back()) out.seq.push_back(out.seq.front());
    return out;
}

std::vector<int> NormalizationCertificate::pull_back_set(const std::vector<int>& vs) const {
    std::set<int> s;
    for (int v : vs) s.insert(new_to_old.at(v));
    return {s.begin(), s.end()};
}

NormalizationCertificate compose(const NormalizationCertificate& first, const NormalizationCertificate& second) {
    NormalizationCertificate c;
    c.new_to_old.resize(second.new_to_old.size());
    for (std::size_t v = 0; v < c.new_to_old.size(); ++v) c.new_to_old[v] = first.new_to_old[second.new_to_old[v]];
    c.old_to_new.resize(first.old_to_new.size());
    for (std::size_t v = 0; v < c.old_to_new.size(); ++v) c.old_to_new[v] = second.old_to_new[first.old_to_new[v]];
    c.width_before = first.width_before;
    c.width_after = second.width_after;
    c.width_overflow = first.width_overflow || second.width_overflow;
    return c;
}

namespace {

// Mutable copy of an instance's graph, embedding and vertex provenance.
struct Work {
    std::vector<Arc> arcs;
    std::vector<char> planar;
    Rotation rot;
    std::vector<std::string> labels;
    std::vector<int> origin;

    explicit Work(const NearlyEmbeddableInstance& inst)
        : arcs(inst.graph.arcs()), planar(inst.planar), rot(inst.rotation) {
        for (int v = 0; v < inst.num_vertices(); ++v) {
            labels.push_back(inst.graph.label(v));
            origin.push_back(v);
        }
    }

    int size() const { return static_cast<int>(planar.size()); }

    int add_vertex(int copy_of, bool is_planar) {
        planar.push_back(is_planar);
        rot.emplace_back();
        labels.emplace_back();
        origin.push_back(origin[copy_of]);
        return size() - 1;
    }

    void link(int u, int v) {
        arcs.push_back({u, v, Rational(0)});
        arcs.push_back({v, u, Rational(0)});
    }

    // Re-attaches every arc between v and x to v2 instead of v.
    void move_arcs(int v, int x, int v2) {
        for (Arc& a : arcs) {
            if (a.src == v && a.dst == x) a.src = v2;
            else if (a.src == x && a.dst == v) a.dst = v2;
        }
    }

    void replace_nbr(int v, int old_nbr, int new_nbr) {
        for (int& u : rot[v])
            if (u == old_nbr) u = new_nbr;
    }

    Digraph build() const {
        Digraph g(size());
        for (int v = 0; v < size(); ++v)
            if (!labels[v].empty()) g.set_label(v, labels[v]);
        for (const Arc& a : arcs) g.add_arc(a.src, a.dst, a.cost);
        return g;
    }
};

NearlyEmbeddableInstance finish(const NearlyEmbeddableInstance& in, const Work& w, std::vector<Vortex> vortices,
                                NormalizationCertificate& cert) {
    NearlyEmbeddableInstance out;
    out.graph = w.build();
    out.planar = w.planar;
    out.rotation = w.rot;
    out.vortices = std::move(vortices);
    out.apices = in.apices;
    out.params = in.params;
    cert.new_to_old = w.origin;
    cert.old_to_new.resize(in.num_vertices());
    for (int v = 0; v < in.num_vertices(); ++v) cert.old_to_new[v] = v;
    cert.width_before = in.width();
    cert.width_after = out.width();
    cert.width_overflow = cert.width_after > in.params.p;
    out.params.p = std::max(in.params.p, cert.width_after);
    return out;
}

// Phase 1: every later occurrence of a repeated face vertex becomes a copy joined to
// the original by zero-cost rungs. Face edges traversed twice are duplicated, edges
// traversed once follow their face corner.
void split_repeated(Work& w, Vortex& h) {
    const int L = static_cast<int>(h.face.size());
    if (L <= 2) return;
    const std::vector<int> face = h.face;
    std::vector<int> at(L);
    std::set<int> seen;
    bool repeated = false;
    for (int q = 0; q < L; ++q) {
        int v = face[q];
        if (seen.insert(v).second) {
            at[q] = v;
        } else {
            at[q] = w.add_vertex(v, true);
            repeated = true;
        }
    }
    if (!repeated) return;
    auto prev = [&](int q) { return (q + L - 1) % L; };
    auto next = [&](int q) { return (q + 1) % L; };

    struct Version {
        int a, b, na, nb;
    };
    std::map<std::pair<int, int>, std::vector<Version>> versions;
    for (int q = 0; q < L; ++q) {
        int a = face[q], b = face[next(q)], na = at[q], nb = at[next(q)];
        auto& vs = versions[std::minmax(a, b)];
        bool same = false;
        for (const Version& x : vs)
            if (std::minmax(x.na, x.nb) == std::minmax(na, nb)) same = true;
        if (!same) vs.push_back({a, b, na, nb});
    }
    std::vector<Arc> arcs;
    for (const Arc& a : w.arcs) {
        auto it = versions.find(std::minmax(a.src, a.dst));
        if (it == versions.end()) {
            arcs.push_back(a);
            continue;
        }
        for (const Version& x : it->second) {
            auto map = [&](int v) { return v == x.a ? x.na : x.nb; };
            arcs.push_back({map(a.src), map(a.dst), a.cost});
        }
    }
    w.arcs = std::move(arcs);

    const Rotation old = w.rot;
    struct Side {
        bool set = false;
        int owner = -1, nbr = -1;
    };
    for (int v : seen) {
        const auto& r = old[v];
        const int d = static_cast<int>(r.size());
        if (d == 0) continue;
        std::vector<Side> left(d), right(d);
        for (int q = 0; q < L; ++q) {
            if (face[q] != v) continue;
            int i = -1;
            for (int j = 0; j < d; ++j)
                if (r[j] == face[prev(q)] && r[(j + 1) % d] == face[next(q)]) i = j;
            if (i < 0) throw TransformError("face corner missing from the rotation");
            right[i] = {true, at[q], at[prev(q)]};
            left[(i + 1) % d] = {true, at[q], at[next(q)]};
        }
        std::vector<int> nr;
        auto emit = [&](int u) {
            if (nr.empty() || nr.back() != u) nr.push_back(u);
        };
        for (int i = 0; i < d; ++i) {
            if (!left[i].set && !right[i].set) {
                emit(r[i]);
            } else {
                if (left[i].set && left[i].owner == v) emit(left[i].nbr);
                if (right[i].set && right[i].owner == v) emit(right[i].nbr);
            }
            if (right[i].set && right[i].owner != v) emit(right[i].owner);
        }
        if (nr.size() > 1 && nr.front() == nr.back()) nr.pop_back();
        w.rot[v] = nr;
    }
    for (int q = 0; q < L; ++q) {
        if (at[q] == face[q]) continue;
        w.rot[at[q]] = {at[prev(q)], at[next(q)], face[q]};
        w.link(at[q], face[q]);
        h.bags[q].members.push_back(at[q]);
        h.bags[q].anchor = at[q];
        h.vertices.push_back(at[q]);
    }
    h.face = at;
}

// Phase 2: a face vertex with m >= 2 planar edges off the face becomes a chain of m
// face vertices joined by zero-cost links, each keeping one of those edges.
void split_chains(Work& w, Vortex& h) {
    const int L = static_cast<int>(h.face.size());
    if (L <= 2) return;
    const std::vector<int> face = h.face;
    const std::vector<Bag> bags = h.bags;
    std::vector<int> nf;
    std::vector<Bag> nb;
    for (int k = 0; k < L; ++k) {
        const int v = face[k];
        const int left = k == 0 ? face[L - 1] : nf.back();
        const int right = face[(k + 1) % L];
        nf.push_back(v);
        nb.push_back(bags[k]);
        const auto r = w.rot[v];
        const int d = static_cast<int>(r.size());
        const int m = d - 2;
        if (m < 2) continue;
        int i = rot_index(w.rot, v, left);
        if (i < 0 || r[(i + 1) % d] != right) throw TransformError("face is not traced around a face vertex");
        std::vector<int> o(m + 1);
        for (int t = 1; t <= m; ++t) o[t] = r[(i + 1 + t) % d];
        std::vector<int> c(m + 1);
        c[1] = v;
        for (int j = 2; j <= m; ++j) c[j] = w.add_vertex(v, true);
        for (int j = 2; j <= m; ++j) {
            int x = o[m + 1 - j];
            w.move_arcs(v, x, c[j]);
            w.replace_nbr(x, v, c[j]);
        }
        w.move_arcs(v, right, c[m]);
        w.replace_nbr(right, v, c[m]);
        for (int j = 1; j <= m; ++j) {
            int p = j == 1 ? left : c[j - 1];
            int n = j == m ? right : c[j + 1];
            w.rot[c[j]] = {p, n, o[m + 1 - j]};
            if (j > 1) w.link(c[j - 1], c[j]);
        }
        std::vector<int> shared;
        if (k + 1 < L)
            for (int x : bags[k].members)
                if (std::find(bags[k + 1].members.begin(), bags[k + 1].members.end(), x) != bags[k + 1].members.end())
                    shared.push_back(x);
        for (int j = 2; j <= m; ++j) {
            Bag b;
            b.anchor = c[j];
            b.members = shared;
            b.members.push_back(c[j]);
            nf.push_back(c[j]);
            nb.push_back(std::move(b));
            h.vertices.push_back(c[j]);
        }
    }
    h.face = nf;
    h.bags = nb;
}

}  // namespace

bool is_facially_normalized(const NearlyEmbeddableInstance& inst) {
    for (const Vortex& h : inst.vortices) {
        std::set<int> fs(h.face.begin(), h.face.end());
        if (fs.size() != h.face.size()) return false;
        const int L = static_cast<int>(h.face.size());
        for (int q = 0; q < L; ++q) {
            int v = h.face[q];
            int off = 0;
            for (int u : inst.rotation[v]) {
                bool face_edge = L >= 2 && (u == h.face[(q + 1) % L] || u == h.face[(q + L - 1) % L]);
                if (!face_edge) ++off;
            }
            if (off > 1) return false;
        }
    }
    return true;
}

int max_offface_degree(const NearlyEmbeddableInstance& inst) {
    int best = 0;
    for (int v = 0; v < inst.num_vertices(); ++v)
        if (inst.planar[v] && !inst.on_face(v)) best = std::max(best, static_cast<int>(inst.rotation[v].size()));
    return best;
}

Normalized facially_normalize(const NearlyEmbeddableInstance& inst) {
    if (inst.vortices.size() != 1 || inst.params.k != 1) throw TransformError("facial normalization needs k = 1");
    if (inst.params.g != 0) throw TransformError("facial normalization needs g = 0");
    Work w(inst);
    Vortex h = inst.vortices[0];
    split_repeated(w, h);
    split_chains(w, h);
    Normalized out;
    out.inst = finish(inst, w, {h}, out.cert);
    return out;
}

namespace {

void expand_grids(Work& w, std::vector<Vortex>& vortices, int n_input) {
    const long s = 3L * n_input * n_input;
    std::set<int> face;
    for (const Vortex& h : vortices) face.insert(h.face.begin(), h.face.end());
    std::vector<int> targets;
    for (int v = 0; v < w.size(); ++v)
        if (w.planar[v] && !face.count(v)) targets.push_back(v);
    if (static_cast<long>(targets.size()) * s * s > 4'000'000L) throw TransformError("grid expansion too large");
    for (int v : targets)
        if (w.rot[v].size() > 4) throw TransformError("grid expansion needs degree <= 4");

    // grid[v][r*s+c]; cell (0,0) keeps the id v.
    std::map<int, std::vector<int>> grid;
    for (int v : targets) {
        auto& cells = grid[v];
        cells.resize(s * s);
        cells[0] = v;
        for (long i = 1; i < s * s; ++i) cells[i] = w.add_vertex(v, true);
    }
    auto cell = [&](int v, long r, long c) { return grid[v][r * s + c]; };
    // Side t of a grid in clockwise order: 0 top, 1 right, 2 bottom, 3 left.
    auto side = [&](int v, int t, long k) {
        switch (t) {
            case 0: return cell(v, 0, k);
            case 1: return cell(v, k, s - 1);
            case 2: return cell(v, s - 1, s - 1 - k);
            default: return cell(v, s - 1 - k, 0);
        }
    };
    const Rotation old = w.rot;
    // ext[x][dir] = external neighbour of grid cell x in that direction.
    std::map<int, std::array<int, 4>> ext;
    auto set_ext = [&](int x, int dir, int y) {
        auto it = ext.find(x);
        if (it == ext.end()) it = ext.emplace(x, std::array<int, 4>{-1, -1, -1, -1}).first;
        it->second[dir] = y;
    };
    std::vector<Arc> arcs;
    auto copy_arcs = [&](int v, int o, int nv, int no) {
        for (const Arc& a : w.arcs) {
            if (a.src == v && a.dst == o) arcs.push_back({nv, no, a.cost});
            if (a.src == o && a.dst == v) arcs.push_back({no, nv, a.cost});
        }
    };
    for (const Arc& a : w.arcs) {
        bool gs = grid.count(a.src), gd = grid.count(a.dst);
        bool planar_pair = rot_index(old, a.src, a.dst) >= 0 && w.planar[a.src] && w.planar[a.dst];
        if ((gs || gd) && planar_pair) continue;  // rebuilt below
        arcs.push_back(a);
    }
    for (int v : targets) {
        const auto& r = old[v];
        for (int t = 0; t < static_cast<int>(r.size()); ++t) {
            int o = r[t];
            if (grid.count(o)) {
                if (o < v) continue;
                int to = rot_index(old, o, v);
                for (long k = 0; k < s; ++k) {
                    int a = side(v, t, k), b = side(o, to, s - 1 - k);
                    set_ext(a, t, b);
                    set_ext(b, to, a);
                    copy_arcs(v, o, a, b);
                }
            } else {
                std::vector<int> fan;
                for (long k = s - 1; k >= 0; --k) {
                    int a = side(v, t, k);
                    set_ext(a, t, o);
                    copy_arcs(v, o, a, o);
                    fan.push_back(a);
                }
                auto& ro = w.rot[o];
                auto it = std::find(ro.begin(), ro.end(), v);
                it = ro.erase(it);
                ro.insert(it, fan.begin(), fan.end());
            }
        }
        for (long rr = 0; rr < s; ++rr)
            for (long c = 0; c < s; ++c) {
                int x = cell(v, rr, c);
                if (c + 1 < s) {
                    arcs.push_back({x, cell(v, rr, c + 1), Rational(0)});
                    arcs.push_back({cell(v, rr, c + 1), x, Rational(0)});
                }
                if (rr + 1 < s) {
                    arcs.push_back({x, cell(v, rr + 1, c), Rational(0)});
                    arcs.push_back({cell(v, rr + 1, c), x, Rational(0)});
                }
            }
    }
    w.arcs = std::move(arcs);
    for (int v : targets)
        for (long rr = 0; rr < s; ++rr)
            for (long c = 0; c < s; ++c) {
                int x = cell(v, rr, c);
                std::array<int, 4> e{-1, -1, -1, -1};
                if (auto it = ext.find(x); it != ext.end()) e = it->second;
                std::vector<int> nr;
                int dirs[4] = {rr > 0 ? cell(v, rr - 1, c) : e[0], c + 1 < s ? cell(v, rr, c + 1) : e[1],
                               rr + 1 < s ? cell(v, rr + 1, c) : e[2], c > 0 ? cell(v, rr, c - 1) : e[3]};
                for (int y : dirs)
                    if (y >= 0) nr.push_back(y);
                w.rot[x] = nr;
            }
}

}  // namespace

Normalized cross_normalize(const NearlyEmbeddableInstance& inst, bool grids) {
    Work w(inst);
    std::set<int> face;
    for (const Vortex& h : inst.vortices) face.insert(h.face.begin(), h.face.end());
    for (int v = 0; v < inst.num_vertices(); ++v) {
        if (!inst.planar[v] || face.count(v)) continue;
        const std::vector<int> o = w.rot[v];
        const int d = static_cast<int>(o.size());
        if (d <= 4) continue;
        // Caterpillar: spine s_1..s_{d-2} (s_1 keeps the id v), leaf L_i carries edge i.
        std::vector<int> leaf(d), spine(d - 1);
        spine[1] = v;
        for (int j = 2; j <= d - 2; ++j) spine[j] = w.add_vertex(v, true);
        for (int i = 0; i < d; ++i) leaf[i] = w.add_vertex(v, true);
        auto leaf_parent = [&](int i) {  // 0-based leaf index
            if (i <= 1) return spine[1];
            if (i >= d - 2) return spine[d - 2];
            return spine[i];
        };
        for (int i = 0; i < d; ++i) {
            w.move_arcs(v, o[i], leaf[i]);
            w.replace_nbr(o[i], v, leaf[i]);
            w.rot[leaf[i]] = {o[i], leaf_parent(i)};
            w.link(leaf[i], leaf_parent(i));
        }
        for (int j = 1; j < d - 2; ++j) w.link(spine[j], spine[j + 1]);
        w.rot[spine[1]] = {leaf[0], leaf[1], spine[2]};
        for (int j = 2; j < d - 2; ++j) w.rot[spine[j]] = {spine[j - 1], leaf[j], spine[j + 1]};
        w.rot[spine[d - 2]] = {spine[d - 3], leaf[d - 2], leaf[d - 1]};
    }
    std::vector<Vortex> vortices = inst.vortices;
    if (grids) expand_grids(w, vortices, inst.num_vertices());
    Normalized out;
    out.inst = finish(inst, w, vortices, out.cert);
    return out;
}

MergedVortices merge_vortices(const NearlyEmbeddableInstance& inst) {
    const int k = static_cast<int>(inst.vortices.size());
    if (k < 2) throw TransformError("merging needs at least two vortices");
    MetricClosure d(inst.graph);
    MergedVortices out;
    Digraph g = inst.graph;
    Vortex merged;
    for (int i = 0; i < k; ++i) {
        const Vortex& h = inst.vortices[i];
        const int m = static_cast<int>(h.face.size());
        const int v0 = h.face[0], v1 = h.face[1 % m];
        merged.vertices.insert(merged.vertices.end(), h.vertices.begin(), h.vertices.end());
        merged.face.insert(merged.face.end(), h.face.begin(), h.face.end());
        for (int j = 0; j < static_cast<int>(h.bags.size()); ++j) {
            Bag b = h.bags[j];
            int extra = j == 0 ? v1 : v0;
            if (std::find(b.members.begin(), b.members.end(), extra) == b.members.end()) b.members.push_back(extra);
            merged.bags.push_back(std::move(b));
        }
        if (i + 1 == k) break;
        const Vortex& nx = inst.vortices[i + 1];
        // f_i = {z, z'} closes this face, e_{i+1} = {w, w'} opens the next one.
        const int z = h.face[m - 1], z2 = v0;
        const int w = nx.face[0], w2 = nx.face[1 % nx.face.size()];
        out.links.push_back({z, z2, w, w2});
        for (auto [x, y] : {std::pair{z, w}, std::pair{z2, w2}}) {
            if (d.reachable(x, y)) g.add_arc(x, y, d.dist(x, y));
            if (d.reachable(y, x)) g.add_arc(y, x, d.dist(y, x));
        }
        Bag link;
        for (int x : {z, z2, w, w2})
            if (std::find(link.members.begin(), link.members.end(), x) == link.members.end()) link.members.push_back(x);
        merged.bags.push_back(std::move(link));
    }
    out.inst.graph = std::move(g);
    out.inst.planar = inst.planar;
    out.inst.rotation = inst.rotation;
    out.inst.vortices = {merged};
    out.inst.apices = inst.apices;
    out.inst.params = inst.params;
    out.inst.params.k = 1;
    out.inst.params.g = inst.params.g + k - 1;
    out.inst.params.p = std::max(2 * inst.params.p, out.inst.width());
    return out;
}

}  // namespace vatsp
