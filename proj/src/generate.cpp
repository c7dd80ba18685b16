#include "vatsp/generate.hpp"

#include <algorithm>
#include <set>

#include "vatsp/rng.hpp"

namespace vatsp {

namespace {

struct Builder {
    Rng& rng;
    const Profile& pf;
    Rotation rot;
    std::vector<char> planar;
    std::vector<int> off;  // planar edges leaving the face, per face vertex
    std::vector<char> face_vertex;
    std::vector<std::pair<int, int>> darts;  // one dart of every vortex face

    int add(bool is_planar) {
        rot.emplace_back();
        planar.push_back(is_planar);
        off.push_back(0);
        face_vertex.push_back(0);
        return static_cast<int>(planar.size()) - 1;
    }

    bool may_leave_face(int v) const { return !pf.normalized || !face_vertex[v] || off[v] == 0; }

    void note_edge(int u, int v) {
        if (face_vertex[u]) ++off[u];
        if (face_vertex[v]) ++off[v];
    }

    static bool has_dart(const std::vector<int>& f, std::pair<int, int> d) {
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] == d.first && f[(i + 1) % f.size()] == d.second) return true;
        return false;
    }

    // Faces of the planar piece other than the vortex faces.
    std::vector<std::vector<int>> open_faces() const {
        std::vector<std::vector<int>> out;
        for (auto& f : trace_faces(rot, planar)) {
            if (f.size() < 2) continue;
            bool reserved = false;
            for (auto d : darts) reserved = reserved || has_dart(f, d);
            if (!reserved) out.push_back(f);
        }
        return out;
    }

    // Positions of f holding distinct vertices that may take another edge.
    std::vector<int> usable_positions(const std::vector<int>& f) const {
        std::vector<int> pos;
        std::set<int> seen;
        for (int i = 0; i < static_cast<int>(f.size()); ++i)
            if (may_leave_face(f[i]) && seen.insert(f[i]).second) pos.push_back(i);
        return pos;
    }

    int cycle(int m) {
        std::vector<int> c(m);
        for (int& v : c) {
            v = add(true);
            face_vertex[v] = 1;
        }
        if (m >= 2)
            for (int i = 0; i < m; ++i) {
                rot[c[i]].push_back(c[(i + m - 1) % m]);
                if (m > 2) rot[c[i]].push_back(c[(i + 1) % m]);
            }
        darts.push_back({c[0], m >= 2 ? c[1] : c[0]});
        return c[0];
    }

    // New planar vertex joined to 1..max_attach vertices of a random open face.
    bool attach() {
        auto faces = open_faces();
        if (faces.empty()) return false;
        const auto& f = faces[rng.below(faces.size())];
        auto pos = usable_positions(f);
        if (pos.empty()) return false;
        rng.shuffle(pos);
        int r = rng.range(1, std::min<int>(std::max(1, pf.max_attach), static_cast<int>(pos.size())));
        pos.resize(r);
        std::sort(pos.begin(), pos.end());
        const int L = static_cast<int>(f.size());
        int x = add(true);
        for (int j = 0; j < r; ++j) {
            int y = f[pos[j]];
            int pred = f[(pos[j] + L - 1) % L];
            insert_edge(rot, x, j == 0 ? -1 : f[pos[0]], y, pred);
            note_edge(x, y);
        }
        return true;
    }

    bool chord() {
        auto faces = open_faces();
        if (faces.empty()) return false;
        const auto& f = faces[rng.below(faces.size())];
        auto pos = usable_positions(f);
        if (pos.size() < 2) return false;
        rng.shuffle(pos);
        int i = std::min(pos[0], pos[1]), j = std::max(pos[0], pos[1]);
        int u = f[i], w = f[j];
        if (rot_index(rot, u, w) >= 0) return false;
        const int L = static_cast<int>(f.size());
        insert_edge(rot, u, f[(i + L - 1) % L], w, f[(j + L - 1) % L]);
        note_edge(u, w);
        return true;
    }

    // Bridge between the outer faces of cycle i and cycle i + 1.
    void bridge(std::pair<int, int> d1, std::pair<int, int> d2) {
        auto pick = [&](std::pair<int, int> d) {
            auto f = trace_face(rot, d.second, d.first);
            auto pos = usable_positions(f);
            if (pos.empty()) throw ProfileError("no room to join the vortex faces");
            int i = pos[rng.below(pos.size())];
            return std::pair{f[i], f[(i + f.size() - 1) % f.size()]};
        };
        int b = add(true);
        auto [y1, p1] = pick(d1);
        insert_edge(rot, b, -1, y1, p1);
        note_edge(b, y1);
        auto [y2, p2] = pick(d2);
        insert_edge(rot, b, y1, y2, p2);
        note_edge(b, y2);
    }

    // Pendant vertex hung into the first vortex face; the face visits its neighbour twice.
    void pendant() {
        auto f = trace_face(rot, darts[0].first, darts[0].second);
        if (f.size() < 3) return;
        int i = rng.range(1, static_cast<int>(f.size()) - 1);
        int y = add(true);
        face_vertex[y] = 1;
        insert_edge(rot, f[i], f[i - 1], y, -1);
    }
};

}  // namespace

NearlyEmbeddableInstance generate_instance(std::uint64_t seed, const Profile& pf) {
    if (pf.n < 1 || pf.n > kMaxGeneratedVertices) throw ProfileError("vertex count out of range");
    if (pf.a < 0 || pf.k < 1 || pf.p < 0) throw ProfileError("bad parameters");
    if (pf.min_cost < 0 || pf.min_cost > pf.max_cost) throw ProfileError("bad cost range");
    const int N = pf.n - pf.a;
    const int k = pf.k;
    if (N < 1 || (k > 1 && N < 4 * k - 1)) throw ProfileError("too few vertices for the requested structure");
    if (pf.repeated_face && pf.normalized) throw ProfileError("a repeated face is never facially normalized");
    if (pf.repeated_face && pf.p < 1) throw ProfileError("a repeated face needs width at least 1");

    Rng rng(seed);
    Builder b{rng, pf, {}, {}, {}, {}, {}};

    // Vertex budget.
    const int cap = pf.max_face > 0 ? pf.max_face : N;
    std::vector<int> m(k);
    int budget = N;
    if (k == 1) {
        int lo = std::min(3, N);
        int hi = std::max(lo, std::min({cap, N, N - pf.min_interior}));
        m[0] = rng.range(lo, hi);
        budget -= m[0];
    } else {
        budget -= 4 * k - 1;
        for (int i = 0; i < k; ++i) {
            int extra = rng.range(0, std::min(budget, std::max(0, cap - 3)));
            m[i] = 3 + extra;
            budget -= extra;
        }
    }
    int pendants = pf.repeated_face && budget > 0 && m[0] >= 3 ? 1 : 0;
    budget -= pendants;
    for (int i = 0; i < k; ++i) b.cycle(m[i]);
    for (int i = 0; i + 1 < k; ++i) b.bridge(b.darts[i], b.darts[i + 1]);
    for (int i = 0; i < pendants; ++i) b.pendant();

    // Vortex faces are final from here on; their bags bound the interior size.
    auto face_of = [&](int i) {
        return m[i] == 1 ? std::vector<int>{b.darts[i].first} : trace_face(b.rot, b.darts[i].first, b.darts[i].second);
    };
    int capacity = 0;
    for (int i = 0; i < k; ++i) {
        auto f = face_of(i);
        for (int q = 0; q < static_cast<int>(f.size()); ++q) {
            int span = 0;
            std::set<int> seen;
            for (int v : f)
                if (seen.insert(v).second) {
                    auto lo = std::find(f.begin(), f.end(), v) - f.begin();
                    auto hi = f.rend() - std::find(f.rbegin(), f.rend(), v) - 1;
                    span += lo <= q && q <= hi;
                }
            capacity += std::max(0, pf.p + 1 - span);
        }
    }
    int interior = std::min(rng.range(std::min(pf.min_interior, budget), budget), capacity);
    int others = budget - interior;
    for (int i = 0; i < others; ++i)
        if (!b.attach()) throw ProfileError("no open face for a planar vertex");
    int chords = rng.range(0, std::max(1, N / 2));
    for (int i = 0; i < chords; ++i) b.chord();

    // Faces and path decompositions.
    std::vector<std::vector<int>> faces(k);
    std::vector<std::vector<std::vector<int>>> bags(k);
    for (int i = 0; i < k; ++i) {
        faces[i] = face_of(i);
        const int L = static_cast<int>(faces[i].size());
        bags[i].resize(L);
        std::vector<int> lo_pos(b.planar.size(), L), hi_pos(b.planar.size(), -1);
        for (int q = 0; q < L; ++q) {
            int v = faces[i][q];
            lo_pos[v] = std::min(lo_pos[v], q);
            hi_pos[v] = std::max(hi_pos[v], q);
        }
        for (int v = 0; v < static_cast<int>(b.planar.size()); ++v)
            for (int q = lo_pos[v]; q <= hi_pos[v]; ++q) bags[i][q].push_back(v);
        for (int q = 0; q < L; ++q)
            if (static_cast<int>(bags[i][q].size()) > pf.p + 1) throw ProfileError("face too tangled for width p");
    }

    // Vortex interiors: random short intervals inside bags with room.
    std::vector<std::vector<int>> inner(k);
    int free_slots = capacity;
    for (int t = 0; t < interior; ++t) {
        bool placed = false;
        // Longer intervals only while the remaining vertices still fit.
        const int slack = free_slots - (interior - t);
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            int i = static_cast<int>(rng.below(k));
            auto& bg = bags[i];
            const int L = static_cast<int>(bg.size());
            int len = attempt < 48 ? rng.range(1, std::min({3, L, 1 + slack})) : 1;
            int s = rng.range(0, L - len);
            bool room = true;
            for (int q = s; q < s + len; ++q) room = room && static_cast<int>(bg[q].size()) < pf.p + 1;
            if (!room) continue;
            int v = b.add(false);
            for (int q = s; q < s + len; ++q) bg[q].push_back(v);
            inner[i].push_back(v);
            free_slots -= len;
            placed = true;
        }
        if (!placed) {
            // Scan for any bag with room before giving up.
            for (int i = 0; i < k && !placed; ++i)
                for (auto& bag : bags[i])
                    if (static_cast<int>(bag.size()) < pf.p + 1) {
                        int v = b.add(false);
                        bag.push_back(v);
                        inner[i].push_back(v);
                        --free_slots;
                        placed = true;
                        break;
                    }
            if (!placed) throw ProfileError("vortex too narrow for its interior");
        }
    }
    // Occasionally stretch a face vertex one bag further.
    for (int i = 0; i < k; ++i) {
        const int L = static_cast<int>(faces[i].size());
        std::vector<int> lo_pos(b.planar.size(), L), hi_pos(b.planar.size(), -1);
        for (int q = 0; q < L; ++q) {
            int v = faces[i][q];
            lo_pos[v] = std::min(lo_pos[v], q);
            hi_pos[v] = std::max(hi_pos[v], q);
        }
        for (int v = 0; v < static_cast<int>(b.planar.size()); ++v) {
            if (hi_pos[v] < 0 || !rng.chance(1, 4)) continue;
            int q = rng.chance(1, 2) ? lo_pos[v] - 1 : hi_pos[v] + 1;
            if (q < 0 || q >= L || static_cast<int>(bags[i][q].size()) >= pf.p + 1) continue;
            bags[i][q].push_back(v);
        }
    }
    std::vector<int> apices;
    for (int i = 0; i < pf.a; ++i) apices.push_back(b.add(false));

    // Relabel: face vertices, interiors, other planar vertices, apices.
    const int total = static_cast<int>(b.planar.size());
    std::vector<int> order, id(total, -1);
    auto push = [&](int v) {
        if (id[v] < 0) {
            id[v] = static_cast<int>(order.size());
            order.push_back(v);
        }
    };
    for (int i = 0; i < k; ++i)
        for (int v : faces[i]) push(v);
    for (int i = 0; i < k; ++i)
        for (int v : inner[i]) push(v);
    for (int v = 0; v < total; ++v)
        if (b.planar[v]) push(v);
    for (int v : apices) push(v);

    NearlyEmbeddableInstance inst;
    inst.graph = Digraph(total);
    inst.planar.assign(total, 0);
    inst.rotation.assign(total, {});
    auto cost = [&] { return Rational(rng.range(pf.min_cost, pf.max_cost)); };
    for (int v = 0; v < total; ++v) {
        if (!b.planar[v]) continue;
        inst.planar[id[v]] = 1;
        for (int u : b.rot[v]) inst.rotation[id[v]].push_back(id[u]);
    }
    for (int v : order)
        if (b.planar[v])
            for (int u : b.rot[v])
                if (id[v] < id[u]) {
                    inst.graph.add_arc(id[v], id[u], cost());
                    inst.graph.add_arc(id[u], id[v], cost());
                }
    for (int i = 0; i < k; ++i) {
        Vortex h;
        for (int v : faces[i]) h.face.push_back(id[v]);
        std::set<int> vs;
        for (int v : faces[i]) vs.insert(id[v]);
        for (int v : inner[i]) vs.insert(id[v]);
        h.vertices.assign(vs.begin(), vs.end());
        for (std::size_t q = 0; q < bags[i].size(); ++q) {
            Bag bag;
            bag.anchor = id[faces[i][q]];
            for (int v : bags[i][q]) bag.members.push_back(id[v]);
            std::sort(bag.members.begin(), bag.members.end());
            h.bags.push_back(std::move(bag));
        }
        // Each interior vertex is tied both ways to an earlier member of one of its bags.
        std::set<int> reached;
        for (int v : faces[i]) reached.insert(id[v]);
        for (int v : inner[i]) {
            std::vector<int> mates;
            for (const Bag& bag : h.bags)
                if (std::count(bag.members.begin(), bag.members.end(), id[v]))
                    for (int u : bag.members)
                        if (u != id[v] && reached.count(u)) mates.push_back(u);
            int u = mates[rng.below(mates.size())];
            inst.graph.add_arc(id[v], u, cost());
            inst.graph.add_arc(u, id[v], cost());
            reached.insert(id[v]);
        }
        int extras = rng.range(0, static_cast<int>(inner[i].size() + faces[i].size()) / 2 + 1);
        for (int t = 0; t < extras; ++t) {
            const Bag& bag = h.bags[rng.below(h.bags.size())];
            if (bag.members.size() < 2) continue;
            int x = bag.members[rng.below(bag.members.size())];
            int y = bag.members[rng.below(bag.members.size())];
            if (x == y || (inst.planar[x] && rot_index(inst.rotation, x, y) >= 0)) continue;
            inst.graph.add_arc(x, y, cost());
        }
        inst.vortices.push_back(std::move(h));
    }
    std::set<int> apex_ids;
    for (int ap : apices) apex_ids.insert(id[ap]);
    inst.apices.assign(apex_ids.begin(), apex_ids.end());
    for (int x : inst.apices)
        for (int v = 0; v < total; ++v) {
            if (v == x || (apex_ids.count(v) && v < x)) continue;
            if (inst.planar[v] || apex_ids.count(v) || rng.chance(1, 2)) {
                inst.graph.add_arc(x, v, cost());
                inst.graph.add_arc(v, x, cost());
            }
        }
    inst.params = {pf.a, 0, k, pf.p};
    auto report = validate(inst);
    if (!report.empty()) throw std::logic_error("generator produced an invalid instance: " + report.front());
    return inst;
}

}  // namespace vatsp
