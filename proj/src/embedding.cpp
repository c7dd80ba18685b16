#include "vatsp/embedding.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace vatsp {

int rot_index(const Rotation& rot, int v, int nbr) {
    const auto& r = rot[v];
    auto it = std::find(r.begin(), r.end(), nbr);
    return it == r.end() ? -1 : static_cast<int>(it - r.begin());
}

int rot_succ(const Rotation& rot, int v, int from) {
    int i = rot_index(rot, v, from);
    if (i < 0) throw std::invalid_argument("not a neighbour in the rotation");
    return rot[v][(i + 1) % rot[v].size()];
}

std::vector<int> trace_face(const Rotation& rot, int u, int v) {
    std::vector<int> face;
    int a = u, b = v;
    const std::size_t limit = 4 * rot.size() * rot.size() + 8;
    do {
        face.push_back(a);
        int c = rot_succ(rot, b, a);
        a = b;
        b = c;
        if (face.size() > limit) throw std::runtime_error("face tracing did not close");
    } while (a != u || b != v);
    return face;
}

std::vector<std::vector<int>> trace_faces(const Rotation& rot, const std::vector<char>& planar) {
    std::vector<std::vector<int>> faces;
    std::set<std::pair<int, int>> seen;
    for (int u = 0; u < static_cast<int>(rot.size()); ++u) {
        if (!planar[u]) continue;
        if (rot[u].empty()) {
            faces.push_back({u});
            continue;
        }
        for (int v : rot[u]) {
            if (seen.count({u, v})) continue;
            std::vector<int> f = trace_face(rot, u, v);
            for (std::size_t i = 0; i < f.size(); ++i) seen.insert({f[i], f[(i + 1) % f.size()]});
            faces.push_back(std::move(f));
        }
    }
    return faces;
}

EmbeddingStats embedding_stats(const Rotation& rot, const std::vector<char>& planar) {
    EmbeddingStats s;
    const int n = static_cast<int>(rot.size());
    for (int u = 0; u < n; ++u) {
        if (!planar[u]) continue;
        std::set<int> uniq(rot[u].begin(), rot[u].end());
        if (uniq.size() != rot[u].size() || uniq.count(u)) s.symmetric = false;
        for (int v : rot[u])
            if (v < 0 || v >= n || !planar[v] || rot_index(rot, v, u) < 0) s.symmetric = false;
    }
    if (!s.symmetric) return s;
    std::vector<int> comp(n, -1);
    for (int u = 0; u < n; ++u) {
        if (!planar[u] || comp[u] >= 0) continue;
        std::vector<int> stack{u};
        comp[u] = s.components;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : rot[x])
                if (comp[y] < 0) {
                    comp[y] = s.components;
                    stack.push_back(y);
                }
        }
        ++s.components;
    }
    // Euler characteristic V - E + F per component.
    std::vector<long> chi(s.components, 0), degsum(s.components, 0);
    for (int u = 0; u < n; ++u) {
        if (!planar[u]) continue;
        ++s.vertices;
        chi[comp[u]] += 1;
        degsum[comp[u]] += static_cast<long>(rot[u].size());
    }
    for (int c = 0; c < s.components; ++c) {
        chi[c] -= degsum[c] / 2;
        s.edges += static_cast<int>(degsum[c] / 2);
    }
    for (const auto& f : trace_faces(rot, planar)) {
        ++s.faces;
        chi[comp[f[0]]] += 1;
    }
    for (int c = 0; c < s.components; ++c) s.genus += static_cast<int>((2 - chi[c]) / 2);
    return s;
}

void insert_edge(Rotation& rot, int u, int pred_u, int w, int pred_w) {
    auto put = [&](int x, int pred, int y) {
        auto& r = rot[x];
        if (pred < 0) {
            if (!r.empty()) throw std::invalid_argument("corner required for a non-isolated vertex");
            r.push_back(y);
            return;
        }
        int i = rot_index(rot, x, pred);
        if (i < 0) throw std::invalid_argument("corner predecessor is not a neighbour");
        r.insert(r.begin() + i + 1, y);
    };
    put(u, pred_u, w);
    put(w, pred_w, u);
}

bool is_traced_face(const Rotation& rot, const std::vector<int>& face) {
    if (face.empty()) return false;
    if (face.size() == 1) return rot[face[0]].empty();
    if (rot_index(rot, face[0], face[1]) < 0) return false;
    std::vector<int> t = trace_face(rot, face[0], face[1]);
    return t == face;
}

}  // namespace vatsp
