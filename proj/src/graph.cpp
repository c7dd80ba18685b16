#include "vatsp/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace vatsp {

Digraph::Digraph(int n) : out_(n), in_(n), labels_(n) {}

int Digraph::add_vertex(std::string label) {
    out_.emplace_back();
    in_.emplace_back();
    labels_.push_back(std::move(label));
    return num_vertices() - 1;
}

int Digraph::add_arc(int src, int dst, Rational cost) {
    if (src < 0 || dst < 0 || src >= num_vertices() || dst >= num_vertices())
        throw std::out_of_range("arc endpoint out of range");
    if (src == dst) throw std::invalid_argument("self-loop arcs are not supported");
    if (cost < Rational(0) || cost.is_inf()) throw std::invalid_argument("arc cost must be finite and nonnegative");
    arcs_.push_back({src, dst, cost});
    int id = num_arcs() - 1;
    out_[src].push_back(id);
    in_[dst].push_back(id);
    return id;
}

void Digraph::set_cost(int arc, Rational cost) {
    if (cost < Rational(0) || cost.is_inf()) throw std::invalid_argument("arc cost must be finite and nonnegative");
    arcs_[arc].cost = cost;
}

int Digraph::find_arc(int src, int dst) const {
    int best = -1;
    for (int a : out_[src]) {
        if (arcs_[a].dst != dst) continue;
        if (best < 0 || arcs_[a].cost < arcs_[best].cost) best = a;
    }
    return best;
}

Digraph Digraph::filter_arcs(const std::vector<char>& keep) const {
    Digraph h(num_vertices());
    h.labels_ = labels_;
    for (int i = 0; i < num_arcs(); ++i)
        if (keep[i]) h.add_arc(arcs_[i].src, arcs_[i].dst, arcs_[i].cost);
    return h;
}

Digraph Digraph::induced(const std::vector<int>& vertices) const {
    std::vector<int> pos(num_vertices(), -1);
    Digraph h(static_cast<int>(vertices.size()));
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        pos[vertices[i]] = static_cast<int>(i);
        h.labels_[i] = labels_[vertices[i]];
    }
    for (const Arc& a : arcs_)
        if (pos[a.src] >= 0 && pos[a.dst] >= 0) h.add_arc(pos[a.src], pos[a.dst], a.cost);
    return h;
}

bool Digraph::strongly_connected() const {
    int n = num_vertices();
    if (n <= 1) return true;
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int a : forward ? out_[v] : in_[v]) {
                int w = forward ? arcs_[a].dst : arcs_[a].src;
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n;
    };
    return reach_all(true) && reach_all(false);
}

int Ugraph::add_edge(int u, int v, Rational cost) {
    if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices())
        throw std::out_of_range("edge endpoint out of range");
    edges_.push_back({u, v, cost});
    int id = num_edges() - 1;
    inc_[u].push_back(id);
    if (v != u) inc_[v].push_back(id);
    return id;
}

int Ugraph::find_edge(int u, int v) const {
    for (int e : inc_[u])
        if (edges_[e].other(u) == v) return e;
    return -1;
}

Symmetrization symmetrize(const Digraph& g) {
    Symmetrization s;
    s.graph = Ugraph(g.num_vertices());
    s.arc_to_edge.assign(g.num_arcs(), -1);
    // Pairs in order of their first arc, so edge ids are deterministic.
    std::vector<std::vector<std::pair<int, int>>> seen(g.num_vertices());
    for (int i = 0; i < g.num_arcs(); ++i) {
        const Arc& a = g.arc(i);
        int u = std::min(a.src, a.dst), v = std::max(a.src, a.dst);
        int e = -1;
        for (auto [w, id] : seen[u])
            if (w == v) e = id;
        if (e < 0) {
            e = s.graph.add_edge(u, v, a.cost);
            seen[u].push_back({v, e});
        }
        s.arc_to_edge[i] = e;
    }
    // Costs: min over the arcs of the pair.
    std::vector<Rational> best(s.graph.num_edges(), Rational::infinity());
    for (int i = 0; i < g.num_arcs(); ++i) best[s.arc_to_edge[i]] = min(best[s.arc_to_edge[i]], g.arc(i).cost);
    Ugraph out(g.num_vertices());
    for (int e = 0; e < s.graph.num_edges(); ++e) out.add_edge(s.graph.edge(e).u, s.graph.edge(e).v, best[e]);
    s.graph = std::move(out);
    return s;
}

MetricClosure::MetricClosure(const Digraph& g) : n_(g.num_vertices()) {
    std::size_t nn = static_cast<std::size_t>(n_) * n_;
    dist_.assign(nn, Rational::infinity());
    hops_.assign(nn, -1);
    next_.assign(nn, -1);
    // Distances *to* each target t, computed on reversed arcs, so that next hops
    // can be chosen greedily from the source side.
    using Key = std::tuple<Rational, int, int>;
    for (int t = 0; t < n_; ++t) {
        std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
        dist_[idx(t, t)] = Rational(0);
        hops_[idx(t, t)] = 0;
        pq.push({Rational(0), 0, t});
        while (!pq.empty()) {
            auto [d, h, v] = pq.top();
            pq.pop();
            if (d != dist_[idx(v, t)] || h != hops_[idx(v, t)]) continue;
            for (int a : g.in_arcs(v)) {
                int u = g.arc(a).src;
                Rational nd = d + g.arc(a).cost;
                int nh = h + 1;
                Rational& cur = dist_[idx(u, t)];
                if (nd < cur || (nd == cur && nh < hops_[idx(u, t)])) {
                    cur = nd;
                    hops_[idx(u, t)] = nh;
                    pq.push({nd, nh, u});
                }
            }
        }
    }
    for (int s = 0; s < n_; ++s) {
        for (int t = 0; t < n_; ++t) {
            if (s == t || dist_[idx(s, t)].is_inf()) continue;
            int best = -1;
            for (int a : g.out_arcs(s)) {
                int w = g.arc(a).dst;
                if (dist_[idx(w, t)].is_inf()) continue;
                if (g.arc(a).cost + dist_[idx(w, t)] != dist_[idx(s, t)]) continue;
                if (hops_[idx(w, t)] != hops_[idx(s, t)] - 1) continue;
                if (best < 0 || w < best) best = w;
            }
            next_[idx(s, t)] = best;
        }
    }
}

std::vector<int> MetricClosure::path(int u, int v) const {
    if (!reachable(u, v)) throw std::domain_error("no path between the requested vertices");
    std::vector<int> p{u};
    while (u != v) {
        u = next_hop(u, v);
        p.push_back(u);
    }
    return p;
}

std::vector<std::vector<Rational>> floyd_warshall(const Digraph& g) {
    int n = g.num_vertices();
    std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational::infinity()));
    for (int v = 0; v < n; ++v) d[v][v] = Rational(0);
    for (const Arc& a : g.arcs()) d[a.src][a.dst] = min(d[a.src][a.dst], a.cost);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (d[i][k].is_inf()) continue;
            for (int j = 0; j < n; ++j) {
                if (d[k][j].is_inf()) continue;
                Rational via = d[i][k] + d[k][j];
                if (via < d[i][j]) d[i][j] = via;
            }
        }
    return d;
}

Rational walk_cost(const MetricClosure& d, const Walk& w) {
    Rational c(0);
    for (std::size_t i = 0; i + 1 < w.seq.size(); ++i) c += d.dist(w.seq[i], w.seq[i + 1]);
    return c;
}

Rational walk_arc_cost(const Digraph& g, const Walk& w) {
    Rational c(0);
    for (std::size_t i = 0; i + 1 < w.seq.size(); ++i) {
        int a = g.find_arc(w.seq[i], w.seq[i + 1]);
        if (a < 0) throw std::invalid_argument("walk step is not an arc");
        c += g.arc(a).cost;
    }
    return c;
}

bool walk_uses_arcs(const Digraph& g, const Walk& w) {
    for (std::size_t i = 0; i + 1 < w.seq.size(); ++i)
        if (g.find_arc(w.seq[i], w.seq[i + 1]) < 0) return false;
    if (w.closed && w.seq.size() >= 2 && w.seq.front() != w.seq.back()) return false;
    return true;
}

Walk rotate_closed(const Walk& w, int v) {
    if (!w.closed) throw std::invalid_argument("rotate_closed needs a closed walk");
    if (w.seq.size() <= 1) {
        if (!w.seq.empty() && w.seq[0] != v) throw std::invalid_argument("vertex not on walk");
        return w;
    }
    std::size_t len = w.seq.size() - 1;
    auto it = std::find(w.seq.begin(), w.seq.begin() + len, v);
    if (it == w.seq.begin() + len) throw std::invalid_argument("vertex not on walk");
    std::size_t k = it - w.seq.begin();
    Walk r{{}, true};
    for (std::size_t i = 0; i < len; ++i) r.seq.push_back(w.seq[(k + i) % len]);
    r.seq.push_back(v);
    return r;
}

Walk expand_walk(const MetricClosure& d, const Walk& w) {
    Walk r{{}, w.closed};
    if (w.seq.empty()) return r;
    r.seq.push_back(w.seq[0]);
    for (std::size_t i = 0; i + 1 < w.seq.size(); ++i) {
        auto p = d.path(w.seq[i], w.seq[i + 1]);
        r.seq.insert(r.seq.end(), p.begin() + 1, p.end());
    }
    return r;
}

std::vector<char> visited_set(const Walk& w, int n) {
    std::vector<char> s(n, 0);
    for (int v : w.seq) s[v] = 1;
    return s;
}

Walk shortcut(const Walk& w1, const Walk& w2, int v) {
    if (!w1.closed || !w2.closed) throw std::invalid_argument("shortcut needs closed walks");
    if (w1.seq.empty() || w2.seq.empty()) throw std::invalid_argument("shortcut of an empty walk");
    // Position of v in w1: the first occurrence after the start, so that a walk
    // starting at v is spliced at its closing visit.
    std::size_t pos = w1.seq.size();
    for (std::size_t i = (w1.seq.size() > 1 ? 1 : 0); i < w1.seq.size(); ++i)
        if (w1.seq[i] == v) {
            pos = i;
            break;
        }
    if (pos == w1.seq.size()) throw std::invalid_argument("vertex absent from the first walk");
    Walk z = rotate_closed(w2, v);
    Walk s{{}, true};
    s.seq.assign(w1.seq.begin(), w1.seq.begin() + pos + 1);
    s.seq.insert(s.seq.end(), z.seq.begin() + 1, z.seq.end());
    s.seq.insert(s.seq.end(), w1.seq.begin() + pos + 1, w1.seq.end());
    return s;
}

EulerResult euler_closed_walk(const Digraph& g) {
    int n = g.num_vertices();
    EulerResult res;
    res.walk.closed = true;
    if (g.num_arcs() == 0) return res;
    for (int v = 0; v < n; ++v)
        if (g.out_arcs(v).size() != g.in_arcs(v).size()) throw std::invalid_argument("unbalanced vertex");
    int start = g.arc(0).src;
    std::vector<std::size_t> ptr(n, 0);
    // Hierholzer with explicit stacks of (vertex, arc used to reach it).
    std::vector<std::pair<int, int>> stack{{start, -1}};
    std::vector<std::pair<int, int>> circuit;
    while (!stack.empty()) {
        int v = stack.back().first;
        if (ptr[v] < g.out_arcs(v).size()) {
            int a = g.out_arcs(v)[ptr[v]++];
            stack.push_back({g.arc(a).dst, a});
        } else {
            circuit.push_back(stack.back());
            stack.pop_back();
        }
    }
    if (static_cast<int>(circuit.size()) != g.num_arcs() + 1) throw std::invalid_argument("arcs are not connected");
    std::reverse(circuit.begin(), circuit.end());
    for (auto& [v, a] : circuit) {
        res.walk.seq.push_back(v);
        if (a >= 0) res.arc_order.push_back(a);
    }
    return res;
}

bool CutSide::proper() const {
    bool any_in = false, any_out = false;
    for (char c : in) (c ? any_in : any_out) = true;
    return any_in && any_out;
}

CutSide CutSide::from_mask(std::uint64_t mask, int n) {
    CutSide c;
    c.in.resize(n);
    for (int v = 0; v < n; ++v) c.in[v] = (mask >> v) & 1u;
    return c;
}

std::vector<int> cut_arcs(const Digraph& g, const CutSide& u, CutMode mode) {
    if (mode == CutMode::Undirected) return cut_edges(symmetrize(g).graph, u);
    std::vector<int> r;
    for (int i = 0; i < g.num_arcs(); ++i) {
        bool s = u.in[g.arc(i).src], t = u.in[g.arc(i).dst];
        if ((mode == CutMode::Out && s && !t) || (mode == CutMode::In && !s && t)) r.push_back(i);
    }
    return r;
}

std::vector<int> cut_edges(const Ugraph& g, const CutSide& u) {
    std::vector<int> r;
    for (int i = 0; i < g.num_edges(); ++i)
        if (u.in[g.edge(i).u] != u.in[g.edge(i).v]) r.push_back(i);
    return r;
}

void write_graph(std::ostream& os, const Digraph& g) {
    os << "digraph " << g.num_vertices() << " " << g.num_arcs() << "\n";
    for (int v = 0; v < g.num_vertices(); ++v) {
        os << "v " << v;
        if (!g.label(v).empty()) os << " " << g.label(v);
        os << "\n";
    }
    for (const Arc& a : g.arcs()) os << "a " << a.src << " " << a.dst << " " << a.cost.num() << "/" << a.cost.den() << "\n";
}

std::vector<std::string> read_content_lines(std::istream& is) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        lines.push_back(line.substr(b, e - b + 1));
    }
    return lines;
}

Digraph parse_graph_lines(const std::vector<std::string>& lines, std::size_t& pos) {
    if (pos >= lines.size()) throw std::invalid_argument("missing digraph header");
    std::istringstream hs(lines[pos]);
    std::string kw;
    long n = -1, m = -1;
    hs >> kw >> n >> m;
    if (kw != "digraph" || !hs || n < 0 || m < 0) throw std::invalid_argument("bad digraph header: " + lines[pos]);
    ++pos;
    Digraph g(static_cast<int>(n));
    long seen_v = 0, seen_a = 0;
    while (pos < lines.size()) {
        std::istringstream ls(lines[pos]);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            long id;
            if (!(ls >> id) || id < 0 || id >= n) throw std::invalid_argument("bad vertex line: " + lines[pos]);
            std::string label;
            if (ls >> label) g.set_label(static_cast<int>(id), label);
            ++seen_v;
        } else if (tag == "a") {
            long s, t;
            std::string c;
            if (!(ls >> s >> t >> c)) throw std::invalid_argument("bad arc line: " + lines[pos]);
            if (s < 0 || t < 0 || s >= n || t >= n) throw std::invalid_argument("arc endpoint out of range: " + lines[pos]);
            g.add_arc(static_cast<int>(s), static_cast<int>(t), Rational::parse(c));
            ++seen_a;
        } else {
            break;
        }
        ++pos;
    }
    if (seen_a != m) throw std::invalid_argument("arc count does not match header");
    if (seen_v != 0 && seen_v != n) throw std::invalid_argument("vertex count does not match header");
    return g;
}

Digraph read_graph(std::istream& is) {
    auto lines = read_content_lines(is);
    std::size_t pos = 0;
    Digraph g = parse_graph_lines(lines, pos);
    if (pos != lines.size()) throw std::invalid_argument("trailing content after graph: " + lines[pos]);
    return g;
}

}  // namespace vatsp
