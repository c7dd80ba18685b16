#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vatsp/rational.hpp"

namespace vatsp {

struct Arc {
    int src = 0;
    int dst = 0;
    Rational cost;
};

// Directed multigraph on vertices 0..n-1 with nonnegative rational arc costs.
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(int n);

    int add_vertex(std::string label = {});
    int add_arc(int src, int dst, Rational cost);
    void set_cost(int arc, Rational cost);

    int num_vertices() const { return static_cast<int>(out_.size()); }
    int num_arcs() const { return static_cast<int>(arcs_.size()); }
    const Arc& arc(int i) const { return arcs_[i]; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<int>& out_arcs(int v) const { return out_[v]; }
    const std::vector<int>& in_arcs(int v) const { return in_[v]; }
    const std::string& label(int v) const { return labels_[v]; }
    void set_label(int v, std::string s) { labels_[v] = std::move(s); }

    // Cheapest arc src->dst (lowest index among ties), or -1.
    int find_arc(int src, int dst) const;

    // Subgraph keeping only arcs with keep[i] set; vertex ids unchanged.
    Digraph filter_arcs(const std::vector<char>& keep) const;
    // Induced subgraph on `vertices` (renumbered in the given order).
    Digraph induced(const std::vector<int>& vertices) const;

    bool strongly_connected() const;

private:
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_, in_;
    std::vector<std::string> labels_;
};

struct Edge {
    int u = 0;
    int v = 0;
    Rational cost;
    int other(int w) const { return w == u ? v : u; }
};

// Undirected multigraph.
class Ugraph {
public:
    Ugraph() = default;
    explicit Ugraph(int n) : inc_(n) {}

    int add_vertex() {
        inc_.emplace_back();
        return num_vertices() - 1;
    }
    int add_edge(int u, int v, Rational cost);
    int num_vertices() const { return static_cast<int>(inc_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int i) const { return edges_[i]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& incident(int v) const { return inc_[v]; }
    int find_edge(int u, int v) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> inc_;
};

// One undirected edge per unordered pair joined by at least one arc; cost is the
// minimum over the arcs of the pair. arc_to_edge maps each arc to its edge.
struct Symmetrization {
    Ugraph graph;
    std::vector<int> arc_to_edge;
};

Symmetrization symmetrize(const Digraph& g);

// All-pairs shortest paths. Among minimum-cost paths the one with fewest arcs is
// preferred, then the lexicographically smallest vertex sequence, so every path
// is unique and suffix-consistent.
class MetricClosure {
public:
    MetricClosure() = default;
    explicit MetricClosure(const Digraph& g);

    int num_vertices() const { return n_; }
    const Rational& dist(int u, int v) const { return dist_[idx(u, v)]; }
    bool reachable(int u, int v) const { return !dist(u, v).is_inf(); }
    int hops(int u, int v) const { return hops_[idx(u, v)]; }
    int next_hop(int u, int v) const { return next_[idx(u, v)]; }
    // Vertex sequence u..v of the canonical shortest path; {u} when u == v.
    std::vector<int> path(int u, int v) const;

private:
    std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u) * n_ + v; }
    int n_ = 0;
    std::vector<Rational> dist_;
    std::vector<int> hops_;
    std::vector<int> next_;
};

// Reference Floyd-Warshall distances, used for cross-checking.
std::vector<std::vector<Rational>> floyd_warshall(const Digraph& g);

struct Walk {
    std::vector<int> seq;
    // Closed walks repeat the start at the end; a single vertex is a closed walk of cost 0.
    bool closed = false;

    bool empty() const { return seq.empty(); }
    int num_steps() const { return seq.empty() ? 0 : static_cast<int>(seq.size()) - 1; }
};

Rational walk_cost(const MetricClosure& d, const Walk& w);
// Cost using the cheapest arc for every step; throws if a step has no arc.
Rational walk_arc_cost(const Digraph& g, const Walk& w);
bool walk_uses_arcs(const Digraph& g, const Walk& w);
// Rotates a closed walk to start (and end) at the first occurrence of v.
Walk rotate_closed(const Walk& w, int v);
// Replaces every step by the canonical shortest path.
Walk expand_walk(const MetricClosure& d, const Walk& w);
std::vector<char> visited_set(const Walk& w, int n);

// Splices w2 into w1 at v (first occurrence of v after the start of w1).
Walk shortcut(const Walk& w1, const Walk& w2, int v);

// Eulerian circuit through every arc of g exactly once (isolated vertices ignored).
// Returns the walk and the arc index of every step.
struct EulerResult {
    Walk walk;
    std::vector<int> arc_order;
};
EulerResult euler_closed_walk(const Digraph& g);

// Vertex subset of a cut; in[v] != 0 means v is in U.
struct CutSide {
    std::vector<char> in;
    bool proper() const;
    static CutSide from_mask(std::uint64_t mask, int n);
};

enum class CutMode { Out, In, Undirected };

// Out/In return arc indices of g; Undirected returns edge indices of symmetrize(g).
std::vector<int> cut_arcs(const Digraph& g, const CutSide& u, CutMode mode);
std::vector<int> cut_edges(const Ugraph& g, const CutSide& u);

void write_graph(std::ostream& os, const Digraph& g);
Digraph read_graph(std::istream& is);
// Parses a `digraph` header plus its `v`/`a` records starting at lines[pos];
// advances pos past them. Blank lines and `#` comments must already be stripped.
Digraph parse_graph_lines(const std::vector<std::string>& lines, std::size_t& pos);
std::vector<std::string> read_content_lines(std::istream& is);

}  // namespace vatsp
