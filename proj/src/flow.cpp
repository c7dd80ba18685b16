#include "vatsp/flow.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace vatsp {

void FlowNetwork::add_edge(int u, int v, Rational cap) {
    adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, Rational(0), static_cast<int>(adj_[u].size()) - 1});
}

Rational FlowNetwork::max_flow(int s, int t) {
    int n = static_cast<int>(adj_.size());
    Rational total(0);
    for (;;) {
        std::vector<std::pair<int, int>> prev(n, {-1, -1});
        std::deque<int> q{s};
        prev[s] = {s, -1};
        while (!q.empty() && prev[t].first < 0) {
            int v = q.front();
            q.pop_front();
            for (int i = 0; i < static_cast<int>(adj_[v].size()); ++i) {
                const E& e = adj_[v][i];
                if (prev[e.to].first >= 0 || !(Rational(0) < e.cap)) continue;
                prev[e.to] = {v, i};
                q.push_back(e.to);
            }
        }
        if (prev[t].first < 0) break;
        Rational push = Rational::infinity();
        for (int v = t; v != s; v = prev[v].first) push = min(push, adj_[prev[v].first][prev[v].second].cap);
        for (int v = t; v != s; v = prev[v].first) {
            E& e = adj_[prev[v].first][prev[v].second];
            e.cap -= push;
            adj_[v][e.rev].cap += push;
        }
        total += push;
    }
    return total;
}

std::vector<char> FlowNetwork::source_side(int s) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const E& e : adj_[v])
            if (!seen[e.to] && Rational(0) < e.cap) {
                seen[e.to] = 1;
                stack.push_back(e.to);
            }
    }
    return seen;
}

std::optional<std::vector<std::int64_t>> min_cost_circulation(int n, const std::vector<CircArc>& arcs) {
    // Residual graph with super source S = n and sink T = n + 1.
    struct R {
        int to;
        std::int64_t cap;
        Rational cost;
        int rev;
        int orig;  // index into arcs for forward residuals, -1 otherwise
    };
    int S = n, T = n + 1, N = n + 2;
    std::vector<std::vector<R>> g(N);
    auto add = [&](int u, int v, std::int64_t cap, Rational cost, int orig) {
        g[u].push_back({v, cap, cost, static_cast<int>(g[v].size()), orig});
        g[v].push_back({u, 0, -cost, static_cast<int>(g[u].size()) - 1, -1});
    };
    std::vector<std::int64_t> excess(n, 0);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const CircArc& a = arcs[i];
        if (a.lower < 0 || a.upper < a.lower) throw std::invalid_argument("bad circulation bounds");
        if (a.cost < Rational(0)) throw std::invalid_argument("negative circulation cost");
        if (a.upper > a.lower) add(a.u, a.v, a.upper - a.lower, a.cost, static_cast<int>(i));
        excess[a.v] += a.lower;
        excess[a.u] -= a.lower;
    }
    std::int64_t need = 0;
    for (int v = 0; v < n; ++v) {
        if (excess[v] > 0) {
            add(S, v, excess[v], Rational(0), -1);
            need += excess[v];
        } else if (excess[v] < 0) {
            add(v, T, -excess[v], Rational(0), -1);
        }
    }
    std::int64_t sent = 0;
    while (sent < need) {
        // Bellman-Ford (SPFA) on the residual graph.
        std::vector<Rational> dist(N, Rational::infinity());
        std::vector<std::pair<int, int>> prev(N, {-1, -1});
        std::vector<char> inq(N, 0);
        std::deque<int> q{S};
        dist[S] = Rational(0);
        inq[S] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            inq[v] = 0;
            for (int i = 0; i < static_cast<int>(g[v].size()); ++i) {
                const R& e = g[v][i];
                if (e.cap <= 0) continue;
                Rational nd = dist[v] + e.cost;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    prev[e.to] = {v, i};
                    if (!inq[e.to]) {
                        inq[e.to] = 1;
                        q.push_back(e.to);
                    }
                }
            }
        }
        if (dist[T].is_inf()) return std::nullopt;
        std::int64_t push = need - sent;
        for (int v = T; v != S; v = prev[v].first) push = std::min(push, g[prev[v].first][prev[v].second].cap);
        for (int v = T; v != S; v = prev[v].first) {
            R& e = g[prev[v].first][prev[v].second];
            e.cap -= push;
            g[v][e.rev].cap += push;
        }
        sent += push;
    }
    std::vector<std::int64_t> flow(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) flow[i] = arcs[i].lower;
    for (int v = 0; v < N; ++v)
        for (const R& e : g[v])
            if (e.orig >= 0) flow[e.orig] += (arcs[e.orig].upper - arcs[e.orig].lower) - e.cap;
    return flow;
}

}  // namespace vatsp
