#include "vatsp/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace vatsp {

OracleResult oracle_closed_walk(const Digraph& g, const MetricClosure& d, const std::vector<int>& targets,
                                int guard) {
    (void)g;
    const int k = static_cast<int>(targets.size());
    if (k > guard) throw GuardExceeded("oracle guard exceeded");
    OracleResult res;
    if (k == 0) {
        res.feasible = true;
        res.cost = Rational(0);
        return res;
    }
    if (k == 1) {
        res.feasible = true;
        res.cost = Rational(0);
        res.walk.seq = {targets[0]};
        res.walk.closed = true;
        return res;
    }
    // dp[mask][j]: cheapest path from targets[0] through mask ending at targets[j].
    const std::size_t full = std::size_t{1} << k;
    std::vector<Rational> dp(full * k, Rational::infinity());
    std::vector<int> from(full * k, -1);
    dp[1 * k + 0] = Rational(0);
    for (std::size_t mask = 1; mask < full; mask += 2) {
        for (int j = 0; j < k; ++j) {
            const Rational& cur = dp[mask * k + j];
            if (cur.is_inf()) continue;
            for (int t = 1; t < k; ++t) {
                if (mask >> t & 1) continue;
                const Rational& step = d.dist(targets[j], targets[t]);
                if (step.is_inf()) continue;
                std::size_t nm = mask | (std::size_t{1} << t);
                Rational c = cur + step;
                if (c < dp[nm * k + t]) {
                    dp[nm * k + t] = c;
                    from[nm * k + t] = j;
                }
            }
        }
    }
    int last = -1;
    Rational best = Rational::infinity();
    for (int j = 1; j < k; ++j) {
        const Rational& cur = dp[(full - 1) * k + j];
        const Rational& back = d.dist(targets[j], targets[0]);
        if (cur.is_inf() || back.is_inf()) continue;
        Rational c = cur + back;
        if (c < best) {
            best = c;
            last = j;
        }
    }
    if (last < 0) return res;
    std::vector<int> order;
    std::size_t mask = full - 1;
    for (int j = last; j != 0;) {
        order.push_back(targets[j]);
        int p = from[mask * k + j];
        mask &= ~(std::size_t{1} << j);
        j = p;
    }
    order.push_back(targets[0]);
    std::reverse(order.begin(), order.end());
    order.push_back(targets[0]);
    Walk w;
    w.seq = order;
    w.closed = true;
    res.walk = expand_walk(d, w);
    res.feasible = true;
    res.cost = best;
    return res;
}

OracleResult oracle_closed_walk(const Digraph& g, const std::vector<int>& targets, int guard) {
    if (static_cast<int>(targets.size()) > guard) throw GuardExceeded("oracle guard exceeded");
    MetricClosure d(g);
    return oracle_closed_walk(g, d, targets, guard);
}

OracleResult oracle_atsp(const Digraph& g, int guard) {
    std::vector<int> all(g.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    return oracle_closed_walk(g, all, guard);
}

Rational brute_force_tour_cost(const MetricClosure& d, const std::vector<int>& targets) {
    if (targets.size() > 9) throw GuardExceeded("permutation scan guard exceeded");
    if (targets.size() <= 1) return Rational(0);
    std::vector<int> rest(targets.begin() + 1, targets.end());
    std::sort(rest.begin(), rest.end());
    Rational best = Rational::infinity();
    do {
        Rational c(0);
        int prev = targets[0];
        bool ok = true;
        for (int v : rest) {
            if (!d.reachable(prev, v)) {
                ok = false;
                break;
            }
            c += d.dist(prev, v);
            prev = v;
        }
        if (!ok || !d.reachable(prev, targets[0])) continue;
        c += d.dist(prev, targets[0]);
        best = min(best, c);
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

}  // namespace vatsp
