#include "vatsp/cutscan.hpp"

#include <numeric>
#include <stdexcept>

namespace vatsp {

namespace {

void check_size(const CutScanGraph& g) {
    if (g.n < 2 || g.n > kMaxExhaustiveVertices) throw std::invalid_argument("cut scan size out of range");
}

inline bool crosses(std::uint64_t mask, int u, int v) { return ((mask >> u) ^ (mask >> v)) & 1u; }

inline std::int64_t cut_weight(const CutScanGraph& g, std::uint64_t mask) {
    std::int64_t w = 0;
    for (std::size_t e = 0; e < g.ends.size(); ++e)
        if (crosses(mask, g.ends[e].first, g.ends[e].second)) w += g.weight[e];
    return w;
}

inline std::int64_t out_weight(const CutScanGraph& g, std::uint64_t mask) {
    std::int64_t w = 0;
    for (std::size_t e = 0; e < g.ends.size(); ++e)
        if (((mask >> g.ends[e].first) & 1u) && !((mask >> g.ends[e].second) & 1u)) w += g.weight[e];
    return w;
}

inline CutRatio ratio_at(const CutScanGraph& g, std::uint64_t mask) {
    CutRatio r;
    r.weight = 0;
    r.mask = mask;
    for (std::size_t e = 0; e < g.ends.size(); ++e)
        if (crosses(mask, g.ends[e].first, g.ends[e].second)) {
            r.weight += g.weight[e];
            r.count += g.count[e];
        }
    if (r.weight == 0) {
        r.infinite = r.count > 0;
        r.weight = 1;
    }
    return r;
}

// a strictly better than b (larger ratio, then smaller mask).
inline bool better(const CutRatio& a, const CutRatio& b) {
    if (a.infinite != b.infinite) return a.infinite;
    if (!a.infinite) {
        __int128 l = static_cast<__int128>(a.count) * b.weight;
        __int128 r = static_cast<__int128>(b.count) * a.weight;
        if (l != r) return l > r;
    }
    return a.mask < b.mask;
}

inline bool smaller(const CutMin& a, const CutMin& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.mask < b.mask;
}

}  // namespace

CutMin undirected_min_cut_serial(const CutScanGraph& g) {
    check_size(g);
    std::uint64_t total = std::uint64_t{1} << (g.n - 1);
    CutMin best{cut_weight(g, 1), 1};
    for (std::uint64_t mask = 2; mask < total; ++mask) {
        CutMin c{cut_weight(g, mask), mask};
        if (smaller(c, best)) best = c;
    }
    return best;
}

CutMin undirected_min_cut_parallel(const CutScanGraph& g) {
    check_size(g);
    const std::int64_t total = std::int64_t{1} << (g.n - 1);
    CutMin best{cut_weight(g, 1), 1};
#pragma omp parallel
    {
        CutMin local = best;
#pragma omp for schedule(static)
        for (std::int64_t mask = 2; mask < total; ++mask) {
            CutMin c{cut_weight(g, static_cast<std::uint64_t>(mask)), static_cast<std::uint64_t>(mask)};
            if (smaller(c, local)) local = c;
        }
#pragma omp critical
        if (smaller(local, best)) best = local;
    }
    return best;
}

CutRatio undirected_max_ratio_serial(const CutScanGraph& g) {
    check_size(g);
    std::uint64_t total = std::uint64_t{1} << (g.n - 1);
    CutRatio best = ratio_at(g, 1);
    for (std::uint64_t mask = 2; mask < total; ++mask) {
        CutRatio c = ratio_at(g, mask);
        if (better(c, best)) best = c;
    }
    return best;
}

CutRatio undirected_max_ratio_parallel(const CutScanGraph& g) {
    check_size(g);
    const std::int64_t total = std::int64_t{1} << (g.n - 1);
    CutRatio best = ratio_at(g, 1);
#pragma omp parallel
    {
        CutRatio local = best;
#pragma omp for schedule(static)
        for (std::int64_t mask = 2; mask < total; ++mask) {
            CutRatio c = ratio_at(g, static_cast<std::uint64_t>(mask));
            if (better(c, local)) local = c;
        }
#pragma omp critical
        if (better(local, best)) best = local;
    }
    return best;
}

CutMin directed_min_out_cut_serial(const CutScanGraph& g) {
    check_size(g);
    std::uint64_t full = (std::uint64_t{1} << g.n) - 1;
    CutMin best{out_weight(g, 1), 1};
    for (std::uint64_t mask = 2; mask < full; ++mask) {
        CutMin c{out_weight(g, mask), mask};
        if (smaller(c, best)) best = c;
    }
    return best;
}

CutMin directed_min_out_cut_parallel(const CutScanGraph& g) {
    check_size(g);
    const std::int64_t full = (std::int64_t{1} << g.n) - 1;
    CutMin best{out_weight(g, 1), 1};
#pragma omp parallel
    {
        CutMin local = best;
#pragma omp for schedule(static)
        for (std::int64_t mask = 2; mask < full; ++mask) {
            CutMin c{out_weight(g, static_cast<std::uint64_t>(mask)), static_cast<std::uint64_t>(mask)};
            if (smaller(c, local)) local = c;
        }
#pragma omp critical
        if (smaller(local, best)) best = local;
    }
    return best;
}

ScaledValues scale_to_integers(const std::vector<Rational>& values) {
    ScaledValues s;
    __int128 l = 1;
    for (const Rational& v : values) {
        if (v.is_inf()) throw std::invalid_argument("cannot scale infinity");
        __int128 d = v.den();
        __int128 g = std::gcd(static_cast<std::int64_t>(l), v.den());
        l = l / g * d;
        if (l > INT64_MAX) throw RationalOverflow("common denominator overflow");
    }
    s.scale = static_cast<std::int64_t>(l);
    s.values.reserve(values.size());
    for (const Rational& v : values) {
        __int128 x = static_cast<__int128>(v.num()) * (l / v.den());
        if (x > INT64_MAX || x < INT64_MIN) throw RationalOverflow("scaled value overflow");
        s.values.push_back(static_cast<std::int64_t>(x));
    }
    return s;
}

}  // namespace vatsp
