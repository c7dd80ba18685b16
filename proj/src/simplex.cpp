#include "vatsp/simplex.hpp"

#include <gmpxx.h>

#include <limits>
#include <stdexcept>

namespace vatsp {

namespace {

template <class T>
T from_rational(const Rational& r);
template <>
Rational from_rational<Rational>(const Rational& r) {
    return r;
}
template <>
mpq_class from_rational<mpq_class>(const Rational& r) {
    mpz_class n, d;
    mpz_set_si(n.get_mpz_t(), r.num());
    mpz_set_si(d.get_mpz_t(), r.den());
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

Rational to_rational(const Rational& r) { return r; }
Rational to_rational(const mpq_class& q) {
    if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) throw RationalOverflow("LP value exceeds 64 bits");
    return Rational(q.get_num().get_si(), q.get_den().get_si());
}

bool is_zero(const Rational& r) { return r.is_zero(); }
bool is_zero(const mpq_class& q) { return sgn(q) == 0; }
bool is_neg(const Rational& r) { return r < Rational(0); }
bool is_neg(const mpq_class& q) { return sgn(q) < 0; }
bool is_pos(const Rational& r) { return Rational(0) < r; }
bool is_pos(const mpq_class& q) { return sgn(q) > 0; }

template <class T>
class Tableau {
public:
    // rows x (cols + 1); last column is the right-hand side.
    int m = 0, cols = 0;
    std::vector<std::vector<T>> a;
    std::vector<T> obj;  // reduced costs, last entry is -objective
    std::vector<int> basis;
    long pivots = 0;

    void pivot(int r, int c) {
        ++pivots;
        T p = a[r][c];
        std::vector<int> nz;
        for (int j = 0; j <= cols; ++j) {
            if (is_zero(a[r][j])) continue;
            a[r][j] /= p;
            nz.push_back(j);
        }
        for (int i = 0; i < m; ++i) {
            if (i == r || is_zero(a[i][c])) continue;
            T f = a[i][c];
            for (int j : nz) a[i][j] -= f * a[r][j];
        }
        if (!is_zero(obj[c])) {
            T f = obj[c];
            for (int j : nz) obj[j] -= f * a[r][j];
        }
        basis[r] = c;
    }

    // Bland's rule. allowed[j] == false columns never enter.
    bool optimize(const std::vector<char>& allowed) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < cols; ++j)
                if (allowed[j] && is_neg(obj[j])) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            T best;
            for (int i = 0; i < m; ++i) {
                if (!is_pos(a[i][enter])) continue;
                T ratio = a[i][cols] / a[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

template <class T>
LpSolution solve_typed(const LpProblem& lp) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());
    int surplus = 0;
    for (const auto& r : lp.rows)
        if (r.sense == LpProblem::Sense::Ge) ++surplus;
    // Columns: originals, surplus, artificials.
    const int art0 = n + surplus;
    Tableau<T> t;
    t.m = m;
    t.cols = art0 + m;
    t.a.assign(m, std::vector<T>(t.cols + 1, T(0)));
    t.basis.assign(m, -1);
    int s = n;
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.rows[i];
        bool flip = row.rhs < Rational(0);
        for (auto& [j, c] : row.coef) t.a[i][j] += from_rational<T>(flip ? -c : c);
        if (row.sense == LpProblem::Sense::Ge) {
            t.a[i][s] = T(flip ? 1 : -1);
            ++s;
        }
        t.a[i][t.cols] = from_rational<T>(flip ? -row.rhs : row.rhs);
        t.a[i][art0 + i] = T(1);
        t.basis[i] = art0 + i;
    }
    // Phase 1: minimize the sum of artificials.
    t.obj.assign(t.cols + 1, T(0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= t.cols; ++j)
            if (j < art0 || j == t.cols) t.obj[j] -= t.a[i][j];
    std::vector<char> allowed(t.cols, 1);
    t.optimize(allowed);
    LpSolution sol;
    if (!is_zero(t.obj[t.cols])) {
        sol.status = LpSolution::Status::Infeasible;
        sol.pivots = t.pivots;
        return sol;
    }
    // Drive artificials out of the basis; drop redundant rows.
    for (int i = 0; i < t.m; ++i) {
        if (t.basis[i] < art0) continue;
        int c = -1;
        for (int j = 0; j < art0; ++j)
            if (!is_zero(t.a[i][j])) {
                c = j;
                break;
            }
        if (c >= 0) {
            t.pivot(i, c);
        } else {
            t.a.erase(t.a.begin() + i);
            t.basis.erase(t.basis.begin() + i);
            --t.m;
            --i;
        }
    }
    for (int j = art0; j < t.cols; ++j) allowed[j] = 0;
    // Phase 2 objective in terms of the current basis.
    t.obj.assign(t.cols + 1, T(0));
    for (int j = 0; j < n; ++j) t.obj[j] = from_rational<T>(lp.cost[j]);
    for (int i = 0; i < t.m; ++i) {
        int b = t.basis[i];
        if (is_zero(t.obj[b])) continue;
        T f = t.obj[b];
        for (int j = 0; j <= t.cols; ++j)
            if (!is_zero(t.a[i][j])) t.obj[j] -= f * t.a[i][j];
    }
    if (!t.optimize(allowed)) {
        sol.status = LpSolution::Status::Unbounded;
        sol.pivots = t.pivots;
        return sol;
    }
    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(n, Rational(0));
    for (int i = 0; i < t.m; ++i)
        if (t.basis[i] < n) sol.x[t.basis[i]] = to_rational(t.a[i][t.cols]);
    Rational objective(0);
    for (int j = 0; j < n; ++j) objective += lp.cost[j] * sol.x[j];
    sol.objective = objective;
    sol.pivots = t.pivots;
    return sol;
}

}  // namespace

LpSolution solve_simplex(const LpProblem& lp) {
    if (static_cast<int>(lp.cost.size()) != lp.num_vars) throw std::invalid_argument("cost vector size mismatch");
    try {
        return solve_typed<Rational>(lp);
    } catch (const RationalOverflow&) {
        LpSolution s = solve_typed<mpq_class>(lp);
        s.used_bigint = true;
        return s;
    }
}

}  // namespace vatsp
