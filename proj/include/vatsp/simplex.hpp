#pragma once

#include <utility>
#include <vector>

#include "vatsp/rational.hpp"

namespace vatsp {

// minimize cost.x  subject to rows (= or >= rhs), x >= 0.
struct LpProblem {
    enum class Sense { Eq, Ge };
    struct Row {
        std::vector<std::pair<int, Rational>> coef;
        Sense sense = Sense::Ge;
        Rational rhs;
    };
    int num_vars = 0;
    std::vector<Rational> cost;
    std::vector<Row> rows;
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    std::vector<Rational> x;
    Rational objective;
    long pivots = 0;
    // True when the 64-bit tableau overflowed and the solve was redone with GMP.
    bool used_bigint = false;
};

// Two-phase primal simplex with Bland's rule, exact arithmetic.
LpSolution solve_simplex(const LpProblem& lp);

}  // namespace vatsp
