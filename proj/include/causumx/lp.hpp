#pragma once

#include <limits>
#include <vector>

namespace causumx::lp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEq, GreaterEq, Equal };

struct Constraint {
    std::vector<double> coeffs;  // dense over structural variables
    Sense sense = Sense::LessEq;
    double rhs = 0.0;
};

// maximize objective . x  subject to rows, 0 <= x <= upper.
struct Problem {
    std::vector<double> objective;
    std::vector<double> upper;  // kInfinity allowed
    std::vector<Constraint> rows;
};

enum class SolveStatus { Optimal, Infeasible };

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> rowDuals;  // one per constraint, for optimality certificates
};

// Two-phase primal simplex with explicit variable upper bounds and Bland's
// anti-cycling rule. Throws EngineError on unbounded problems or pivot-limit
// exhaustion.
Solution solve(const Problem& p);

}  // namespace causumx::lp
