#pragma once

#include "petmpc/types.hpp"

namespace petmpc {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;          // optimizer (valid when Optimal)
  double objective = 0.0;
};

// Solves  min c'x  s.t.  A x <= b,  x free.
// Dense two-phase simplex with Bland's rule; sized for the small problems
// polytope queries generate (a few variables, tens of rows).
LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b);

}  // namespace petmpc
