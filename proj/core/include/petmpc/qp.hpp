#pragma once

#include "petmpc/types.hpp"

namespace petmpc {

enum class QpStatus { Optimal, Infeasible };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  double kkt_residual = 0.0;  // inf-norm of stationarity + violation measures
};

// Solves  min 1/2 x'G x + g'x  s.t.  A x <= b  with G symmetric positive
// definite, by a primal active-set method (feasible start from a phase-1 LP).
QpResult solve_qp(const Matrix& G, const Vector& g, const Matrix& A, const Vector& b);

}  // namespace petmpc
