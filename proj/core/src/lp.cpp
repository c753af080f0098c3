#include "petmpc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace petmpc {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Classic dense tableau simplex over the standard-form tableau T (rows m,
// columns n+1 with the rhs last).  Bland's rule, so no cycling.
// Returns false when the problem is unbounded in the current objective.
bool pivot_loop(Matrix& T, Vector& obj, double& obj_val, std::vector<int>& basis,
                const std::vector<bool>& allowed) {
  const int m = static_cast<int>(T.rows());
  const int n = static_cast<int>(T.cols()) - 1;
  const long max_iters = 50L * (m + n) * (m + n) + 1000;
  for (long iter = 0; iter < max_iters; ++iter) {
    int enter = -1;
    for (int j = 0; j < n; ++j) {
      if (allowed[j] && obj(j) < -kFeasTol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) return true;  // optimal
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > kPivotTol) {
        const double ratio = T(i, n) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded
    // pivot on (leave, enter)
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i < m; ++i) {
      if (i != leave && std::abs(T(i, enter)) > 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    obj_val += obj(enter) * T(leave, n);
    obj -= obj(enter) * T.row(leave).head(n).transpose();
    basis[leave] = enter;
  }
  throw NumericalFailure("simplex: iteration limit exceeded");
}

}  // namespace

LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b) {
  const int q = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (c.size() != d || b.size() != q) throw ContractViolation("solve_lp: dimension mismatch");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite())
    throw ContractViolation("solve_lp: non-finite input");

  // Standard form: y = [x+, x-, slack, artificial] >= 0.
  std::vector<int> art_row;  // rows that need an artificial (negated rhs)
  for (int i = 0; i < q; ++i)
    if (b(i) < 0) art_row.push_back(i);
  const int n_art = static_cast<int>(art_row.size());
  const int n = 2 * d + q + n_art;

  Matrix T = Matrix::Zero(q, n + 1);
  std::vector<int> basis(q);
  for (int i = 0; i < q; ++i) {
    const double sgn = (b(i) < 0) ? -1.0 : 1.0;
    T.block(i, 0, 1, d) = sgn * A.row(i);
    T.block(i, d, 1, d) = -sgn * A.row(i);
    T(i, 2 * d + i) = sgn;  // slack
    T(i, n) = sgn * b(i);
    basis[i] = 2 * d + i;
  }
  for (int k = 0; k < n_art; ++k) {
    T(art_row[k], 2 * d + q + k) = 1.0;
    basis[art_row[k]] = 2 * d + q + k;
  }

  std::vector<bool> allowed(n, true);

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    Vector obj = Vector::Zero(n);
    double obj_val = 0.0;
    for (int k = 0; k < n_art; ++k) {
      obj -= T.row(art_row[k]).head(n).transpose();
      obj_val += T(art_row[k], n);
      obj(2 * d + q + k) += 1.0;  // cost of the artificial itself
    }
    if (!pivot_loop(T, obj, obj_val, basis, allowed))
      throw NumericalFailure("simplex: phase-1 unbounded");
    if (obj_val > kFeasTol) return LpResult{LpStatus::Infeasible, Vector(), 0.0};
    // Drive leftover artificials out of the basis where possible.
    for (int i = 0; i < q; ++i) {
      if (basis[i] >= 2 * d + q) {
        int piv = -1;
        for (int j = 0; j < 2 * d + q; ++j) {
          if (std::abs(T(i, j)) > 1e-8) {
            piv = j;
            break;
          }
        }
        if (piv >= 0) {
          T.row(i) /= T(i, piv);
          for (int r = 0; r < q; ++r)
            if (r != i && std::abs(T(r, piv)) > 0.0) T.row(r) -= T(r, piv) * T.row(i);
          basis[i] = piv;
        }
        // A fully zero row means the constraint is redundant; the artificial
        // stays basic at level zero and is simply barred from re-entering.
      }
    }
    for (int k = 0; k < n_art; ++k) allowed[2 * d + q + k] = false;
  }

  // Phase 2: minimize c'(x+ - x-).
  Vector obj = Vector::Zero(n);
  obj.head(d) = c;
  obj.segment(d, d) = -c;
  double obj_val = 0.0;
  for (int i = 0; i < q; ++i) {
    if (allowed[basis[i]] && std::abs(obj(basis[i])) > 0.0) {
      obj_val += obj(basis[i]) * T(i, n);
      obj -= obj(basis[i]) * T.row(i).head(n).transpose();
    }
  }
  if (!pivot_loop(T, obj, obj_val, basis, allowed)) {
    return LpResult{LpStatus::Unbounded, Vector(), 0.0};
  }

  Vector y = Vector::Zero(n);
  for (int i = 0; i < q; ++i) y(basis[i]) = T(i, n);
  LpResult res;
  res.status = LpStatus::Optimal;
  res.x = y.head(d) - y.segment(d, d);
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace petmpc
