#include "petmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "petmpc/lp.hpp"

namespace petmpc {

namespace {

// Solve the equality-constrained subproblem at x over the working set:
//   [G  Aw'] [p]   [-(Gx+g)]
//   [Aw  0 ] [l] = [   0   ]
void solve_kkt(const Matrix& G, const Vector& grad, const Matrix& Aw, Vector& p, Vector& lam) {
  const int n = static_cast<int>(G.rows());
  const int k = static_cast<int>(Aw.rows());
  Matrix K = Matrix::Zero(n + k, n + k);
  K.topLeftCorner(n, n) = G;
  if (k > 0) {
    K.topRightCorner(n, k) = Aw.transpose();
    K.bottomLeftCorner(k, n) = Aw;
  }
  Vector rhs = Vector::Zero(n + k);
  rhs.head(n) = -grad;
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) throw NumericalFailure("solve_qp: singular KKT system");
  Vector sol = lu.solve(rhs);
  p = sol.head(n);
  lam = sol.tail(k);
}

}  // namespace

QpResult solve_qp(const Matrix& G, const Vector& g, const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(G.rows());
  const int m = static_cast<int>(A.rows());
  if (G.cols() != n || g.size() != n || (m > 0 && A.cols() != n) || b.size() != m)
    throw ContractViolation("solve_qp: dimension mismatch");

  QpResult res;
  Vector x;
  if (m > 0) {
    LpResult lp = solve_lp(Vector::Zero(n), A, b);
    if (lp.status == LpStatus::Infeasible) return res;
    if (lp.status != LpStatus::Optimal) throw NumericalFailure("solve_qp: phase-1 LP failed");
    x = lp.x;
  } else {
    x = Vector::Zero(n);
  }

  // initial working set: active rows, pruned to a linearly independent subset
  std::vector<int> work;
  for (int i = 0; i < m; ++i) {
    if (A.row(i) * x - b(i) > -1e-9) {
      Matrix Aw(work.size() + 1, n);
      for (size_t k = 0; k < work.size(); ++k) Aw.row(k) = A.row(work[k]);
      Aw.row(work.size()) = A.row(i);
      if (Eigen::ColPivHouseholderQR<Matrix>(Aw.transpose()).rank() ==
          static_cast<int>(work.size()) + 1)
        work.push_back(i);
    }
  }

  Vector lam;
  const int max_iter = 200 * (n + m) + 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix Aw(work.size(), n);
    for (size_t k = 0; k < work.size(); ++k) Aw.row(k) = A.row(work[k]);
    Vector p;
    solve_kkt(G, G * x + g, Aw, p, lam);

    if (p.lpNorm<Eigen::Infinity>() < 1e-11) {
      int drop = -1;
      double most_negative = -1e-9;
      for (size_t k = 0; k < work.size(); ++k) {
        if (lam(k) < most_negative) {
          most_negative = lam(k);
          drop = static_cast<int>(k);
        }
      }
      if (drop < 0) break;  // KKT satisfied
      work.erase(work.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double d = A.row(i) * p;
      if (d > 1e-12) {
        const double r = (b(i) - A.row(i) * x) / d;
        if (r < alpha) {
          alpha = r;
          blocking = i;
        }
      }
    }
    x += std::max(alpha, 0.0) * p;
    if (blocking >= 0) work.push_back(blocking);
  }

  res.status = QpStatus::Optimal;
  res.x = x;
  res.objective = 0.5 * x.dot(G * x) + g.dot(x);
  Vector stat = G * x + g;
  double viol = 0.0;
  for (size_t k = 0; k < work.size(); ++k) {
    stat += lam(k) * A.row(work[k]).transpose();
    viol = std::max(viol, -lam(k));
  }
  if (m > 0) viol = std::max(viol, (A * x - b).maxCoeff());
  res.kkt_residual = std::max(stat.lpNorm<Eigen::Infinity>(), viol);
  return res;
}

}  // namespace petmpc
