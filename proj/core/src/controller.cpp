#include "petmpc/controller.hpp"

#include <cmath>

#include "petmpc/qp.hpp"

namespace petmpc {

void MpcConfig::validate() const {
  if (N < 1) throw ContractViolation("MpcConfig: N must be >= 1");
  Eigen::SelfAdjointEigenSolver<Matrix> eq(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
  if (eq.eigenvalues().minCoeff() < -1e-9)
    throw ContractViolation("MpcConfig: Q must be positive semidefinite");
  Eigen::SelfAdjointEigenSolver<Matrix> er(0.5 * (R + R.transpose()), Eigen::EigenvaluesOnly);
  if (er.eigenvalues().minCoeff() <= 0.0)
    throw ContractViolation("MpcConfig: R must be positive definite");
  pe.validate();
}

NominalSolution solve_nominal_qp(const MpcConfig& cfg, const Matrix& A, const Matrix& B,
                                 const Vector& z0) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const int N = cfg.N;
  NominalSolution out;

  const Polytope& Z = cfg.ingredients.Z;
  const Polytope& V = cfg.ingredients.V;
  const Polytope& Zf = cfg.ingredients.Z_f;
  if (!Z.contains(z0, 1e-9)) return out;  // z(0) is fixed; outside Z means infeasible

  // condensed prediction: zs = Sx z0 + Su v  with zs stacking z(1..N)
  Matrix Sx(N * n, n);
  Matrix Su = Matrix::Zero(N * n, N * m);
  {
    Matrix Apow = Matrix::Identity(n, n);
    for (int k = 1; k <= N; ++k) {
      Apow = A * Apow;  // A^k
      Sx.middleRows((k - 1) * n, n) = Apow;
    }
    for (int k = 1; k <= N; ++k) {
      Matrix blk = B;
      for (int j = k - 1; j >= 0; --j) {
        Su.block((k - 1) * n, j * m, n, m) = blk;
        blk = A * blk;
      }
    }
  }

  // cost over v: 1/2 v'G v + g'v (+ v-independent terms kept in `constant`)
  Matrix Qbar = Matrix::Zero(N * n, N * n);
  for (int k = 0; k < N - 1; ++k) Qbar.block(k * n, k * n, n, n) = cfg.Q;
  Qbar.block((N - 1) * n, (N - 1) * n, n, n) = cfg.ingredients.P_f;
  Matrix Rbar = Matrix::Zero(N * m, N * m);
  for (int k = 0; k < N; ++k) Rbar.block(k * m, k * m, m, m) = cfg.R;

  Matrix G = 2.0 * (Su.transpose() * Qbar * Su + Rbar);
  G = 0.5 * (G + G.transpose());
  Vector g = 2.0 * Su.transpose() * Qbar * Sx * z0;
  const Vector zs_free = Sx * z0;
  const double constant = z0.dot(cfg.Q * z0) + zs_free.dot(Qbar * zs_free);

  // constraints: z(k) in Z for k=1..N-1, z(N) in Z_f, v(k) in V
  const int rows = (N - 1) * Z.rows() + Zf.rows() + N * V.rows();
  Matrix Ac = Matrix::Zero(rows, N * m);
  Vector bc(rows);
  int r = 0;
  for (int k = 1; k < N; ++k) {
    Ac.middleRows(r, Z.rows()) = Z.H() * Su.middleRows((k - 1) * n, n);
    bc.segment(r, Z.rows()) = Z.h() - Z.H() * Sx.middleRows((k - 1) * n, n) * z0;
    r += Z.rows();
  }
  Ac.middleRows(r, Zf.rows()) = Zf.H() * Su.middleRows((N - 1) * n, n);
  bc.segment(r, Zf.rows()) = Zf.h() - Zf.H() * Sx.middleRows((N - 1) * n, n) * z0;
  r += Zf.rows();
  for (int k = 0; k < N; ++k) {
    Ac.block(r, k * m, V.rows(), m) = V.H();
    bc.segment(r, V.rows()) = V.h();
    r += V.rows();
  }

  QpResult qp = solve_qp(G, g, Ac, bc);
  if (qp.status != QpStatus::Optimal) return out;
  if (qp.kkt_residual > cfg.qp_tol * 100.0)
    throw NumericalFailure("solve_nominal_qp: KKT residual above tolerance");

  out.feasible = true;
  out.kkt_residual = qp.kkt_residual;
  out.cost = qp.objective + constant;
  out.v_seq.resize(N);
  for (int k = 0; k < N; ++k) out.v_seq[k] = qp.x.segment(k * m, m);
  out.z_pred.resize(N + 1);
  out.z_pred[0] = z0;
  for (int k = 0; k < N; ++k)
    out.z_pred[k + 1] = A * out.z_pred[k] + B * out.v_seq[k];
  return out;
}

MpcSolution solve(const MpcConfig& cfg, const Matrix& A, const Matrix& B, const Vector& z0,
                  const PeBuffer& buf, const Polytope& W) {
  MpcSolution out;
  NominalSolution nom = solve_nominal_qp(cfg, A, B, z0);
  if (!nom.feasible) {
    out.w0 = Vector::Zero(buf.input_dim());
    return out;
  }
  SelectionResult sel = select_w0(buf, W, cfg.R, cfg.grid_density);

  out.feasible = true;
  out.v_seq = std::move(nom.v_seq);
  out.z_pred = std::move(nom.z_pred);
  out.kkt_residual = nom.kkt_residual;
  out.cost_z = nom.cost;
  out.w0 = sel.w0;
  out.pe_candidate_count = sel.candidate_count;
  out.pe_trivial_used = sel.trivial_used;
  // excitation share of the stage cost: w0 plus the fixed periodic tail
  out.cost_w = sel.cost;
  const int tail = std::min(cfg.pe.Np, cfg.N);
  std::vector<Vector> seq(buf.history().begin(), buf.history().end());
  seq.push_back(out.w0);
  for (int k = 1; k < tail; ++k) {
    // future exciting inputs are fixed to the periodic continuation w(i+k-lp)
    const Vector wk = seq[seq.size() - static_cast<size_t>(cfg.pe.lp)];
    out.cost_w += wk.dot(cfg.R * wk);
    seq.push_back(wk);
  }
  return out;
}

Vector control_input(const Vector& v0, const Matrix& K_t, const Vector& x, const Vector& z,
                     const Vector& w0) {
  return v0 + K_t * (x - z) + w0;
}

Vector advance_nominal(const Matrix& A, const Matrix& B, const Vector& z, const Vector& v0) {
  return A * z + B * v0;
}

}  // namespace petmpc
