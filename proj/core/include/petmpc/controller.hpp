#pragma once

#include <vector>

#include "petmpc/excitation.hpp"
#include "petmpc/polytope.hpp"
#include "petmpc/sets.hpp"
#include "petmpc/types.hpp"

namespace petmpc {

struct MpcConfig {
  int N = 1;            // prediction horizon
  Matrix Q;             // state weight (n x n), positive semidefinite
  Matrix R;             // input weight (m x m), positive definite
  TubeIngredients ingredients;
  PeParams pe;
  int grid_density = 41;
  double qp_tol = 1e-8;

  void validate() const;
};

struct NominalSolution {
  bool feasible = false;
  std::vector<Vector> v_seq;   // length N
  std::vector<Vector> z_pred;  // length N+1
  double cost = 0.0;
  double kkt_residual = 0.0;
};

struct MpcSolution {
  bool feasible = false;
  std::vector<Vector> v_seq;
  std::vector<Vector> z_pred;
  Vector w0;
  double cost_z = 0.0;
  double cost_w = 0.0;
  double kkt_residual = 0.0;
  int pe_candidate_count = 0;
  bool pe_trivial_used = false;
};

/// Condensed-QP solve of the nominal tightened problem:
///   min sum_k z'Qz + v'Rv + z(N)' P_f z(N)
///   s.t. dynamics under (A, B), z(k) in Z, v(k) in V, z(N) in Z_f.
/// The initial state z0 is fixed, not optimized.  An infeasible QP (or z0
/// outside Z) is a status, not an exception.
NominalSolution solve_nominal_qp(const MpcConfig& cfg, const Matrix& A, const Matrix& B,
                                 const Vector& z0);

/// Full solve: nominal QP composed with the exciting-input selection.  The
/// two parts decompose exactly because the exciting input enters neither the
/// nominal dynamics nor the nominal constraints; cost_w collects the
/// excitation share of the stage cost.
MpcSolution solve(const MpcConfig& cfg, const Matrix& A, const Matrix& B, const Vector& z0,
                  const PeBuffer& buf, const Polytope& W);

/// u = v0 + K_t (x - z) + w0.
Vector control_input(const Vector& v0, const Matrix& K_t, const Vector& x, const Vector& z,
                     const Vector& w0);

/// z+ = A z + B v0.
Vector advance_nominal(const Matrix& A, const Matrix& B, const Vector& z, const Vector& v0);

}  // namespace petmpc
