#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "petmpc/polytope.hpp"
#include "petmpc/types.hpp"

namespace petmpc {

/// Nominal model plus one-parameter uncertainty family
///   A(delta) = A_nom + delta * A_dir,  B(delta) = B_nom + delta * B_dir,
/// with |delta| <= delta_max.
struct UncertainModel {
  Matrix A_nom;
  Matrix B_nom;
  Matrix A_dir;
  Matrix B_dir;
  double delta_max = 0.0;

  int n() const { return static_cast<int>(A_nom.rows()); }
  int m() const { return static_cast<int>(B_nom.cols()); }

  Matrix A_at(double delta) const { return A_nom + delta * A_dir; }
  Matrix B_at(double delta) const { return B_nom + delta * B_dir; }

  void validate() const;

  nlohmann::json to_json() const;
  static UncertainModel from_json(const nlohmann::json& j);
};

/// Everything the tube controller needs that is derived offline from the
/// model and constraint sets.
struct TubeIngredients {
  Matrix K_t;           // tube feedback gain (m x n)
  Polytope S;           // RPI error cross-section
  Polytope W_S;         // parametric disturbance bound
  Polytope W_hat;       // B_nom * W
  Polytope Z;           // tightened state set, X (-) S
  Polytope V;           // tightened input set, U_hat (-) K_t S
  Polytope Z_f;         // terminal set
  Matrix P_f;           // terminal cost weight
  Matrix K_f;           // terminal controller gain

  nlohmann::json to_json() const;
  static TubeIngredients from_json(const nlohmann::json& j);
};

/// Fixed-point solution of the discrete-time algebraic Riccati equation.
/// Returns P with residual ||P - (Q + A'PA - A'PB (R+B'PB)^-1 B'PA)|| <= tol.
Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                  double tol = 1e-12, int iter_max = 100000);

/// LQR gain for the DARE solution P:  u = K z with K = -(R+B'PB)^-1 B'PA.
Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P);

/// Bound on the disturbance caused by model mismatch:
/// hull of {dd*(A_dir x + B_dir u) : x,u at vertices, |dd| <= multiplier*delta_max}.
Polytope compute_ws(const UncertainModel& model, const Polytope& X, const Polytope& U,
                    double mismatch_multiplier = 1.0);

/// Outer approximation of the minimal RPI set of e+ = A_K e + w, w in W_total.
/// Finds the smallest s with A_K^s W_total inside alpha*W_total (alpha <=
/// alpha_max), returns (1-alpha)^-1 * sum_{j<s} A_K^j W_total, reduced.
Polytope compute_mrpi(const Matrix& A_K, const Polytope& W_total, double alpha_max = 0.05,
                      int s_max = 200);

/// Z = X (-) S and V = U_hat (-) K_t S; throws InfeasibleDesign when either
/// tightened set is empty.
std::pair<Polytope, Polytope> tighten(const Polytope& X, const Polytope& U_hat, const Polytope& S,
                                      const Matrix& K_t);

struct TerminalIngredients {
  Matrix P_f;
  Matrix K_f;
  Polytope Z_f;
};

/// Terminal cost P_f and gain K_f from the DARE, and the maximal positively
/// invariant set of z+ = (A+B K_f) z inside {z in Z : K_f z in V}.
TerminalIngredients terminal_ingredients(const Matrix& A, const Matrix& B, const Matrix& Q,
                                         const Matrix& R, const Polytope& Z, const Polytope& V,
                                         int iter_max = 200);

// JSON helpers for dense matrices (row-major nested arrays).
nlohmann::json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const nlohmann::json& j);

// FNV-1a hash of a serialized input document; guards ingredient-cache
// staleness.
std::string content_hash(const std::string& data);

}  // namespace petmpc
