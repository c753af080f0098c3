#include "petmpc/sets.hpp"

#include <cmath>
#include <limits>
#include <json.hpp>
#include <sstream>

namespace petmpc {

void UncertainModel::validate() const {
  const int nn = n(), mm = m();
  if (A_nom.rows() != nn || A_nom.cols() != nn || B_nom.rows() != nn || A_dir.rows() != nn ||
      A_dir.cols() != nn || B_dir.rows() != nn || B_dir.cols() != mm)
    throw ContractViolation("UncertainModel: inconsistent shapes");
  if (delta_max < 0.0) throw ContractViolation("UncertainModel: delta_max must be >= 0");
  // stabilizability checked constructively: the Riccati fixed point must exist
  solve_dare(A_nom, B_nom, Matrix::Identity(nn, nn), Matrix::Identity(mm, mm));
}

Matrix solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R, double tol,
                  int iter_max) {
  Matrix P = Q;
  for (int it = 0; it < iter_max; ++it) {
    const Matrix BtP = B.transpose() * P;
    Matrix gain_term = (R + BtP * B).ldlt().solve(BtP * A);
    Matrix Pn = Q + A.transpose() * P * A - A.transpose() * P * B * gain_term;
    Pn = 0.5 * (Pn + Pn.transpose());
    const double diff = (Pn - P).lpNorm<Eigen::Infinity>();
    P = Pn;
    if (diff < tol) return P;
  }
  throw NonConvergence("solve_dare: fixed point not reached", 0.0);
}

Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  return -(R + BtP * B).ldlt().solve(BtP * A);
}

Polytope compute_ws(const UncertainModel& model, const Polytope& X, const Polytope& U,
                    double mismatch_multiplier) {
  if (mismatch_multiplier <= 0.0) throw ContractViolation("compute_ws: multiplier must be > 0");
  const double bound = mismatch_multiplier * model.delta_max;
  if (bound == 0.0) return Polytope::point(Vector::Zero(model.n()));
  const auto xv = X.vertices();
  const auto uv = U.vertices();
  if (xv.empty() || uv.empty()) throw ContractViolation("compute_ws: X and U must be bounded");
  std::vector<Vector> pts;
  pts.reserve(2 * xv.size() * uv.size());
  for (const double dd : {-bound, bound}) {
    for (const auto& x : xv) {
      for (const auto& u : uv) {
        pts.push_back(dd * (model.A_dir * x + model.B_dir * u));
      }
    }
  }
  return Polytope::hull(pts);
}

Polytope compute_mrpi(const Matrix& A_K, const Polytope& W_total, double alpha_max, int s_max) {
  const int n = static_cast<int>(A_K.rows());
  const auto eigs = A_K.eigenvalues();
  for (int i = 0; i < eigs.size(); ++i) {
    if (std::abs(eigs(i)) >= 1.0)
      throw ContractViolation("compute_mrpi: A_K must be Schur stable");
  }
  // degenerate disturbance: {0} is already invariant
  {
    auto [lo, hi] = W_total.bounding_box();
    if (std::max(hi.lpNorm<Eigen::Infinity>(), lo.lpNorm<Eigen::Infinity>()) <= 1e-12)
      return Polytope::point(Vector::Zero(n));
  }
  // alpha(s) = max_k h_W((A_K^s)' H_k) / h_k  (requires 0 in the interior)
  double alpha = 0.0;
  double best_alpha = std::numeric_limits<double>::infinity();
  int s = 0;
  Matrix Aks = Matrix::Identity(n, n);
  for (s = 1; s <= s_max; ++s) {
    Aks = A_K * Aks;
    alpha = 0.0;
    for (int k = 0; k < W_total.rows(); ++k) {
      const double hk = W_total.h()(k);
      if (hk <= 1e-12)
        throw ContractViolation("compute_mrpi: W_total must contain the origin in its interior");
      alpha = std::max(alpha, W_total.support(Aks.transpose() * W_total.H().row(k).transpose()) / hk);
    }
    best_alpha = std::min(best_alpha, alpha);
    if (alpha <= alpha_max) break;
  }
  if (s > s_max)
    throw NonConvergence("compute_mrpi: no (s, alpha) within limits", best_alpha);

  // F_s = sum_{j=0}^{s-1} A_K^j W_total
  Polytope F = W_total;
  Matrix Akj = Matrix::Identity(n, n);
  for (int j = 1; j < s; ++j) {
    Akj = A_K * Akj;
    F = F.minkowski_sum(W_total.linear_map(Akj));
  }
  Polytope S = Polytope(F.H(), F.h() / (1.0 - alpha)).reduce();
  // the sampled-direction power sum can leave a tiny RPI deficit along probe
  // directions outside the reconstruction fan; inflate minimally so the
  // support certificate A_K S (+) W_total subseteq S holds with margin
  for (int pass = 0; pass < 4; ++pass) {
    double delta = 0.0;
    for (int k = 0; k < S.rows(); ++k) {
      const Vector n = S.H().row(k).transpose();
      const double mapped = S.support(A_K.transpose() * n);
      const double viol = mapped + W_total.support(n) - S.h()(k);
      const double den = S.h()(k) - mapped;
      if (viol > 0.0 && den > 1e-12) delta = std::max(delta, viol / den);
    }
    if (delta == 0.0) break;
    S = Polytope(S.H(), S.h() * (1.0 + delta + 1e-9));
  }
  return S;
}

std::pair<Polytope, Polytope> tighten(const Polytope& X, const Polytope& U_hat, const Polytope& S,
                                      const Matrix& K_t) {
  Polytope Z = X.pontryagin_diff(S);
  if (Z.is_empty()) throw InfeasibleDesign("tighten: Z = X (-) S is empty (Assumption on S in X violated)");
  Polytope KtS = S.linear_map(K_t);
  Polytope V = U_hat.pontryagin_diff(KtS);
  if (V.is_empty())
    throw InfeasibleDesign("tighten: V = U_hat (-) K_t S is empty (K_t S exceeds U_hat)");
  return {Z.reduce(), V.reduce()};
}

TerminalIngredients terminal_ingredients(const Matrix& A, const Matrix& B, const Matrix& Q,
                                         const Matrix& R, const Polytope& Z, const Polytope& V,
                                         int iter_max) {
  const Matrix P_f = solve_dare(A, B, Q, R);
  const Matrix K_f = lqr_gain(A, B, R, P_f);
  const Matrix A_cl = A + B * K_f;

  // seed: {z in Z : K_f z in V}
  const int n = static_cast<int>(A.rows());
  Matrix H(Z.rows() + V.rows(), n);
  Vector h(Z.rows() + V.rows());
  H.topRows(Z.rows()) = Z.H();
  h.head(Z.rows()) = Z.h();
  H.bottomRows(V.rows()) = V.H() * K_f;
  h.tail(V.rows()) = V.h();
  Polytope seed(std::move(H), std::move(h));
  if (seed.is_empty()) throw InfeasibleDesign("terminal_ingredients: seed constraint set is empty");
  Polytope omega = seed.reduce();

  for (int it = 0; it < iter_max; ++it) {
    Matrix Hn(2 * omega.rows(), n);
    Vector hn(2 * omega.rows());
    Hn.topRows(omega.rows()) = omega.H();
    hn.head(omega.rows()) = omega.h();
    Hn.bottomRows(omega.rows()) = omega.H() * A_cl;
    hn.tail(omega.rows()) = omega.h();
    Polytope next = Polytope(std::move(Hn), std::move(hn)).reduce();
    // mutual containment via support values
    if (next.subset_of(omega, 1e-9) && omega.subset_of(next, 1e-9)) {
      if (next.is_empty()) throw InfeasibleDesign("terminal_ingredients: terminal set is empty");
      return TerminalIngredients{P_f, K_f, next};
    }
    omega = next;
  }
  throw NonConvergence("terminal_ingredients: invariant-set recursion did not converge", 0.0);
}

nlohmann::json matrix_to_json(const Matrix& M) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    j.push_back(row);
  }
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const int r = static_cast<int>(j.size());
  if (r == 0) return Matrix(0, 0);
  const int c = static_cast<int>(j.at(0).size());
  Matrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) M(i, k) = j.at(i).at(k).get<double>();
  return M;
}

std::string content_hash(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

nlohmann::json UncertainModel::to_json() const {
  nlohmann::json j;
  j["A_nom"] = matrix_to_json(A_nom);
  j["B_nom"] = matrix_to_json(B_nom);
  j["A_dir"] = matrix_to_json(A_dir);
  j["B_dir"] = matrix_to_json(B_dir);
  j["delta_max"] = delta_max;
  return j;
}

UncertainModel UncertainModel::from_json(const nlohmann::json& j) {
  UncertainModel m;
  m.A_nom = matrix_from_json(j.at("A_nom"));
  m.B_nom = matrix_from_json(j.at("B_nom"));
  m.A_dir = matrix_from_json(j.at("A_dir"));
  m.B_dir = matrix_from_json(j.at("B_dir"));
  m.delta_max = j.at("delta_max").get<double>();
  return m;
}

nlohmann::json TubeIngredients::to_json() const {
  nlohmann::json j;
  j["K_t"] = matrix_to_json(K_t);
  j["S"] = S.to_json();
  j["W_S"] = W_S.to_json();
  j["W_hat"] = W_hat.to_json();
  j["Z"] = Z.to_json();
  j["V"] = V.to_json();
  j["Z_f"] = Z_f.to_json();
  j["P_f"] = matrix_to_json(P_f);
  j["K_f"] = matrix_to_json(K_f);
  return j;
}

TubeIngredients TubeIngredients::from_json(const nlohmann::json& j) {
  return TubeIngredients{matrix_from_json(j.at("K_t")),   Polytope::from_json(j.at("S")),
                         Polytope::from_json(j.at("W_S")), Polytope::from_json(j.at("W_hat")),
                         Polytope::from_json(j.at("Z")),   Polytope::from_json(j.at("V")),
                         Polytope::from_json(j.at("Z_f")), matrix_from_json(j.at("P_f")),
                         matrix_from_json(j.at("K_f"))};
}

}  // namespace petmpc
