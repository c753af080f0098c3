#include <doctest.h>

#include <random>

#include "petmpc/scenario.hpp"
#include "petmpc/sets.hpp"

using namespace petmpc;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

UncertainModel reference_model() { return builtin_config("identification").model; }

}  // namespace

TEST_CASE("compute_ws: zero uncertainty collapses to the origin") {
  UncertainModel m = reference_model();
  m.delta_max = 0.0;
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  Polytope U = Polytope::box(vec1(-4), vec1(4));
  Polytope ws = compute_ws(m, X, U);
  CHECK(ws.contains(Vector::Zero(2)));
  CHECK(ws.support(vec2(1, 0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ws.support(vec2(0, 1)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compute_ws: reference data bounding box") {
  UncertainModel m = reference_model();
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  Polytope U = Polytope::box(vec1(-4), vec1(4));
  Polytope ws = compute_ws(m, X, U);
  // row 1: 0.15*(0.6*17 + 0.4*17 + 0.2*4) = 2.67
  // row 2: 0.15*(0.6*17 + 0.85*17 + 0.4*4) = 3.9375
  auto [lo, hi] = ws.bounding_box();
  CHECK(hi(0) == doctest::Approx(2.670).epsilon(1e-9));
  CHECK(hi(1) == doctest::Approx(3.9375).epsilon(1e-9));
  CHECK(lo(0) == doctest::Approx(-2.670).epsilon(1e-9));
  CHECK(lo(1) == doctest::Approx(-3.9375).epsilon(1e-9));
}

TEST_CASE("compute_ws: positive homogeneity in X and U") {
  UncertainModel m = reference_model();
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  Polytope U = Polytope::box(vec1(-4), vec1(4));
  Polytope X2 = Polytope::box(vec2(-34, -34), vec2(34, 34));
  Polytope U2 = Polytope::box(vec1(-8), vec1(8));
  Polytope ws = compute_ws(m, X, U);
  Polytope ws2 = compute_ws(m, X2, U2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> D(-1.0, 1.0);
  for (int k = 0; k < 16; ++k) {
    Vector a = vec2(D(rng), D(rng));
    CHECK(ws2.support(a) == doctest::Approx(2.0 * ws.support(a)).epsilon(1e-8));
  }
}

TEST_CASE("compute_mrpi: trivial and scalar geometric series") {
  Matrix A05 = 0.5 * Matrix::Identity(1, 1);
  {
    Polytope zero = Polytope::point(Vector::Zero(1));
    Polytope S = compute_mrpi(A05, zero);
    CHECK(S.contains(Vector::Zero(1)));
    CHECK(S.support(vec1(1.0)) <= 1e-9);
  }
  {
    // e+ = 0.5 e + w, w in [-1,1]: exact mRPI is [-2,2]
    Polytope W = Polytope::box(vec1(-1), vec1(1));
    Polytope S = compute_mrpi(A05, W, /*alpha_max=*/0.01);
    CHECK(S.contains(vec1(2.0), 1e-9));
    CHECK(S.contains(vec1(-2.0), 1e-9));
    CHECK(S.support(vec1(1.0)) <= 2.03);
    CHECK(S.support(vec1(-1.0)) <= 2.03);
  }
}

TEST_CASE("compute_mrpi: RPI property on the reference system") {
  ScenarioConfig cfg = builtin_config("identification");
  const Matrix A_K = cfg.model.A_nom + cfg.model.B_nom * cfg.K_t;
  Polytope W_total = cfg.W.linear_map(cfg.model.B_nom)
                         .minkowski_sum(compute_ws(cfg.model, cfg.X, cfg.U));
  Polytope S = compute_mrpi(A_K, W_total);
  Polytope mapped = S.linear_map(A_K).minkowski_sum(W_total);
  // A_K S (+) W_total inside S: support comparison on every facet of S
  for (int r = 0; r < S.rows(); ++r) {
    const Vector a = S.H().row(r).transpose();
    CHECK(mapped.support(a) <= S.h()(r) + 1e-8);
  }
}

TEST_CASE("compute_mrpi: unstable dynamics do not converge") {
  Matrix A = 1.1 * Matrix::Identity(1, 1);
  Polytope W = Polytope::box(vec1(-1), vec1(1));
  CHECK_THROWS(compute_mrpi(A, W, 0.05, 20));
}

TEST_CASE("tighten") {
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  Polytope Uhat = Polytope::box(vec1(-4), vec1(4));
  {
    Polytope S0 = Polytope::point(Vector::Zero(2));
    auto [Z, V] = tighten(X, Uhat, S0, Matrix::Zero(1, 2));
    CHECK(Z.support(vec2(1, 0)) == doctest::Approx(17.0));
    CHECK(V.support(vec1(1.0)) == doctest::Approx(4.0));
  }
  {
    // 1-D: X=[-10,10], S=[-2,2], K_t=0.5, Uhat=[-4,4] -> Z=[-8,8], V=[-3,3]
    Polytope X1 = Polytope::box(vec1(-10), vec1(10));
    Polytope U1 = Polytope::box(vec1(-4), vec1(4));
    Polytope S1 = Polytope::box(vec1(-2), vec1(2));
    auto [Z, V] = tighten(X1, U1, S1, 0.5 * Matrix::Identity(1, 1));
    CHECK(Z.support(vec1(1.0)) == doctest::Approx(8.0));
    CHECK(Z.support(vec1(-1.0)) == doctest::Approx(8.0));
    CHECK(V.support(vec1(1.0)) == doctest::Approx(3.0));
    CHECK(V.support(vec1(-1.0)) == doctest::Approx(3.0));
  }
  {
    ScenarioConfig cfg = builtin_config("identification");
    TubeIngredients ing = build_ingredients(cfg);
    CHECK(ing.Z.contains(Vector::Zero(2)));
    CHECK(ing.V.contains(Vector::Zero(1)));
  }
  {
    // S swallows X -> infeasible design
    Polytope X1 = Polytope::box(vec1(-1), vec1(1));
    Polytope U1 = Polytope::box(vec1(-4), vec1(4));
    Polytope S1 = Polytope::box(vec1(-2), vec1(2));
    CHECK_THROWS_AS(tighten(X1, U1, S1, Matrix::Zero(1, 1)), InfeasibleDesign);
  }
}

TEST_CASE("solve_dare: scalar fixed point") {
  // a=0.5, b=1, q=1, r=1: p solves p = q + a^2 p - a^2 p^2/(p+r), i.e.
  // p^2 - 0.25 p - 1 = 0 -> p = (0.25 + sqrt(0.0625 + 4))/2
  Matrix A = 0.5 * Matrix::Identity(1, 1);
  Matrix B = Matrix::Identity(1, 1);
  Matrix Q = Matrix::Identity(1, 1);
  Matrix R = Matrix::Identity(1, 1);
  Matrix P = solve_dare(A, B, Q, R);
  const double expected = (0.25 + std::sqrt(0.0625 + 4.0)) / 2.0;  // ~1.1327822
  CHECK(P(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  // residual of the fixed point
  Matrix res = P - (Q + A.transpose() * P * A -
                    A.transpose() * P * B *
                        (R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A));
  CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("solve_dare + lqr_gain: reference model closed loop is Schur") {
  UncertainModel m = reference_model();
  Matrix P = solve_dare(m.A_nom, m.B_nom, Matrix::Identity(2, 2), Matrix::Identity(1, 1));
  Matrix Kf = lqr_gain(m.A_nom, m.B_nom, Matrix::Identity(1, 1), P);
  Eigen::EigenSolver<Matrix> eig(m.A_nom + m.B_nom * Kf);
  CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - 1e-9);
  CHECK((P - P.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("terminal_ingredients: deadbeat plant converges in one iteration") {
  Matrix A = Matrix::Zero(1, 1);
  Matrix B = Matrix::Identity(1, 1);
  Polytope Z = Polytope::box(vec1(-5), vec1(5));
  Polytope V = Polytope::box(vec1(-1), vec1(1));
  TerminalIngredients t = terminal_ingredients(A, B, Matrix::Identity(1, 1),
                                               Matrix::Identity(1, 1), Z, V);
  // A=0: K_f = 0, so the seed {z in Z : K_f z in V} = Z is already invariant
  CHECK(t.K_f(0, 0) == doctest::Approx(0.0));
  CHECK(t.Z_f.support(vec1(1.0)) == doctest::Approx(5.0));
}

TEST_CASE("terminal_ingredients: invariance and Assumption-3 descent by sampling") {
  ScenarioConfig cfg = builtin_config("identification");
  TubeIngredients ing = build_ingredients(cfg);
  const Matrix A = cfg.model.A_nom, B = cfg.model.B_nom;
  const Matrix Acl = A + B * ing.K_f;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> S01(0.0, 1.0);
  auto [lo, hi] = ing.Z_f.bounding_box();
  int accepted = 0;
  while (accepted < 1000) {
    Vector z = vec2(lo(0) + S01(rng) * (hi(0) - lo(0)), lo(1) + S01(rng) * (hi(1) - lo(1)));
    if (!ing.Z_f.contains(z)) continue;
    ++accepted;
    const Vector u = ing.K_f * z;
    CHECK(ing.V.contains(u, 1e-7));
    CHECK(ing.Z_f.contains(Acl * z, 1e-7));
    if (accepted <= 100) {
      // V_f(Az+Bu) + z'Qz + u'Ru <= V_f(z)
      const Vector zn = A * z + B * u;
      const double lhs = zn.dot(ing.P_f * zn) + z.squaredNorm() + u.squaredNorm();
      const double rhs = z.dot(ing.P_f * z);
      CHECK(lhs <= rhs + 1e-7);
    }
  }
  CHECK(ing.Z_f.subset_of(ing.Z, 1e-9));
}

TEST_CASE("assumption 5: U_hat (+) W inside U for the reference sets") {
  ScenarioConfig cfg = builtin_config("identification");
  Polytope Uhat = cfg.U.pontryagin_diff(cfg.W);
  CHECK(Uhat.minkowski_sum(cfg.W).subset_of(cfg.U, 1e-9));
}

TEST_CASE("matrix json round trip and content hash") {
  Matrix M(2, 3);
  M << 1.5, -2.0, 0.25, 3.0, 0.0, -1.0;
  CHECK(matrix_from_json(matrix_to_json(M)) == M);
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
}

TEST_CASE("tube ingredients json round trip") {
  ScenarioConfig cfg = builtin_config("identification");
  TubeIngredients ing = build_ingredients(cfg);
  TubeIngredients back = TubeIngredients::from_json(ing.to_json());
  CHECK(back.K_t == ing.K_t);
  CHECK(back.P_f == ing.P_f);
  CHECK(back.S.H() == ing.S.H());
  CHECK(back.Z_f.h() == ing.Z_f.h());
}
