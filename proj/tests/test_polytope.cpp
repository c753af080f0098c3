#include <doctest.h>

#include <json.hpp>
#include <random>

#include "petmpc/polytope.hpp"

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

Polytope interval(double lo, double hi) { return Polytope::box(vec1(lo), vec1(hi)); }

Polytope random_poly2(std::mt19937_64& rng) {
  // hull of 4-8 random points: always a bounded nonempty 2-D polytope
  std::uniform_real_distribution<double> P(-3.0, 3.0);
  std::vector<Vector> pts(4 + rng() % 5);
  for (auto& p : pts) p = vec2(P(rng), P(rng));
  return Polytope::hull(pts);
}

bool same_set(const Polytope& A, const Polytope& B, double tol = 1e-7) {
  return A.subset_of(B, tol) && B.subset_of(A, tol);
}

}  // namespace

TEST_CASE("is_empty") {
  CHECK_FALSE(interval(-1.0, 1.0).is_empty());
  {
    Matrix H(2, 1);
    Vector h(2);
    H << 1.0, -1.0;
    h << -1.0, -1.0;  // x <= -1 and x >= 1
    CHECK(Polytope(H, h).is_empty());
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const double a1 = U(rng), b1 = U(rng), a2 = U(rng), b2 = U(rng);
    const double lo1 = std::min(a1, b1), hi1 = std::max(a1, b1);
    const double lo2 = std::min(a2, b2), hi2 = std::max(a2, b2);
    Matrix H(4, 1);
    Vector h(4);
    H << 1.0, -1.0, 1.0, -1.0;
    h << hi1, -lo1, hi2, -lo2;
    const bool oracle_empty = std::max(lo1, lo2) > std::min(hi1, hi2);
    CHECK(Polytope(H, h).is_empty() == oracle_empty);
  }
}

TEST_CASE("contains") {
  Polytope box = Polytope::box(vec2(-1, -1), vec2(1, 1));
  CHECK(box.contains(vec2(0, 0)));
  CHECK_FALSE(box.contains(vec2(1.0 + 1e-6, 0.0)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> P(-4.0, 4.0);
  for (int t = 0; t < 100; ++t) {
    Polytope poly = random_poly2(rng);
    Vector x = vec2(P(rng), P(rng));
    const bool oracle =
        ((poly.H() * x - poly.h()).array() <= 1e-9).all();
    CHECK(poly.contains(x) == oracle);
  }
  CHECK_THROWS_AS(box.contains(vec1(0.0)), ContractViolation);
}

TEST_CASE("support") {
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  CHECK(X.support(vec2(1, 0)) == doctest::Approx(17.0));
  CHECK(X.support(vec2(0, 0)) == doctest::Approx(0.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> D(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Polytope poly = random_poly2(rng);
    Vector a = vec2(D(rng), D(rng));
    double best = -1e300;
    for (const auto& v : poly.vertices()) best = std::max(best, a.dot(v));
    CHECK(poly.support(a) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("support: unbounded direction throws") {
  Matrix H(1, 1);
  Vector h(1);
  H << 1.0;
  h << 1.0;  // x <= 1 only
  CHECK_THROWS_AS(Polytope(H, h).support(vec1(-1.0)), UnboundedDirection);
}

TEST_CASE("minkowski_sum") {
  Polytope U = interval(-4, 4);
  Polytope W = interval(-0.2, 0.2);
  CHECK(same_set(U.minkowski_sum(Polytope::point(vec1(0.0))), U));
  Polytope sum = U.minkowski_sum(W);
  CHECK(sum.support(vec1(1.0)) == doctest::Approx(4.2));
  CHECK(sum.support(vec1(-1.0)) == doctest::Approx(4.2));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> B(0.2, 2.0);
  for (int t = 0; t < 50; ++t) {
    Polytope P = Polytope::box(vec2(-B(rng), -B(rng)), vec2(B(rng), B(rng)));
    Polytope Q = Polytope::box(vec2(-B(rng), -B(rng)), vec2(B(rng), B(rng)));
    Polytope S = P.minkowski_sum(Q);
    // vertex-sum hull oracle
    std::vector<Vector> pts;
    for (const auto& p : P.vertices())
      for (const auto& q : Q.vertices()) pts.push_back(p + q);
    CHECK(same_set(S, Polytope::hull(pts)));
    CHECK(same_set(S, Q.minkowski_sum(P)));  // commutativity
    // support additivity
    std::uniform_real_distribution<double> D(-1.0, 1.0);
    for (int k = 0; k < 8; ++k) {
      Vector a = vec2(D(rng), D(rng));
      CHECK(S.support(a) ==
            doctest::Approx(P.support(a) + Q.support(a)).epsilon(1e-8));
    }
  }
}

TEST_CASE("pontryagin_diff") {
  Polytope X = Polytope::box(vec2(-17, -17), vec2(17, 17));
  CHECK(same_set(X.pontryagin_diff(Polytope::point(Vector::Zero(2))), X));
  Polytope Uhat = interval(-4, 4).pontryagin_diff(interval(-0.2, 0.2));
  CHECK(Uhat.support(vec1(1.0)) == doctest::Approx(3.8));
  CHECK(Uhat.support(vec1(-1.0)) == doctest::Approx(3.8));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> S01(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    Polytope P = random_poly2(rng);
    Polytope Qs = Polytope::box(vec2(-0.2, -0.2), vec2(0.2, 0.2));
    Polytope D = P.pontryagin_diff(Qs);
    if (D.is_empty()) continue;
    Polytope back = D.minkowski_sum(Qs);
    // (P (-) Q) (+) Q subseteq P, by sampled membership
    auto [lo, hi] = back.bounding_box();
    int checked = 0;
    while (checked < 40) {
      Vector x = vec2(lo(0) + S01(rng) * (hi(0) - lo(0)), lo(1) + S01(rng) * (hi(1) - lo(1)));
      if (!back.contains(x)) continue;
      CHECK(P.contains(x, 1e-7));
      ++checked;
    }
  }
}

TEST_CASE("linear_map") {
  Polytope W = interval(-0.2, 0.2);
  CHECK(same_set(W.linear_map(Matrix::Identity(1, 1)), W));

  Matrix Bbar(2, 1);
  Bbar << 0.3, -0.4;
  Polytope seg = W.linear_map(Bbar);
  CHECK(seg.contains(vec2(0.06, -0.08), 1e-9));
  CHECK(seg.contains(vec2(-0.06, 0.08), 1e-9));
  CHECK(seg.contains(vec2(0.0, 0.0), 1e-9));
  CHECK_FALSE(seg.contains(vec2(0.06, 0.08), 1e-6));
  CHECK(seg.support(vec2(1.0, 0.0)) == doctest::Approx(0.06));
  CHECK(seg.support(vec2(0.0, 1.0)) == doctest::Approx(0.08));

  Polytope box = Polytope::box(vec2(-1, -2), vec2(1, 2));
  Polytope doubled = box.linear_map(2.0 * Matrix::Identity(2, 2));
  CHECK(doubled.support(vec2(1, 0)) == doctest::Approx(2.0));
  CHECK(doubled.support(vec2(0, 1)) == doctest::Approx(4.0));
}

TEST_CASE("reduce") {
  {
    Matrix H(5, 1);
    Vector h(5);
    H << 1.0, -1.0, 1.0, 1.0, -1.0;
    h << 1.0, 1.0, 1.0, 100.0, 1.0;  // duplicates + slack
    Polytope r = Polytope(H, h).reduce();
    CHECK(r.rows() == 2);
    CHECK(same_set(r, interval(-1.0, 1.0)));
  }
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> P(-4.0, 4.0);
  for (int t = 0; t < 20; ++t) {
    Polytope poly = random_poly2(rng);
    // append redundant copies of scaled rows
    Matrix H(poly.rows() * 2, 2);
    Vector h(poly.rows() * 2);
    H << poly.H(), poly.H();
    h << poly.h(), (poly.h().array() + 0.5).matrix();
    Polytope red = Polytope(H, h).reduce();
    for (int k = 0; k < 1000 / 20; ++k) {
      Vector x = vec2(P(rng), P(rng));
      CHECK(red.contains(x) == poly.contains(x));
    }
  }
}

TEST_CASE("vertices and bounding_box") {
  Polytope box = Polytope::box(vec2(-1, -2), vec2(3, 4));
  auto verts = box.vertices();
  CHECK(verts.size() == 4);
  auto [lo, hi] = box.bounding_box();
  CHECK(lo(0) == doctest::Approx(-1.0));
  CHECK(lo(1) == doctest::Approx(-2.0));
  CHECK(hi(0) == doctest::Approx(3.0));
  CHECK(hi(1) == doctest::Approx(4.0));
}

TEST_CASE("hull degenerate inputs") {
  // single point
  Polytope p = Polytope::hull({vec2(1.0, 2.0)});
  CHECK(p.contains(vec2(1.0, 2.0)));
  CHECK_FALSE(p.contains(vec2(1.1, 2.0), 1e-6));
  // collinear points -> segment
  Polytope s = Polytope::hull({vec2(0, 0), vec2(1, 1), vec2(2, 2)});
  CHECK(s.contains(vec2(1.5, 1.5), 1e-9));
  CHECK_FALSE(s.contains(vec2(1.0, 0.0), 1e-6));
}

TEST_CASE("json round trip") {
  Polytope box = Polytope::box(vec2(-1.5, -2.5), vec2(1.5, 2.5));
  nlohmann::json j = box.to_json();
  CHECK(j.contains("H"));
  CHECK(j.contains("h"));
  Polytope back = Polytope::from_json(j);
  CHECK(back.H() == box.H());
  CHECK(back.h() == box.h());
}
