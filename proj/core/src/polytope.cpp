#include "petmpc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <json.hpp>

#include "petmpc/lp.hpp"

namespace petmpc {

namespace {

// Unit directions used by support reconstruction: operand facet normals
// plus, in 2-D, a uniform fan.
std::vector<Vector> reconstruction_directions(const Matrix& HP, const Matrix& HQ) {
  std::vector<Vector> dirs;
  auto push_rows = [&dirs](const Matrix& H) {
    for (int i = 0; i < H.rows(); ++i) {
      Vector a = H.row(i).transpose();
      const double nrm = a.norm();
      if (nrm > 1e-12) dirs.push_back(a / nrm);
    }
  };
  push_rows(HP);
  push_rows(HQ);
  if (HP.cols() == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
  } else if (HP.cols() == 2) {
    for (int k = 0; k < 64; ++k) {
      const double ang = 2.0 * std::numbers::pi * k / 64.0;
      Vector a(2);
      a << std::cos(ang), std::sin(ang);
      dirs.push_back(a);
    }
  }
  return dirs;
}

void dedupe_rows(Matrix& H, Vector& h) {
  std::vector<int> keep;
  for (int i = 0; i < H.rows(); ++i) {
    bool dup = false;
    for (int k : keep) {
      if ((H.row(i) - H.row(k)).lpNorm<Eigen::Infinity>() < 1e-12 &&
          std::abs(h(i) - h(k)) < 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(i);
  }
  Matrix H2(keep.size(), H.cols());
  Vector h2(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    H2.row(i) = H.row(keep[i]);
    h2(i) = h(keep[i]);
  }
  H = std::move(H2);
  h = std::move(h2);
}

// Enumerate index combinations of size d out of q.
void combinations(int q, int d, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(d);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == d) {
      fn(idx);
      return;
    }
    for (int i = start; i < q; ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

Polytope::Polytope(Matrix H, Vector h) : H_(std::move(H)), h_(std::move(h)) {
  if (H_.rows() != h_.size() || H_.rows() < 1 || H_.cols() < 1)
    throw ContractViolation("Polytope: H and h must have matching rows, q>=1, d>=1");
  if (!H_.allFinite() || !h_.allFinite())
    throw ContractViolation("Polytope: non-finite data");
}

Polytope Polytope::box(const Vector& lo, const Vector& hi) {
  const int d = static_cast<int>(lo.size());
  if (hi.size() != d) throw ContractViolation("Polytope::box: bound size mismatch");
  Matrix H(2 * d, d);
  Vector h(2 * d);
  H.topRows(d) = Matrix::Identity(d, d);
  H.bottomRows(d) = -Matrix::Identity(d, d);
  h.head(d) = hi;
  h.tail(d) = -lo;
  return Polytope(std::move(H), std::move(h));
}

Polytope Polytope::point(const Vector& p) {
  return box(p, p);
}

Polytope Polytope::hull(const std::vector<Vector>& points) {
  if (points.empty()) throw ContractViolation("Polytope::hull: no points");
  const int d = static_cast<int>(points.front().size());
  if (d > 2) throw UnsupportedOperation("Polytope::hull: ambient dimension > 2");
  if (d == 1) {
    double lo = points.front()(0), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    return box(Vector::Constant(1, lo), Vector::Constant(1, hi));
  }
  // affine rank of the cloud
  Vector c = Vector::Zero(2);
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  Matrix D(points.size(), 2);
  for (size_t i = 0; i < points.size(); ++i) D.row(i) = (points[i] - c).transpose();
  Eigen::JacobiSVD<Matrix> svd(D);
  const double s0 = svd.singularValues()(0);
  if (s0 < 1e-12) return point(c);
  if (svd.singularValues()(1) < 1e-10 * std::max(1.0, s0)) {
    // collinear: segment along t
    Eigen::JacobiSVD<Matrix> svdv(D, Eigen::ComputeThinV);
    Vector t = svdv.matrixV().col(0);
    Vector n(2);
    n << -t(1), t(0);
    double lo = t.dot(points.front()), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, t.dot(p));
      hi = std::max(hi, t.dot(p));
    }
    Matrix H(4, 2);
    Vector h(4);
    H.row(0) = n.transpose();
    H.row(1) = -n.transpose();
    H.row(2) = t.transpose();
    H.row(3) = -t.transpose();
    h << n.dot(c), -n.dot(c), hi, -lo;
    return Polytope(std::move(H), std::move(h));
  }
  // full-dimensional: Andrew's monotone chain
  std::vector<Vector> pts = points;
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector& a, const Vector& b) { return (a - b).norm() < 1e-12; }),
            pts.end());
  auto cross = [](const Vector& o, const Vector& a, const Vector& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  auto build_chain = [&cross](auto begin, auto end) {
    std::vector<Vector> chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 && cross(chain[chain.size() - 2], chain.back(), *it) <= 1e-12)
        chain.pop_back();
      chain.push_back(*it);
    }
    chain.pop_back();  // endpoint re-appears in the other chain
    return chain;
  };
  std::vector<Vector> ch = build_chain(pts.begin(), pts.end());
  const auto upper = build_chain(pts.rbegin(), pts.rend());
  ch.insert(ch.end(), upper.begin(), upper.end());
  // edges -> halfspaces (outward normal is the edge rotated clockwise for a
  // counter-clockwise hull)
  const size_t m = ch.size();
  Matrix H(m, 2);
  Vector h(m);
  for (size_t i = 0; i < m; ++i) {
    const Vector& a = ch[i];
    const Vector& b = ch[(i + 1) % m];
    Vector e = b - a;
    Vector n(2);
    n << e(1), -e(0);
    n /= n.norm();
    H.row(i) = n.transpose();
    h(i) = n.dot(a);
  }
  return Polytope(std::move(H), std::move(h));
}

bool Polytope::is_empty() const {
  LpResult r = solve_lp(Vector::Zero(dim()), H_, h_);
  if (r.status == LpStatus::Unbounded) throw NumericalFailure("is_empty: feasibility LP unbounded");
  return r.status == LpStatus::Infeasible;
}

bool Polytope::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) throw ContractViolation("Polytope::contains: dimension mismatch");
  return ((H_ * x - h_).array() <= tol).all();
}

double Polytope::support(const Vector& a) const {
  return support_point(a).first;
}

std::pair<double, Vector> Polytope::support_point(const Vector& a) const {
  if (a.size() != dim()) throw ContractViolation("Polytope::support: dimension mismatch");
  LpResult r = solve_lp(-a, H_, h_);
  switch (r.status) {
    case LpStatus::Optimal:
      return {-r.objective, r.x};
    case LpStatus::Unbounded:
      throw UnboundedDirection("support: set unbounded in requested direction");
    default:
      throw NumericalFailure("support: LP infeasible (empty polytope)");
  }
}

bool Polytope::subset_of(const Polytope& other, double tol) const {
  if (other.dim() != dim()) throw ContractViolation("subset_of: dimension mismatch");
  for (int i = 0; i < other.rows(); ++i) {
    if (support(other.H_.row(i).transpose()) > other.h_(i) + tol) return false;
  }
  return true;
}

Polytope Polytope::minkowski_sum(const Polytope& other) const {
  if (other.dim() != dim()) throw ContractViolation("minkowski_sum: dimension mismatch");
  const auto dirs = reconstruction_directions(H_, other.H_);
  Matrix H(dirs.size(), dim());
  Vector h(dirs.size());
  for (size_t i = 0; i < dirs.size(); ++i) {
    H.row(i) = dirs[i].transpose();
    h(i) = support(dirs[i]) + other.support(dirs[i]);
  }
  return Polytope(std::move(H), std::move(h)).reduce();
}

Polytope Polytope::pontryagin_diff(const Polytope& other) const {
  if (other.dim() != dim()) throw ContractViolation("pontryagin_diff: dimension mismatch");
  Vector h2(h_.size());
  for (int i = 0; i < rows(); ++i) h2(i) = h_(i) - other.support(H_.row(i).transpose());
  return Polytope(H_, std::move(h2));
}

Polytope Polytope::linear_map(const Matrix& M) const {
  if (M.cols() != dim()) throw ContractViolation("linear_map: column count mismatch");
  if (M.rows() == M.cols()) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (lu.isInvertible()) return Polytope(H_ * lu.inverse(), h_);
  }
  if (dim() > 3)
    throw UnsupportedOperation("linear_map: vertex path limited to dimension <= 3");
  const auto verts = vertices();
  if (verts.empty()) throw NumericalFailure("linear_map: no vertices (empty or unbounded set)");
  std::vector<Vector> imgs;
  imgs.reserve(verts.size());
  for (const auto& v : verts) imgs.push_back(M * v);
  return hull(imgs);
}

Polytope Polytope::reduce() const {
  Matrix H = H_;
  Vector h = h_;
  // normalize rows first so duplicates collapse
  for (int i = 0; i < H.rows(); ++i) {
    const double nrm = H.row(i).norm();
    if (nrm > 1e-12) {
      H.row(i) /= nrm;
      h(i) /= nrm;
    }
  }
  dedupe_rows(H, h);
  std::vector<int> keep(H.rows());
  for (size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
  size_t i = 0;
  while (i < keep.size() && keep.size() > 1) {
    // maximize row i over the others, with row i relaxed to stay bounded
    Matrix A(keep.size(), H.cols());
    Vector b(keep.size());
    for (size_t k = 0; k < keep.size(); ++k) {
      A.row(k) = H.row(keep[k]);
      b(k) = h(keep[k]) + (k == i ? 1.0 : 0.0);
    }
    LpResult r = solve_lp((-H.row(keep[i])).transpose(), A, b);
    if (r.status == LpStatus::Optimal && -r.objective <= h(keep[i]) + 1e-9) {
      keep.erase(keep.begin() + static_cast<long>(i));
    } else if (r.status == LpStatus::Infeasible) {
      throw NumericalFailure("reduce: polytope is empty");
    } else {
      ++i;
    }
  }
  Matrix H2(keep.size(), H.cols());
  Vector h2(keep.size());
  for (size_t k = 0; k < keep.size(); ++k) {
    H2.row(k) = H.row(keep[k]);
    h2(k) = h(keep[k]);
  }
  return Polytope(std::move(H2), std::move(h2));
}

std::vector<Vector> Polytope::vertices() const {
  const int d = dim();
  if (d > 3) throw UnsupportedOperation("vertices: dimension > 3");
  std::vector<Vector> out;
  combinations(rows(), d, [&](const std::vector<int>& idx) {
    Matrix A(d, d);
    Vector b(d);
    for (int k = 0; k < d; ++k) {
      A.row(k) = H_.row(idx[k]);
      b(k) = h_(idx[k]);
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) return;
    Vector x = lu.solve(b);
    if (!contains(x, 1e-7)) return;
    for (const auto& v : out)
      if ((v - x).norm() < 1e-9) return;
    out.push_back(std::move(x));
  });
  return out;
}

std::pair<Vector, Vector> Polytope::bounding_box() const {
  Vector lo(dim()), hi(dim());
  for (int k = 0; k < dim(); ++k) {
    Vector e = Vector::Zero(dim());
    e(k) = 1.0;
    hi(k) = support(e);
    lo(k) = -support(-e);
  }
  return {lo, hi};
}

nlohmann::json Polytope::to_json() const {
  nlohmann::json j;
  j["H"] = nlohmann::json::array();
  for (int i = 0; i < rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < dim(); ++k) row.push_back(H_(i, k));
    j["H"].push_back(row);
  }
  j["h"] = std::vector<double>(h_.data(), h_.data() + h_.size());
  return j;
}

Polytope Polytope::from_json(const nlohmann::json& j) {
  const auto& Hj = j.at("H");
  const auto& hj = j.at("h");
  const int q = static_cast<int>(Hj.size());
  if (q == 0) throw ContractViolation("Polytope::from_json: empty H");
  const int d = static_cast<int>(Hj.at(0).size());
  Matrix H(q, d);
  Vector h(q);
  for (int i = 0; i < q; ++i) {
    for (int k = 0; k < d; ++k) H(i, k) = Hj.at(i).at(k).get<double>();
    h(i) = hj.at(i).get<double>();
  }
  return Polytope(std::move(H), std::move(h));
}

}  // namespace petmpc
