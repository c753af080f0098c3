#pragma once

#include <json.hpp>
#include <vector>

#include "petmpc/types.hpp"

namespace petmpc {

/// Convex polytope in halfspace representation, {x : Hx <= h}.
///
/// The carrier type for every constraint and disturbance set in this
/// project.  All queries are LP-backed; the sets involved are small
/// (dimension <= 3, tens of rows), so a dense simplex is plenty.
class Polytope {
 public:
  Polytope(Matrix H, Vector h);

  /// Axis-aligned box given per-dimension bounds.
  static Polytope box(const Vector& lo, const Vector& hi);
  /// The singleton {p}.
  static Polytope point(const Vector& p);
  /// Convex hull of a point cloud (ambient dimension <= 2).  Handles
  /// degenerate clouds (single point, collinear points).
  static Polytope hull(const std::vector<Vector>& points);

  const Matrix& H() const { return H_; }
  const Vector& h() const { return h_; }
  int dim() const { return static_cast<int>(H_.cols()); }
  int rows() const { return static_cast<int>(H_.rows()); }

  bool is_empty() const;
  bool contains(const Vector& x, double tol = 1e-9) const;

  /// max{a'x : x in P} by one LP.  Throws UnboundedDirection if unbounded.
  double support(const Vector& a) const;
  /// Support value together with a maximizer.
  std::pair<double, Vector> support_point(const Vector& a) const;

  /// True iff P is a subset of `other`, decided by support comparison on
  /// every row of `other`.
  bool subset_of(const Polytope& other, double tol = 1e-9) const;

  /// P (+) Q via support reconstruction over the union of both operands'
  /// facet normals (plus 64 spread directions in 2-D), then reduced.
  Polytope minkowski_sum(const Polytope& other) const;

  /// P (-) Q = {x : x (+) Q subseteq P}.  An empty result is a value, not
  /// an error.
  Polytope pontryagin_diff(const Polytope& other) const;

  /// Image {Mx : x in P}.  Invertible square maps go by constraint
  /// substitution; otherwise vertex enumeration (dim <= 3) followed by a
  /// hull in the codomain (codomain dim <= 2).
  Polytope linear_map(const Matrix& M) const;

  /// Drops redundant halfspaces; membership-equivalent to the input.
  Polytope reduce() const;

  /// Vertex enumeration for dim <= 3 (facet-intersection scan).
  std::vector<Vector> vertices() const;

  /// Componentwise [lo, hi] of the set (2*dim support calls).
  std::pair<Vector, Vector> bounding_box() const;

  nlohmann::json to_json() const;
  static Polytope from_json(const nlohmann::json& j);

 private:
  Matrix H_;
  Vector h_;
};

}  // namespace petmpc
