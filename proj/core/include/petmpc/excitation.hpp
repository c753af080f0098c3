#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "petmpc/polytope.hpp"
#include "petmpc/types.hpp"

namespace petmpc {

struct PeParams {
  int Np = 1;          // stacked-window length
  int lp = 1;          // lookback count
  double rho0 = 0.0;   // lower excitation level
  std::optional<double> rho1;  // upper level, monitored only
  double eps_pd = 1e-8;        // strictness margin realizing M > 0

  void validate() const;
};

/// Ring buffer of past exciting inputs.  Only the last lp+Np-1 entries ever
/// matter, so older ones are dropped.
class PeBuffer {
 public:
  PeBuffer(PeParams params, int input_dim);

  void push(const Vector& w);
  int size() const { return static_cast<int>(history_.size()); }
  int required_length() const { return params_.lp + params_.Np - 1; }
  bool ready() const { return size() >= required_length(); }
  const PeParams& params() const { return params_; }
  int input_dim() const { return input_dim_; }
  /// w(i - back); back = 0 is the newest entry.
  const Vector& at_back(int back) const;
  const std::deque<Vector>& history() const { return history_; }

 private:
  PeParams params_;
  int input_dim_;
  std::deque<Vector> history_;  // newest last
};

/// Windowed information matrix
///   M = sum_{j=0}^{lp-1} w_stack(i-j) w_stack(i-j)' - rho0 * I,
/// where w_stack is the Np-deep stack of consecutive inputs.  When
/// `candidate` is given it plays the role of w(i) on top of the buffer.
Matrix build_M(const PeBuffer& buf, const std::optional<Vector>& candidate = std::nullopt);

/// Positive definiteness with margin: smallest eigenvalue >= eps_pd.
bool is_pe(const Matrix& M, double eps_pd);

/// Np-step lookahead test: append w0, then continue with the periodic
/// trivial candidates w(i+k-lp), and require every resulting M to stay
/// positive definite.
bool lookahead_feasible(const PeBuffer& buf, const Vector& w0);

/// Smallest-cost (w0' R w0) lookahead-feasible candidate from a grid over W
/// plus the always-feasible trivial candidate w(i-lp).  Ties break toward
/// smaller Euclidean norm, then lexicographically larger.
struct SelectionResult {
  Vector w0;
  double cost = 0.0;
  int candidate_count = 0;   // feasible candidates considered
  bool trivial_used = false; // chosen w0 equals the trivial candidate
};
SelectionResult select_w0(const PeBuffer& buf, const Polytope& W, const Matrix& R,
                          int grid_density);

/// Builds a feasible initial buffer of length lp+Np-1 by seeded sampling of
/// scaled vertices of W, resampling until M clears eps_pd.
PeBuffer init_buffer(const Polytope& W, const PeParams& params, unsigned seed,
                     int attempts_max = 1000);

/// Trace bound standing in for the never-specified upper level rho1.
double rho1_trace_bound(const PeBuffer& buf, const Polytope& W);

}  // namespace petmpc
