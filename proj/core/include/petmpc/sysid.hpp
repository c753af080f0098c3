#pragma once

#include "petmpc/types.hpp"

namespace petmpc {

/// Recursive least squares with constant forgetting factor.  The state-space
/// model is treated as n parallel ARX(1,1) rows sharing one regressor
/// phi = [x' u']', so a single information matrix serves every row.
class RlsState {
 public:
  /// theta rows start at [A0 B0]; the information matrix starts at zero, so
  /// the gain goes through a minimum-norm least-squares solve until it
  /// becomes invertible.
  static RlsState init(const Matrix& A0, const Matrix& B0, double lambda);

  /// Prediction x_hat_j = phi_prev' theta_j for every row.
  Vector predict() const;

  /// One recursion with the new sample and its regressor.  The default
  /// timing uses the sample-generating regressor (phi_prev) for the
  /// prediction, the gain and the information update; `literal_timing`
  /// switches the gain and information update to the incoming regressor,
  /// reproducing the published recursion verbatim.
  void update(const Vector& x_new, const Vector& phi_new);

  /// Restacks theta into (A_tilde, B_tilde).
  std::pair<Matrix, Matrix> current_model() const;

  /// Entrywise 100*(estimated-true)/true.  Entries whose true value is zero
  /// are reported as absolute error; `abs_flag` marks them.
  Matrix parameter_error_pct(const Matrix& A_true, const Matrix& B_true,
                             Matrix* abs_flag = nullptr) const;

  const Matrix& theta() const { return theta_; }
  const Matrix& information_matrix() const { return R_id_; }
  const Vector& phi_prev() const { return phi_prev_; }
  double lambda() const { return lambda_; }
  long update_count() const { return update_count_; }
  bool literal_timing() const { return literal_timing_; }
  void set_literal_timing(bool on) { literal_timing_ = on; }
  void set_phi_prev(const Vector& phi) { phi_prev_ = phi; }
  void set_information_matrix(const Matrix& R);

  int n() const { return static_cast<int>(theta_.rows()); }
  int m() const { return static_cast<int>(theta_.cols()) - n(); }

 private:
  RlsState() = default;

  Matrix theta_;     // n x (n+m), row j = [A_j B_j]
  Matrix R_id_;      // (n+m) x (n+m)
  double lambda_ = 1.0;
  Vector phi_prev_;  // n+m
  long update_count_ = 0;
  bool literal_timing_ = false;
};

}  // namespace petmpc
