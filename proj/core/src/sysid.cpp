#include "petmpc/sysid.hpp"

namespace petmpc {

namespace {
constexpr double kSingularEig = 1e-10;
}

RlsState RlsState::init(const Matrix& A0, const Matrix& B0, double lambda) {
  if (A0.rows() != A0.cols() || B0.rows() != A0.rows())
    throw ContractViolation("RlsState::init: shape mismatch");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw ContractViolation("RlsState::init: lambda must be in (0, 1]");
  RlsState s;
  const int n = static_cast<int>(A0.rows());
  const int m = static_cast<int>(B0.cols());
  s.theta_.resize(n, n + m);
  s.theta_ << A0, B0;
  s.R_id_ = Matrix::Zero(n + m, n + m);
  s.phi_prev_ = Vector::Zero(n + m);
  s.lambda_ = lambda;
  return s;
}

Vector RlsState::predict() const {
  return theta_ * phi_prev_;
}

void RlsState::update(const Vector& x_new, const Vector& phi_new) {
  if (x_new.size() != n() || phi_new.size() != n() + m())
    throw ContractViolation("RlsState::update: dimension mismatch");
  if (!x_new.allFinite() || !phi_new.allFinite())
    throw ContractViolation("RlsState::update: non-finite input");

  const Vector innovation = x_new - theta_ * phi_prev_;
  const Vector& reg = literal_timing_ ? phi_new : phi_prev_;
  R_id_ = lambda_ * R_id_ + reg * reg.transpose();
  R_id_ = 0.5 * (R_id_ + R_id_.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(R_id_);
  Vector gain;
  if (eig.eigenvalues().minCoeff() > kSingularEig) {
    gain = R_id_.ldlt().solve(reg);
  } else {
    // singular phase: minimum-norm least-squares solve in place of the inverse
    gain = R_id_.completeOrthogonalDecomposition().solve(reg);
  }
  theta_ += innovation * gain.transpose();
  phi_prev_ = phi_new;
  ++update_count_;
}

std::pair<Matrix, Matrix> RlsState::current_model() const {
  return {theta_.leftCols(n()), theta_.rightCols(m())};
}

Matrix RlsState::parameter_error_pct(const Matrix& A_true, const Matrix& B_true,
                                     Matrix* abs_flag) const {
  if (A_true.rows() != n() || A_true.cols() != n() || B_true.rows() != n() || B_true.cols() != m())
    throw ContractViolation("parameter_error_pct: shape mismatch");
  Matrix truth(n(), n() + m());
  truth << A_true, B_true;
  Matrix err(n(), n() + m());
  if (abs_flag) *abs_flag = Matrix::Zero(n(), n() + m());
  for (int i = 0; i < err.rows(); ++i) {
    for (int j = 0; j < err.cols(); ++j) {
      if (truth(i, j) != 0.0) {
        err(i, j) = 100.0 * (theta_(i, j) - truth(i, j)) / truth(i, j);
      } else {
        err(i, j) = theta_(i, j) - truth(i, j);
        if (abs_flag) (*abs_flag)(i, j) = 1.0;
      }
    }
  }
  return err;
}

void RlsState::set_information_matrix(const Matrix& R) {
  if (R.rows() != n() + m() || R.cols() != n() + m())
    throw ContractViolation("set_information_matrix: shape mismatch");
  R_id_ = R;
}

}  // namespace petmpc
