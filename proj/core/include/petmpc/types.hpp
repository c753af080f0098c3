#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace petmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when a caller violates a documented precondition (shape mismatch,
// non-finite input, parameter out of domain).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when an LP/QP/eigen routine fails for numerical reasons.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Support queried in a direction where the set is unbounded.
class UnboundedDirection : public std::runtime_error {
 public:
  explicit UnboundedDirection(const std::string& msg) : std::runtime_error(msg) {}
};

class UnsupportedOperation : public std::runtime_error {
 public:
  explicit UnsupportedOperation(const std::string& msg) : std::runtime_error(msg) {}
};

// A set construction produced an empty result where the design requires a
// nonempty one (tightened constraints, terminal set).
class InfeasibleDesign : public std::runtime_error {
 public:
  explicit InfeasibleDesign(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative construction did not converge within the configured limits.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& msg, double best) : std::runtime_error(msg), best_value(best) {}
  double best_value;
};

// No persistently exciting candidate exists; indicates the feasibility
// invariant maintained by the lookahead constraint has been broken.
class FeasibilityLoss : public std::runtime_error {
 public:
  explicit FeasibilityLoss(const std::string& msg) : std::runtime_error(msg) {}
};

class InitializationError : public std::runtime_error {
 public:
  explicit InitializationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace petmpc
