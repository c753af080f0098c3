#pragma once

#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <vector>

#include "petmpc/controller.hpp"
#include "petmpc/excitation.hpp"
#include "petmpc/sets.hpp"
#include "petmpc/sysid.hpp"

namespace petmpc {

struct Plant {
  Matrix A_true;
  Matrix B_true;
  double delta = 0.0;

  static Plant realize(const UncertainModel& model, double delta);
  Vector step(const Vector& x, const Vector& u) const { return A_true * x + B_true * u; }
};

struct MonitorFlags {
  bool x_in_X = true;
  bool u_in_U = true;
  bool e_in_S = true;
  bool ws_in_WS = true;
  bool qp_feasible = true;
  bool u_pe_transmitted = true;  // Assumption-7 diagnostic, empirical
  bool all() const { return x_in_X && u_in_U && e_in_S && ws_in_WS && qp_feasible; }
};

struct StepRecord {
  long i = 0;
  Vector x, z, u, v, w, e;  // e = x - z at time i, exactly
  double min_eig_M = 0.0;
  double cost_z = 0.0;
  double cost_w = 0.0;
  double kkt_residual = 0.0;
  int pe_candidate_count = 0;
  bool pe_trivial_used = false;
  Matrix param_err_pct;
  double rho1_bound = 0.0;
  MonitorFlags monitors;
};

struct SimSetup {
  UncertainModel model;
  Polytope X;
  Polytope U;
  Polytope W;
  MpcConfig mpc;             // ingredients computed from the nominal model
  double lambda = 0.97;
  int update_period = 3;     // model publication cadence; 1 publishes every step
  bool literal_timing = false;
  Vector x0;
  int steps = 100;
  double delta = 0.0;        // true-plant realization
  unsigned seed = 1;
  bool fail_fast = false;
  double monitor_tol = 1e-7;
  int terminal_iter_max = 200;
  // optional additive state disturbance hook; off by default and excluded
  // from the acceptance scenarios
  std::function<Vector(long, const Vector&)> noise;
};

/// Closed loop: true plant, PE-tube MPC, RLS identifier, PE buffer and
/// runtime invariant monitors.  Strictly sequential.
class Simulator {
 public:
  explicit Simulator(SimSetup setup);

  /// One closed-loop step; returns the record and advances all state.
  /// Controller infeasibility throws FeasibilityLoss; monitor failures are
  /// recorded (fatal only with fail_fast).
  StepRecord step();

  /// Runs setup.steps steps; when `csv` is given, rows stream out as they
  /// are produced.
  std::vector<StepRecord> run(std::ostream* csv = nullptr);

  void write_csv_header(std::ostream& os) const;
  void write_csv_row(std::ostream& os, const StepRecord& r) const;
  nlohmann::json summary(const std::vector<StepRecord>& records) const;

  const RlsState& identifier() const { return rls_; }
  const PeBuffer& buffer() const { return buffer_; }
  const MpcConfig& mpc() const { return mpc_; }
  const Plant& plant() const { return plant_; }
  const Vector& x() const { return x_; }
  const Vector& z() const { return z_; }
  std::pair<Matrix, Matrix> prediction_model() const { return {A_pred_, B_pred_}; }

 private:
  SimSetup setup_;
  Plant plant_;
  MpcConfig mpc_;
  RlsState rls_;
  PeBuffer buffer_;
  PeBuffer u_buffer_;  // same window over the absolute input, diagnostic only
  Matrix A_pred_, B_pred_;
  Vector x_, z_;
  long i_ = 0;
};

}  // namespace petmpc
