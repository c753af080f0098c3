#include "petmpc/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace petmpc {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double min_eig(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

Plant Plant::realize(const UncertainModel& model, double delta) {
  if (std::abs(delta) > model.delta_max + 1e-12)
    throw ContractViolation("Plant::realize: |delta| exceeds delta_max");
  return Plant{model.A_at(delta), model.B_at(delta), delta};
}

Simulator::Simulator(SimSetup setup)
    : setup_(std::move(setup)),
      plant_(Plant::realize(setup_.model, setup_.delta)),
      mpc_(setup_.mpc),
      rls_(RlsState::init(setup_.model.A_nom, setup_.model.B_nom, setup_.lambda)),
      buffer_(init_buffer(setup_.W, setup_.mpc.pe, setup_.seed)),
      u_buffer_(setup_.mpc.pe, setup_.U.dim()),
      A_pred_(setup_.model.A_nom),
      B_pred_(setup_.model.B_nom),
      x_(setup_.x0),
      z_(setup_.x0) {  // z(0) = x(0), so e(0) = 0
  mpc_.validate();
  rls_.set_literal_timing(setup_.literal_timing);
  if (setup_.update_period < 1)
    throw ContractViolation("Simulator: update_period must be >= 1");
  if (x_.size() != setup_.model.n()) throw ContractViolation("Simulator: x0 dimension mismatch");
}

StepRecord Simulator::step() {
  StepRecord rec;
  rec.i = i_;
  rec.x = x_;
  rec.z = z_;
  rec.e = x_ - z_;

  // (1) controller at (z, buffer)
  MpcSolution sol = solve(mpc_, A_pred_, B_pred_, z_, buffer_, setup_.W);
  rec.monitors.qp_feasible = sol.feasible;
  if (!sol.feasible)
    throw FeasibilityLoss("Simulator: MPC infeasible at step " + std::to_string(i_));
  rec.v = sol.v_seq.front();
  rec.w = sol.w0;
  rec.cost_z = sol.cost_z;
  rec.cost_w = sol.cost_w;
  rec.kkt_residual = sol.kkt_residual;
  rec.pe_candidate_count = sol.pe_candidate_count;
  rec.pe_trivial_used = sol.pe_trivial_used;

  // (2) applied input
  rec.u = control_input(rec.v, mpc_.ingredients.K_t, x_, z_, rec.w);

  // (3) true plant
  Vector x_next = plant_.step(x_, rec.u);
  if (setup_.noise) x_next += setup_.noise(i_, x_next);

  // (4) identifier; the sample x(i) pairs with the stored previous regressor
  Vector phi(setup_.model.n() + setup_.model.m());
  phi << x_, rec.u;
  rls_.update(x_, phi);

  // (5) buffer
  buffer_.push(rec.w);
  u_buffer_.push(rec.u);
  rec.min_eig_M = min_eig(build_M(buffer_));

  // (6) nominal state
  z_ = advance_nominal(A_pred_, B_pred_, z_, rec.v);

  // (7) scheduled model publication and dependent-ingredient rebuild
  if ((i_ + 1) % setup_.update_period == 0) {
    auto [At, Bt] = rls_.current_model();
    A_pred_ = At;
    B_pred_ = Bt;
    TerminalIngredients ti =
        terminal_ingredients(A_pred_, B_pred_, mpc_.Q, mpc_.R, mpc_.ingredients.Z,
                             mpc_.ingredients.V, setup_.terminal_iter_max);
    mpc_.ingredients.P_f = ti.P_f;
    mpc_.ingredients.K_f = ti.K_f;
    mpc_.ingredients.Z_f = ti.Z_f;
  }

  // (8) monitors
  const double tol = setup_.monitor_tol;
  rec.monitors.x_in_X = setup_.X.contains(rec.x, tol);
  rec.monitors.u_in_U = setup_.U.contains(rec.u, tol);
  rec.monitors.e_in_S = mpc_.ingredients.S.contains(rec.e, tol);
  const Vector ws = (plant_.A_true - A_pred_) * rec.x + (plant_.B_true - B_pred_) * rec.u;
  rec.monitors.ws_in_WS = mpc_.ingredients.W_S.contains(ws, tol);
  if (u_buffer_.ready()) {
    rec.monitors.u_pe_transmitted =
        !is_pe(build_M(buffer_), mpc_.pe.eps_pd) || is_pe(build_M(u_buffer_), mpc_.pe.eps_pd);
  }
  rec.param_err_pct = rls_.parameter_error_pct(plant_.A_true, plant_.B_true);
  rec.rho1_bound = rho1_trace_bound(buffer_, setup_.W);

  if (setup_.fail_fast && !rec.monitors.all())
    throw NumericalFailure("Simulator: monitor failure at step " + std::to_string(i_));

  x_ = std::move(x_next);
  ++i_;
  return rec;
}

std::vector<StepRecord> Simulator::run(std::ostream* csv) {
  if (csv) write_csv_header(*csv);
  std::vector<StepRecord> records;
  records.reserve(setup_.steps);
  for (int k = 0; k < setup_.steps; ++k) {
    records.push_back(step());
    if (csv) write_csv_row(*csv, records.back());
  }
  return records;
}

void Simulator::write_csv_header(std::ostream& os) const {
  const int n = setup_.model.n();
  const int m = setup_.model.m();
  os << "i";
  auto vec_cols = [&os](const char* base, int count) {
    for (int k = 0; k < count; ++k) os << "," << base << k + 1;
  };
  vec_cols("x", n);
  vec_cols("z", n);
  vec_cols("u", m);
  vec_cols("v", m);
  vec_cols("w", m);
  vec_cols("e", n);
  os << ",cost_z,cost_w,kkt_residual,min_eig_M,rho1_bound,pe_candidates,pe_trivial"
     << ",mon_x_in_X,mon_u_in_U,mon_e_in_S,mon_ws_in_WS,mon_qp_feasible,mon_u_pe";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + m; ++j) os << ",theta_" << i + 1 << "_" << j + 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + m; ++j) os << ",err_pct_" << i + 1 << "_" << j + 1;
  os << "\n";
}

void Simulator::write_csv_row(std::ostream& os, const StepRecord& r) const {
  os << r.i;
  auto emit = [&os](const Vector& v) {
    for (int k = 0; k < v.size(); ++k) os << "," << fmt_double(v(k));
  };
  emit(r.x);
  emit(r.z);
  emit(r.u);
  emit(r.v);
  emit(r.w);
  emit(r.e);
  os << "," << fmt_double(r.cost_z) << "," << fmt_double(r.cost_w) << ","
     << fmt_double(r.kkt_residual) << "," << fmt_double(r.min_eig_M) << ","
     << fmt_double(r.rho1_bound) << "," << r.pe_candidate_count << "," << r.pe_trivial_used << ","
     << r.monitors.x_in_X << "," << r.monitors.u_in_U << "," << r.monitors.e_in_S << ","
     << r.monitors.ws_in_WS << "," << r.monitors.qp_feasible << ","
     << r.monitors.u_pe_transmitted;
  const Matrix& th = rls_.theta();
  for (int i = 0; i < th.rows(); ++i)
    for (int j = 0; j < th.cols(); ++j) os << "," << fmt_double(th(i, j));
  for (int i = 0; i < r.param_err_pct.rows(); ++i)
    for (int j = 0; j < r.param_err_pct.cols(); ++j)
      os << "," << fmt_double(r.param_err_pct(i, j));
  os << "\n";
}

nlohmann::json Simulator::summary(const std::vector<StepRecord>& records) const {
  nlohmann::json j;
  j["steps"] = records.size();
  if (records.empty()) return j;
  const StepRecord& last = records.back();
  j["final_param_err_pct"] = matrix_to_json(last.param_err_pct);
  double min_eig_m = std::numeric_limits<double>::infinity();
  double max_x_viol = -std::numeric_limits<double>::infinity();
  double max_u_viol = -std::numeric_limits<double>::infinity();
  double max_e_viol = -std::numeric_limits<double>::infinity();
  bool monitors_ok = true;
  for (const auto& r : records) {
    min_eig_m = std::min(min_eig_m, r.min_eig_M);
    max_x_viol = std::max(max_x_viol, (setup_.X.H() * r.x - setup_.X.h()).maxCoeff());
    max_u_viol = std::max(max_u_viol, (setup_.U.H() * r.u - setup_.U.h()).maxCoeff());
    max_e_viol =
        std::max(max_e_viol, (mpc_.ingredients.S.H() * r.e - mpc_.ingredients.S.h()).maxCoeff());
    monitors_ok = monitors_ok && r.monitors.all();
  }
  j["min_min_eig_M"] = min_eig_m;
  j["max_state_constraint_violation"] = max_x_viol;
  j["max_input_constraint_violation"] = max_u_viol;
  j["max_tube_violation"] = max_e_viol;
  j["all_monitors_passed"] = monitors_ok;
  return j;
}

}  // namespace petmpc
