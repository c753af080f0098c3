#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "petmpc/sets.hpp"
#include "petmpc/simulator.hpp"

namespace petmpc {

/// Complete description of one closed-loop experiment.  Serialized as JSON
/// with a versioned schema; matrices are row-major nested arrays.
struct ScenarioConfig {
  static constexpr int kSchemaVersion = 1;

  std::string name;

  UncertainModel model;
  Polytope X;
  Polytope U;
  Polytope W;

  // controller
  int N = 3;
  Matrix Q;
  Matrix R;
  Matrix K_t;  // tube gain is an input, not synthesized
  int grid_density = 41;
  double qp_tol = 1e-8;

  // excitation
  PeParams pe;

  // identification
  double lambda = 0.97;
  int update_period = 3;
  bool literal_timing = false;

  // simulation
  Vector x0;
  int steps = 100;
  double delta = 0.15;
  unsigned seed = 1;
  bool fail_fast = false;
  double monitor_tol = 1e-7;

  // offline set computation
  double alpha_max = 0.05;
  int s_max = 200;
  int terminal_iter_max = 200;

  /// Parameter-domain checks only (dimensions, signs, schema constraints);
  /// set-geometric assumptions live in check_assumptions.
  void validate() const;

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::string& path);
};

/// Offline pipeline: A_K from K_t, W_hat = B_nom W, parametric bound W_S,
/// S = mRPI(A_K, W_hat (+) W_S), U_hat = U (-) W, (Z, V) by tightening, and
/// the terminal triple from the nominal model.
TubeIngredients build_ingredients(const ScenarioConfig& cfg);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
};

/// Materializes the standing assumptions as pass/fail checks: Schur tube
/// dynamics, compact origin-containing sets, U_hat (+) W inside U, S inside
/// X, K_t S inside U_hat, nonempty tightened and terminal sets, PE parameter
/// domain.
AssumptionReport check_assumptions(const ScenarioConfig& cfg, const TubeIngredients& ing);

/// Assembles the simulator input from a config and precomputed ingredients.
SimSetup make_setup(const ScenarioConfig& cfg, TubeIngredients ingredients);

/// Hash of the ingredient-relevant part of a config; stored beside cached
/// TubeIngredients to detect staleness.
std::string ingredient_hash(const ScenarioConfig& cfg);

/// Embedded experiment configs: "identification" (x0 = 0) and "regulation"
/// (x0 = [8, 8]).
ScenarioConfig builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

}  // namespace petmpc
