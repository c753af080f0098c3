#include "petmpc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace petmpc {

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

double spectral_radius(const Matrix& A) {
  Eigen::EigenSolver<Matrix> eig(A, /*computeEigenvectors=*/false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation("ScenarioConfig: " + msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  model.validate();
  const int n = model.n();
  const int m = model.m();
  require(X.dim() == n, "X dimension must match the state dimension");
  require(U.dim() == m, "U dimension must match the input dimension");
  require(W.dim() == m, "W dimension must match the input dimension");
  require(N >= 1, "N must be >= 1");
  require(Q.rows() == n && Q.cols() == n, "Q must be n x n");
  require(R.rows() == m && R.cols() == m, "R must be m x m");
  require(K_t.rows() == m && K_t.cols() == n, "K_t must be m x n");
  require(grid_density >= 1, "grid_density must be >= 1");
  require(qp_tol > 0.0, "qp_tol must be > 0");
  pe.validate();
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
  require(update_period >= 1, "update_period must be >= 1");
  require(x0.size() == n, "x0 must have the state dimension");
  require(steps >= 0, "steps must be >= 0");
  require(std::abs(delta) <= model.delta_max + 1e-12, "|delta| must not exceed delta_max");
  require(monitor_tol > 0.0, "monitor_tol must be > 0");
  require(alpha_max > 0.0 && alpha_max < 1.0, "alpha_max must lie in (0, 1)");
  require(s_max >= 1, "s_max must be >= 1");
  require(terminal_iter_max >= 1, "terminal_iter_max must be >= 1");
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["model"] = model.to_json();
  j["sets"] = {{"X", X.to_json()}, {"U", U.to_json()}, {"W", W.to_json()}};
  j["controller"] = {{"N", N},
                     {"Q", matrix_to_json(Q)},
                     {"R", matrix_to_json(R)},
                     {"K_t", matrix_to_json(K_t)},
                     {"grid_density", grid_density},
                     {"qp_tol", qp_tol}};
  nlohmann::json ex = {
      {"Np", pe.Np}, {"lp", pe.lp}, {"rho0", pe.rho0}, {"eps_pd", pe.eps_pd}};
  if (pe.rho1) ex["rho1"] = *pe.rho1;
  j["excitation"] = ex;
  j["identification"] = {{"lambda", lambda},
                         {"update_period", update_period},
                         {"literal_timing", literal_timing}};
  j["simulation"] = {{"x0", vector_to_json(x0)}, {"steps", steps},
                     {"delta", delta},           {"seed", seed},
                     {"fail_fast", fail_fast},   {"monitor_tol", monitor_tol}};
  j["offline"] = {{"alpha_max", alpha_max},
                  {"s_max", s_max},
                  {"terminal_iter_max", terminal_iter_max}};
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    throw ContractViolation("ScenarioConfig: unsupported schema_version " +
                            std::to_string(version));
  const auto& sets = j.at("sets");
  const auto& ctrl = j.at("controller");
  const auto& ex = j.at("excitation");
  const auto& id = j.at("identification");
  const auto& sim = j.at("simulation");
  const auto& off = j.at("offline");

  PeParams pe;
  pe.Np = ex.at("Np").get<int>();
  pe.lp = ex.at("lp").get<int>();
  pe.rho0 = ex.at("rho0").get<double>();
  pe.eps_pd = ex.at("eps_pd").get<double>();
  if (ex.contains("rho1")) pe.rho1 = ex.at("rho1").get<double>();

  ScenarioConfig cfg{
      .name = j.value("name", std::string{}),
      .model = UncertainModel::from_json(j.at("model")),
      .X = Polytope::from_json(sets.at("X")),
      .U = Polytope::from_json(sets.at("U")),
      .W = Polytope::from_json(sets.at("W")),
      .N = ctrl.at("N").get<int>(),
      .Q = matrix_from_json(ctrl.at("Q")),
      .R = matrix_from_json(ctrl.at("R")),
      .K_t = matrix_from_json(ctrl.at("K_t")),
      .grid_density = ctrl.at("grid_density").get<int>(),
      .qp_tol = ctrl.at("qp_tol").get<double>(),
      .pe = pe,
      .lambda = id.at("lambda").get<double>(),
      .update_period = id.at("update_period").get<int>(),
      .literal_timing = id.value("literal_timing", false),
      .x0 = vector_from_json(sim.at("x0")),
      .steps = sim.at("steps").get<int>(),
      .delta = sim.at("delta").get<double>(),
      .seed = sim.at("seed").get<unsigned>(),
      .fail_fast = sim.value("fail_fast", false),
      .monitor_tol = sim.value("monitor_tol", 1e-7),
      .alpha_max = off.at("alpha_max").get<double>(),
      .s_max = off.at("s_max").get<int>(),
      .terminal_iter_max = off.at("terminal_iter_max").get<int>(),
  };
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("ScenarioConfig::load: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractViolation("ScenarioConfig::load: " + std::string(e.what()));
  }
  return from_json(j);
}

TubeIngredients build_ingredients(const ScenarioConfig& cfg) {
  cfg.validate();
  const Matrix A_K = cfg.model.A_nom + cfg.model.B_nom * cfg.K_t;
  if (spectral_radius(A_K) >= 1.0)
    throw InfeasibleDesign("build_ingredients: A + B K_t is not Schur");

  Polytope W_hat = cfg.W.linear_map(cfg.model.B_nom);
  Polytope W_S = compute_ws(cfg.model, cfg.X, cfg.U);
  Polytope W_total = W_hat.minkowski_sum(W_S);
  Polytope S = compute_mrpi(A_K, W_total, cfg.alpha_max, cfg.s_max);

  Polytope U_hat = cfg.U.pontryagin_diff(cfg.W);
  if (U_hat.is_empty())
    throw InfeasibleDesign("build_ingredients: U (-) W is empty (Assumption 5)");
  auto [Z, V] = tighten(cfg.X, U_hat, S, cfg.K_t);
  TerminalIngredients term = terminal_ingredients(cfg.model.A_nom, cfg.model.B_nom, cfg.Q, cfg.R,
                                                  Z, V, cfg.terminal_iter_max);
  return TubeIngredients{cfg.K_t, std::move(S),   std::move(W_S), std::move(W_hat),
                         std::move(Z), std::move(V), std::move(term.Z_f), term.P_f, term.K_f};
}

bool AssumptionReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

AssumptionReport check_assumptions(const ScenarioConfig& cfg, const TubeIngredients& ing) {
  AssumptionReport rep;
  auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  {
    const double rho = spectral_radius(cfg.model.A_nom + cfg.model.B_nom * cfg.K_t);
    std::ostringstream os;
    os << "spectral radius " << rho;
    add("tube_dynamics_schur", rho < 1.0, os.str());
  }
  {
    bool ok = true;
    std::string detail = "X, U, W bounded and contain the origin";
    try {
      const auto check = [](const Polytope& P, const char* label) {
        P.bounding_box();  // throws UnboundedDirection when unbounded
        if (!P.contains(Vector::Zero(P.dim())))
          throw ContractViolation(std::string(label) + " does not contain the origin");
      };
      check(cfg.X, "X");
      check(cfg.U, "U");
      check(cfg.W, "W");
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    add("sets_compact_with_origin", ok, detail);
  }
  {
    Polytope U_hat = cfg.U.pontryagin_diff(cfg.W);
    const bool nonempty = !U_hat.is_empty();
    bool contained = nonempty && U_hat.minkowski_sum(cfg.W).subset_of(cfg.U, 1e-7);
    add("input_margin", nonempty && contained,
        nonempty ? "U_hat (+) W inside U" : "U_hat = U (-) W is empty");
    add("tube_inside_state_set", ing.S.subset_of(cfg.X, 1e-7), "S inside X");
    add("tube_input_share", nonempty && ing.S.linear_map(cfg.K_t).subset_of(U_hat, 1e-7),
        "K_t S inside U_hat");
  }
  {
    const bool z_ok = !ing.Z.is_empty() && ing.Z.contains(Vector::Zero(cfg.model.n()));
    const bool v_ok = !ing.V.is_empty() && ing.V.contains(Vector::Zero(cfg.model.m()));
    add("tightened_sets_nonempty", z_ok && v_ok, "Z and V nonempty with the origin");
    const bool zf_ok = !ing.Z_f.is_empty() && ing.Z_f.contains(Vector::Zero(cfg.model.n()));
    const double rho_f = spectral_radius(cfg.model.A_nom + cfg.model.B_nom * ing.K_f);
    add("terminal_set_nonempty", zf_ok && rho_f < 1.0,
        "Z_f nonempty with the origin, terminal loop Schur");
  }
  {
    bool ok = true;
    std::string detail = "Np, lp, rho0, eps_pd in domain";
    try {
      cfg.pe.validate();
      if (cfg.grid_density < 1) throw ContractViolation("grid_density must be >= 1");
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    add("excitation_parameters", ok, detail);
  }
  return rep;
}

SimSetup make_setup(const ScenarioConfig& cfg, TubeIngredients ingredients) {
  MpcConfig mpc{cfg.N,  cfg.Q,           cfg.R,     std::move(ingredients),
                cfg.pe, cfg.grid_density, cfg.qp_tol};
  return SimSetup{cfg.model,
                  cfg.X,
                  cfg.U,
                  cfg.W,
                  std::move(mpc),
                  cfg.lambda,
                  cfg.update_period,
                  cfg.literal_timing,
                  cfg.x0,
                  cfg.steps,
                  cfg.delta,
                  cfg.seed,
                  cfg.fail_fast,
                  cfg.monitor_tol,
                  cfg.terminal_iter_max,
                  {}};
}

std::string ingredient_hash(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["model"] = cfg.model.to_json();
  j["X"] = cfg.X.to_json();
  j["U"] = cfg.U.to_json();
  j["W"] = cfg.W.to_json();
  j["Q"] = matrix_to_json(cfg.Q);
  j["R"] = matrix_to_json(cfg.R);
  j["K_t"] = matrix_to_json(cfg.K_t);
  j["alpha_max"] = cfg.alpha_max;
  j["s_max"] = cfg.s_max;
  j["terminal_iter_max"] = cfg.terminal_iter_max;
  return content_hash(j.dump());
}

namespace {

ScenarioConfig base_experiment(std::string name, Vector x0) {
  Matrix A_nom(2, 2), B_nom(2, 1), A_dir(2, 2), B_dir(2, 1), K_t(1, 2);
  A_nom << 0.42, -0.28, 0.02, 0.60;
  B_nom << 0.30, -0.40;
  A_dir << 0.6, -0.4, 0.6, 0.85;
  B_dir << 0.2, -0.4;
  K_t << -0.112, 0.354;

  Vector lo2(2), hi2(2), lo1(1), hi1(1), wlo(1), whi(1);
  lo2 << -17.0, -17.0;
  hi2 << 17.0, 17.0;
  lo1 << -4.0;
  hi1 << 4.0;
  wlo << -0.2;
  whi << 0.2;

  PeParams pe;
  pe.Np = 6;
  pe.lp = 11;
  pe.rho0 = 0.05;
  pe.eps_pd = 1e-8;

  return ScenarioConfig{
      .name = std::move(name),
      .model = UncertainModel{A_nom, B_nom, A_dir, B_dir, 0.15},
      .X = Polytope::box(lo2, hi2),
      .U = Polytope::box(lo1, hi1),
      .W = Polytope::box(wlo, whi),
      .N = 3,
      .Q = Matrix::Identity(2, 2),
      .R = Matrix::Identity(1, 1),
      .K_t = K_t,
      .grid_density = 41,
      .qp_tol = 1e-8,
      .pe = pe,
      .lambda = 0.97,
      .update_period = 3,
      .literal_timing = false,
      .x0 = std::move(x0),
      .steps = 100,
      .delta = 0.15,
      .seed = 1,
      .fail_fast = false,
      .monitor_tol = 1e-7,
      .alpha_max = 0.05,
      .s_max = 200,
      .terminal_iter_max = 200,
  };
}

}  // namespace

ScenarioConfig builtin_config(const std::string& name) {
  if (name == "identification") return base_experiment(name, Vector::Zero(2));
  if (name == "regulation") {
    Vector x0(2);
    x0 << 8.0, 8.0;
    return base_experiment(name, std::move(x0));
  }
  throw ContractViolation("builtin_config: unknown config '" + name + "'");
}

std::vector<std::string> builtin_config_names() { return {"identification", "regulation"}; }

}  // namespace petmpc
