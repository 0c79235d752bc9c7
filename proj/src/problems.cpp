#include "halfbvm/problems.hpp"

#include <cmath>
#include <future>
#include <map>
#include <set>

#include "halfbvm/numerics.hpp"

namespace halfbvm {

std::string model_name(Model m) {
  switch (m) {
    case Model::HalfDiffusion: return "half_diffusion";
    case Model::MassTransfer: return "mass_transfer";
    case Model::Advection: return "advection";
    case Model::Schrodinger: return "schrodinger";
  }
  return "unknown";
}

Model model_from_name(const std::string& s) {
  for (Model m : {Model::HalfDiffusion, Model::MassTransfer, Model::Advection, Model::Schrodinger})
    if (model_name(m) == s) return m;
  throw ConfigError("model: unknown model '" + s + "'");
}

namespace {

enum class Data { Manufactured, Homogeneous, GaussianQuartic, TwoLorentzian, SingleMode, Zero };

struct CatalogEntry {
  Model model;
  double a, L, T, eps, delta, V;
  int N;
  double h;
  Data data;
  HilbertMethod hilbert = HilbertMethod::Exact;
  LinearSolver method = LinearSolver::Gmres;
};

const std::map<std::string, CatalogEntry>& catalog() {
  static const std::map<std::string, CatalogEntry> c = {
      {"sec5_1_homogeneous", {Model::HalfDiffusion, -10, 20, 20, 0.1, 0.0, 0.0, 640, 0.025, Data::Homogeneous}},
      {"sec5_1_manufactured", {Model::HalfDiffusion, -10, 20, 20, 0.1, 0.0, 0.0, 640, 0.025, Data::Manufactured}},
      {"sec5_2_homogeneous", {Model::MassTransfer, -10, 20, 20, 0.1, 0.02, 0.0, 640, 0.025, Data::Homogeneous}},
      {"sec5_2_manufactured", {Model::MassTransfer, -10, 20, 20, 0.1, 0.02, 0.0, 640, 0.025, Data::Manufactured}},
      {"fig8_advection", {Model::Advection, -10, 20, 20, 0.01, 0.2, 0.0, 640, 0.0125, Data::Homogeneous}},
      {"sec5_3_manufactured", {Model::Advection, -10, 20, 20, 0.01, 0.2, 0.0, 640, 0.0125, Data::Manufactured}},
      {"fig9_gaussian_quartic",
       {Model::Advection, -10, 20, 20, 0.01, 0.2, 0.0, 640, 0.0125, Data::GaussianQuartic, HilbertMethod::Weideman}},
      // With eps = 0 every tau lambda lies on the GMM segment: omega-circulant
      // blocks turn singular or GMRES stagnates, so the exact solve is the default.
      {"fig10_transport",
       {Model::Advection, -10, 20, 2, 0.0, 1.0, 0.0, 80, 0.025, Data::Homogeneous, HilbertMethod::Exact,
        LinearSolver::Direct}},
      {"sec6_schrodinger", {Model::Schrodinger, -25, 50, 20, 0.1, 0.0, 0.0, 640, 0.05, Data::TwoLorentzian}},
      {"single_mode", {Model::HalfDiffusion, 0, 20, 2, 0.1, 0.0, 0.0, 40, 0.1, Data::SingleMode}},
      {"zero", {Model::HalfDiffusion, -10, 20, 2, 0.1, 0.0, 0.0, 20, 0.2, Data::Zero}},
  };
  return c;
}

const CatalogEntry& entry(const std::string& name) {
  auto it = catalog().find(name);
  if (it == catalog().end()) throw ConfigError("problem: unknown catalog entry '" + name + "'");
  return it->second;
}

std::string block_solver_name(BlockSolver b) {
  switch (b) {
    case BlockSolver::Auto: return "auto";
    case BlockSolver::Tridiagonal: return "tridiagonal";
    case BlockSolver::Circulant: return "circulant";
    case BlockSolver::Dense: return "dense";
  }
  return "auto";
}

BlockSolver block_solver_from_name(const std::string& s) {
  for (BlockSolver b : {BlockSolver::Auto, BlockSolver::Tridiagonal, BlockSolver::Circulant, BlockSolver::Dense})
    if (block_solver_name(b) == s) return b;
  throw ConfigError("solver.block_solver: unknown value '" + s + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& dst, const std::string& prefix = "") {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(prefix + key + ": " + e.what());
  }
}

template <class T>
void read_opt(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  T v{};
  read(j, key, v);
  dst = v;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(prefix + it.key() + ": unknown field");
}

}  // namespace

std::vector<std::string> problem_catalog() {
  std::vector<std::string> out;
  for (const auto& kv : catalog()) out.push_back(kv.first);
  return out;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(j,
             {"problem", "model", "a", "L", "T", "eps", "delta", "V", "N", "tau", "m", "h", "mode", "hilbert",
              "weideman_N", "images", "solver", "sweep_h", "sweep_tau", "tau_ratio", "compare_unpreconditioned",
              "snapshots", "n_max"},
             "");
  ExperimentConfig c;
  read(j, "problem", c.problem);
  const CatalogEntry& e = entry(c.problem);
  c.model = e.model;
  c.a = e.a;
  c.L = e.L;
  c.T = e.T;
  c.eps = e.eps;
  c.delta = e.delta;
  c.V = e.V;
  c.hilbert = e.hilbert;
  c.solver.method = e.method;

  if (j.contains("model")) {
    std::string s;
    read(j, "model", s);
    c.model = model_from_name(s);
  }
  read(j, "a", c.a);
  read(j, "L", c.L);
  read(j, "T", c.T);
  read(j, "eps", c.eps);
  read(j, "delta", c.delta);
  read(j, "V", c.V);
  read_opt(j, "N", c.N);
  read_opt(j, "tau", c.tau);
  read_opt(j, "m", c.m);
  read_opt(j, "h", c.h);
  if (!c.N && !c.tau) c.N = e.N;
  if (!c.m && !c.h) c.h = e.h;
  read(j, "mode", c.mode);
  if (j.contains("hilbert")) {
    std::string s;
    read(j, "hilbert", s);
    try {
      c.hilbert = hilbert_method_from_name(s);
    } catch (const std::exception&) {
      throw ConfigError("hilbert: unknown method '" + s + "'");
    }
  }
  read(j, "weideman_N", c.weideman_N);
  read_opt(j, "images", c.images);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (!s.is_object()) throw ConfigError("solver: expected an object");
    check_keys(s, {"method", "tol", "max_iter", "restart", "theta", "preconditioned", "block_solver"}, "solver.");
    if (s.contains("method")) {
      std::string m;
      read(s, "method", m, "solver.");
      if (m == "gmres") c.solver.method = LinearSolver::Gmres;
      else if (m == "direct") c.solver.method = LinearSolver::Direct;
      else throw ConfigError("solver.method: unknown method '" + m + "'");
    }
    read(s, "tol", c.solver.tol, "solver.");
    read(s, "max_iter", c.solver.max_iter, "solver.");
    read(s, "restart", c.solver.restart, "solver.");
    read(s, "theta", c.solver.theta, "solver.");
    read(s, "preconditioned", c.solver.preconditioned, "solver.");
    if (s.contains("block_solver")) {
      std::string b;
      read(s, "block_solver", b, "solver.");
      c.solver.block_solver = block_solver_from_name(b);
    }
  }
  read(j, "sweep_h", c.sweep_h);
  read(j, "sweep_tau", c.sweep_tau);
  read(j, "tau_ratio", c.tau_ratio);
  read(j, "compare_unpreconditioned", c.compare_unpreconditioned);
  read(j, "snapshots", c.snapshots);
  read(j, "n_max", c.n_max);
  validate_config(c);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["model"] = model_name(c.model);
  j["a"] = c.a;
  j["L"] = c.L;
  j["T"] = c.T;
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["V"] = c.V;
  if (c.N) j["N"] = *c.N;
  if (c.tau) j["tau"] = *c.tau;
  if (c.m) j["m"] = *c.m;
  if (c.h) j["h"] = *c.h;
  j["mode"] = c.mode;
  j["hilbert"] = hilbert_method_name(c.hilbert);
  j["weideman_N"] = c.weideman_N;
  if (c.images) j["images"] = *c.images;
  j["solver"] = {{"method", c.solver.method == LinearSolver::Direct ? "direct" : "gmres"},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"restart", c.solver.restart},
                 {"theta", c.solver.theta},
                 {"preconditioned", c.solver.preconditioned},
                 {"block_solver", block_solver_name(c.solver.block_solver)}};
  j["sweep_h"] = c.sweep_h;
  j["sweep_tau"] = c.sweep_tau;
  j["tau_ratio"] = c.tau_ratio;
  j["compare_unpreconditioned"] = c.compare_unpreconditioned;
  j["snapshots"] = c.snapshots;
  j["n_max"] = c.n_max;
  return j;
}

void validate_config(const ExperimentConfig& c) {
  entry(c.problem);
  if (c.N.has_value() == c.tau.has_value()) throw ConfigError("N/tau: give exactly one of N and tau");
  if (c.m.has_value() == c.h.has_value()) throw ConfigError("m/h: give exactly one of m and h");
  if (!(c.L > 0.0)) throw ConfigError("L: must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T: must be positive");
  if (!(c.eps >= 0.0)) throw ConfigError("eps: must be non-negative");
  if (c.N && *c.N < 2) throw ConfigError("N: must be at least 2");
  if (c.tau && !(*c.tau > 0.0)) throw ConfigError("tau: must be positive");
  if (c.m && *c.m < 3) throw ConfigError("m: must be at least 3");
  if (c.h && !(*c.h > 0.0)) throw ConfigError("h: must be positive");
  if (c.mode < 1) throw ConfigError("mode: must be positive");
  if (c.weideman_N < 4) throw ConfigError("weideman_N: must be at least 4");
  if (c.images && *c.images < 0) throw ConfigError("images: must be non-negative");
  if (c.hilbert == HilbertMethod::Quadrature)
    throw ConfigError("hilbert: quadrature is available as an oracle only");
  if (c.hilbert == HilbertMethod::Exact && entry(c.problem).data == Data::GaussianQuartic)
    throw ConfigError("hilbert: " + c.problem + " has no closed-form transform");
  if (c.hilbert == HilbertMethod::Weideman && entry(c.problem).data == Data::SingleMode)
    throw ConfigError("hilbert: the Weideman expansion needs decaying data, " + c.problem + " does not decay");
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
  if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter: must be positive");
  if (c.solver.restart < 0) throw ConfigError("solver.restart: must be non-negative");
  for (size_t i = 0; i < c.sweep_h.size(); ++i) {
    if (!(c.sweep_h[i] > 0.0)) throw ConfigError("sweep_h: entries must be positive");
    if (i > 0 && !(c.sweep_h[i] < c.sweep_h[i - 1])) throw ConfigError("sweep_h: must be strictly decreasing");
  }
  if (!c.sweep_tau.empty()) {
    if (c.sweep_tau.size() != c.sweep_h.size()) throw ConfigError("sweep_tau: must match sweep_h in length");
    for (size_t i = 0; i < c.sweep_tau.size(); ++i) {
      if (!(c.sweep_tau[i] > 0.0)) throw ConfigError("sweep_tau: entries must be positive");
      if (i > 0 && !(c.sweep_tau[i] < c.sweep_tau[i - 1]))
        throw ConfigError("sweep_tau: must be strictly decreasing");
    }
  }
  if (!(c.tau_ratio > 0.0)) throw ConfigError("tau_ratio: must be positive");
  if (c.snapshots < 1) throw ConfigError("snapshots: must be positive");
  if (c.n_max < 1) throw ConfigError("n_max: must be positive");
}

int time_steps(const ExperimentConfig& c) {
  if (c.N) return *c.N;
  const int N = static_cast<int>(std::lround(c.T / *c.tau));
  if (N < 2) throw ConfigError("tau: too large for T");
  return N;
}

int cells(const ExperimentConfig& c) {
  if (c.m) return *c.m;
  const double ratio = c.L / *c.h;
  const int m = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - m) > 1e-9 * ratio) throw ConfigError("h: does not divide L");
  if (m < 3) throw ConfigError("h: too large for L");
  return m;
}

namespace {

ProfilePtr make_base(const CatalogFunction& f, const ExperimentConfig& c) {
  if (c.hilbert == HilbertMethod::Weideman)
    return weideman_profile([f](const Jet& x) { return catalog_value(f, x); }, c.weideman_N, catalog_name(f.kind));
  return catalog_profile(f);
}

Field imaged(ProfilePtr base, const ExperimentConfig& c) {
  const int K = c.images ? *c.images : (base->method() == HilbertMethod::Weideman ? 32 : 200);
  return Field(odd_periodic_images(std::move(base), c.a, c.L, K));
}

Jet gaussian_quartic(const Jet& x) {
  using std::exp;
  return exp(-(x * x) * (x * x)) / (1.0 + x * x);
}

SeriesModel series_model(Model m) {
  switch (m) {
    case Model::HalfDiffusion: return SeriesModel::HalfDiffusion;
    case Model::MassTransfer: return SeriesModel::MassTransfer;
    case Model::Advection: return SeriesModel::Advection;
    case Model::Schrodinger: return SeriesModel::Schrodinger;
  }
  return SeriesModel::HalfDiffusion;
}

}  // namespace

ProblemInstance build_problem(const ExperimentConfig& c) {
  validate_config(c);
  const CatalogEntry& e = entry(c.problem);
  ProblemInstance p;
  const int m = cells(c);

  cd eps = c.eps;
  OperatorKind op;
  Grid grid;
  switch (c.model) {
    case Model::HalfDiffusion:
      grid = make_grid(c.L, m, Boundary::DirichletHomogeneous, c.a);
      break;
    case Model::MassTransfer:
      grid = make_grid(c.L, m, Boundary::DirichletHomogeneous, c.a);
      op = {OperatorVariant::Scalar, c.delta};
      break;
    case Model::Advection:
      grid = make_grid(2 * c.L, 2 * m, Boundary::Periodic, c.a);
      op = {OperatorVariant::Advection, c.delta};
      break;
    case Model::Schrodinger:
      grid = make_grid(c.L, m, Boundary::DirichletHomogeneous, c.a);
      eps = -kI * c.eps;
      op = {OperatorVariant::Scalar, -kI * c.V};
      break;
  }
  p.sys = assemble_discrete_system(grid, eps, op);
  for (int i = 0; i < grid.n(); ++i) {
    const double x = grid.nodes[static_cast<size_t>(i)];
    if (x > c.a + 1e-12 * c.L && x < c.a + c.L * (1 - 1e-12)) {
      p.window.push_back(i);
      p.window_x.push_back(x);
    }
  }

  switch (e.data) {
    case Data::Manufactured:
    case Data::Homogeneous:
      p.u0 = imaged(make_base({CatalogKind::SquaredLorentzian, 1.0, 0.0, 1.0}, c), c);
      break;
    case Data::GaussianQuartic: {
      auto shifted = [](double s) {
        return [s](const Jet& x) { return gaussian_quartic(x - s); };
      };
      p.u0 = imaged(weideman_profile(shifted(2.0), c.weideman_N, "gaussian_quartic(x-2)"), c);
      Field both = p.u0 + imaged(weideman_profile(shifted(-2.0), c.weideman_N, "gaussian_quartic(x+2)"), c);
      p.f.terms.push_back({[](double t) { return cd(-std::cos(t)); }, both});
      break;
    }
    case Data::TwoLorentzian:
      p.u0 = imaged(make_base({CatalogKind::Lorentzian, 1.0, 0.0, 2.0}, c), c) +
             cd(0.0, -5.0) * imaged(make_base({CatalogKind::Lorentzian, 1.0, 10.0, 1.0}, c), c);
      break;
    case Data::SingleMode:
      p.u0 = Field(make_base({CatalogKind::Sine, c.mode * kPi / c.L, c.a, 1.0}, c));
      break;
    case Data::Zero:
      break;
  }

  const cd eps_c = eps;
  if (e.data == Data::Manufactured) {
    TimeFunction cosine = [](double t) { return cd(std::cos(t)); };
    TimeFunction dsine = [](double t) { return cd(-std::sin(t)); };
    p.f = manufactured_source(p.u0, cosine, dsine, eps_c, op);
    p.exact = manufactured_exact(p.u0, cosine);
  } else if (e.data == Data::Zero) {
    p.exact = [](double, double) { return cd(0.0); };
  } else if (c.model == Model::Advection && c.eps == 0.0 && p.f.is_zero()) {
    p.exact = transport_exact(p.u0, c.delta);
  } else if (c.model == Model::Schrodinger && e.data == Data::TwoLorentzian) {
    p.exact = schrodinger_dalembert(p.u0, c.eps, c.V);
  } else {
    SeriesOptions so;
    so.n_max = e.data == Data::SingleMode ? std::max(c.mode, 1) : c.n_max;
    const cd delta = c.model == Model::Schrodinger ? -kI * c.V : cd(c.delta);
    Field u0 = p.u0;
    auto s = std::make_shared<FourierSeriesSolution>(series_model(c.model), eps_c, delta, c.a, c.L,
                                                     [u0](double x) { return u0(x); }, p.f, so);
    p.exact = [s](double x, double t) { return (*s)(x, t); };
  }
  return p;
}

RunResult run_solve(const ExperimentConfig& c) { return run_solve(c, build_problem(c)); }

RunResult run_solve(const ExperimentConfig& c, const ProblemInstance& p) {
  RunResult r;
  r.N = time_steps(c);
  r.m = cells(c);
  GmmMatrices gmm = build_gmm(r.N, c.T);
  r.tau = gmm.tau;
  r.h = p.sys.grid.h;
  SourceSampler sampler(p.f, p.sys);
  DoubledState s0 = doubled_initial_state(p.u0, p.sys);
  AllAtOnceSystem aao = assemble_all_at_once(gmm, p.sys, sampler, s0);
  GmresOptions opt;
  opt.tol = c.solver.tol;
  opt.max_iter = c.solver.max_iter;
  opt.restart = c.solver.restart;
  if (c.solver.method == LinearSolver::Direct) {
    r.report = direct_solve(aao);
  } else if (c.solver.preconditioned) {
    OmegaPreconditioner pre(gmm, p.sys, std::polar(1.0, c.solver.theta), c.solver.block_solver);
    r.warnings = pre.warnings();
    r.report = gmres_solve(aao, &pre, opt);
  } else {
    r.report = gmres_solve(aao, nullptr, opt);
  }
  r.trajectory = extract_trajectory(r.report.solution, aao);
  if (p.exact) {
    const Vec& uT = r.trajectory.u.back();
    Vec num(static_cast<Eigen::Index>(p.window.size()));
    for (size_t i = 0; i < p.window.size(); ++i) num[static_cast<Eigen::Index>(i)] = uT[p.window[i]];
    ErrorNorm e = relative_l2_error(num, p.exact, p.window_x, c.T);
    r.error = e.value;
    r.error_absolute = e.absolute;
  }
  return r;
}

ConvergenceResult run_convergence(const ExperimentConfig& c, int workers) {
  if (c.sweep_h.empty()) throw ConfigError("sweep_h: must be non-empty");
  validate_config(c);
  workers = std::max(1, workers);
  ConvergenceResult out;
  auto point = [&c](size_t i) {
    ExperimentConfig pc = c;
    pc.m.reset();
    pc.h = c.sweep_h[i];
    pc.N.reset();
    pc.tau = c.sweep_tau.empty() ? c.tau_ratio * c.sweep_h[i] : c.sweep_tau[i];
    ProblemInstance p = build_problem(pc);
    SweepRow row;
    pc.solver.preconditioned = true;
    RunResult pre = run_solve(pc, p);
    row.h = pre.h;
    row.tau = pre.tau;
    row.error = pre.error;
    row.iterations_pre = pre.report.iterations;
    row.converged = pre.report.converged;
    if (c.compare_unpreconditioned && c.solver.method == LinearSolver::Gmres) {
      pc.solver.preconditioned = false;
      RunResult plain = run_solve(pc, p);
      row.iterations_nopre = plain.report.iterations;
      row.converged = row.converged && plain.report.converged;
    }
    return row;
  };
  for (size_t start = 0; start < c.sweep_h.size() && !out.partial; start += static_cast<size_t>(workers)) {
    std::vector<std::future<SweepRow>> batch;
    const size_t stop = std::min(c.sweep_h.size(), start + static_cast<size_t>(workers));
    for (size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, point, i));
    for (auto& fut : batch) {
      try {
        SweepRow row = fut.get();
        if (!out.partial) out.rows.push_back(row);
      } catch (const std::exception& ex) {
        if (!out.partial) out.failure = ex.what();
        out.partial = true;
      }
    }
  }
  if (out.rows.size() >= 2) {
    std::vector<double> hs, es;
    for (const auto& r : out.rows) {
      hs.push_back(r.h);
      es.push_back(r.error);
    }
    out.slope = loglog_slope(hs, es);
  }
  return out;
}

}  // namespace halfbvm
