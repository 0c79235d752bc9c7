#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfbvm/krylov.hpp"
#include "halfbvm/oracles.hpp"

namespace halfbvm {

enum class Model { HalfDiffusion, MassTransfer, Advection, Schrodinger };

std::string model_name(Model m);
Model model_from_name(const std::string& s);

// Named initial data, source and reference solution. Each entry also
// carries default parameters that a config may override.
std::vector<std::string> problem_catalog();

// Gmres: preconditioned GMRES. Direct: exact per-mode solve, see direct_solve.
enum class LinearSolver { Gmres, Direct };

struct SolverSettings {
  LinearSolver method = LinearSolver::Gmres;
  double tol = 1e-10;
  int max_iter = 500;
  int restart = 0;
  double theta = kPi;  // omega = e^{i theta}
  bool preconditioned = true;
  BlockSolver block_solver = BlockSolver::Auto;
};

struct ExperimentConfig {
  std::string problem = "sec5_1_manufactured";
  Model model = Model::HalfDiffusion;
  double a = -10.0;  // left end of the physical window
  double L = 20.0;
  double T = 20.0;
  double eps = 0.1;  // gamma for the Schrodinger model
  double delta = 0.0;
  double V = 0.0;
  std::optional<int> N;
  std::optional<double> tau;
  std::optional<int> m;
  std::optional<double> h;
  int mode = 1;  // single_mode only
  HilbertMethod hilbert = HilbertMethod::Exact;
  int weideman_N = 256;
  std::optional<int> images;  // image pairs per side
  SolverSettings solver;
  std::vector<double> sweep_h;
  std::vector<double> sweep_tau;  // empty: tau = tau_ratio * h
  double tau_ratio = 0.5;
  bool compare_unpreconditioned = true;
  int snapshots = 5;
  int n_max = 400;
};

// Catalog defaults for `problem`, then every key present in j.
// Throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
void validate_config(const ExperimentConfig& c);

int time_steps(const ExperimentConfig& c);
int cells(const ExperimentConfig& c);

struct ProblemInstance {
  DiscreteSystem sys;
  Field u0;
  SourceSpec f;
  SpaceTimeFunction exact;  // empty when no reference exists
  std::vector<int> window;  // node indices inside the physical window
  std::vector<double> window_x;
};

ProblemInstance build_problem(const ExperimentConfig& c);

struct RunResult {
  Trajectory trajectory;
  SolveReport report;
  std::vector<std::string> warnings;
  double error = -1.0;  // relative l2 error at T on the window, -1 without a reference
  bool error_absolute = false;
  int N = 0;
  int m = 0;
  double tau = 0.0;
  double h = 0.0;
};

RunResult run_solve(const ExperimentConfig& c);
RunResult run_solve(const ExperimentConfig& c, const ProblemInstance& p);

struct SweepRow {
  double h = 0.0;
  double tau = 0.0;
  double error = 0.0;
  int iterations_pre = 0;
  int iterations_nopre = -1;  // -1 when not run
  bool converged = true;
};

struct ConvergenceResult {
  std::vector<SweepRow> rows;
  std::optional<double> slope;  // log-log fit of error against h
  bool partial = false;
  std::string failure;
};

// Sweep points run on up to `workers` threads.
ConvergenceResult run_convergence(const ExperimentConfig& c, int workers = 1);

}  // namespace halfbvm
