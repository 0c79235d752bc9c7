// Experiment driver: solve, converge, spectrum, locus, schrodinger.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "halfbvm/problems.hpp"
#include "halfbvm/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace halfbvm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  std::vector<std::string> methods;
  int n_theta = 512;
};

json load_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("out: cannot create '" + dir + "': " + ec.message());
  return p;
}

// CSV files open with the resolved config as a comment line.
std::ofstream open_csv(const fs::path& path, const json& config, const std::string& header) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(17);
  f << "# config: " << config.dump() << "\n" << header << "\n";
  return f;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setw(2) << j << "\n";
}

std::vector<size_t> snapshot_indices(size_t count, int snapshots) {
  std::vector<size_t> idx;
  const size_t last = count - 1;
  const int k = std::max(1, snapshots);
  for (int s = 0; s <= k; ++s) {
    const size_t i = static_cast<size_t>(std::llround(static_cast<double>(last) * s / k));
    if (idx.empty() || idx.back() != i) idx.push_back(i);
  }
  return idx;
}

json report_json(const RunResult& r) {
  json j;
  j["N"] = r.N;
  j["m"] = r.m;
  j["tau"] = r.tau;
  j["h"] = r.h;
  j["iterations"] = r.report.iterations;
  j["converged"] = r.report.converged;
  j["wall_time_s"] = r.report.wall_time;
  j["true_relative_residual"] = r.report.true_relative_residual;
  j["residual_history"] = r.report.residual_history;
  if (r.error >= 0.0) {
    j["relative_l2_error"] = r.error;
    j["error_is_absolute"] = r.error_absolute;
  } else {
    j["relative_l2_error"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

void write_trajectory(const fs::path& path, const json& config, const ProblemInstance& p, const RunResult& r,
                      int snapshots) {
  std::ofstream f = open_csv(path, config, "t,x,u_re,u_im,v_re,v_im,exact_re,exact_im");
  for (size_t s : snapshot_indices(r.trajectory.t.size(), snapshots)) {
    const double t = r.trajectory.t[s];
    const Vec& u = r.trajectory.u[s];
    const Vec& v = r.trajectory.v[s];
    for (size_t k = 0; k < p.window.size(); ++k) {
      const int i = p.window[k];
      const double x = p.window_x[k];
      f << t << ',' << x << ',' << u[i].real() << ',' << u[i].imag() << ',' << v[i].real() << ',' << v[i].imag();
      if (p.exact) {
        const cd e = p.exact(x, t);
        f << ',' << e.real() << ',' << e.imag();
      } else {
        f << ",,";
      }
      f << "\n";
    }
  }
}

int run_solve_command(const Options& o, const json& overrides) {
  ExperimentConfig c = config_from_json(overrides);
  const json resolved = config_to_json(c);
  fs::path out = prepare_out(o.out_dir);
  ProblemInstance p = build_problem(c);
  RunResult r = run_solve(c, p);
  write_trajectory(out / "trajectory.csv", resolved, p, r, c.snapshots);
  json report = report_json(r);
  report["config"] = resolved;
  write_json(out / "report.json", report);
  write_json(out / "manifest.json",
             {{"command", "solve"}, {"config", resolved}, {"files", {"trajectory.csv", "report.json"}}});
  std::cout << "iterations=" << r.report.iterations << " converged=" << r.report.converged
            << " error=" << r.error << " wall_time=" << r.report.wall_time << "s\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return r.report.converged ? kExitOk : kExitNoConvergence;
}

int run_converge_command(const Options& o, const json& overrides) {
  ExperimentConfig c = config_from_json(overrides);
  if (c.sweep_h.empty()) throw ConfigError("sweep_h: must be non-empty");
  const json resolved = config_to_json(c);
  fs::path out = prepare_out(o.out_dir);
  ConvergenceResult r = run_convergence(c, o.workers);
  {
    std::ofstream f =
        open_csv(out / "convergence.csv", resolved, "h,tau,rel_l2_error,iterations_pre,iterations_nopre,converged");
    for (const SweepRow& row : r.rows)
      f << row.h << ',' << row.tau << ',' << row.error << ',' << row.iterations_pre << ',' << row.iterations_nopre
        << ',' << (row.converged ? 1 : 0) << "\n";
    if (r.slope) f << "# loglog_slope," << *r.slope << "\n";
    if (r.partial) f << "# partial," << r.failure << "\n";
  }
  json manifest = {{"command", "converge"}, {"config", resolved}, {"files", {"convergence.csv"}}, {"partial", r.partial}};
  manifest["slope"] = r.slope ? json(*r.slope) : json(nullptr);
  if (r.partial) manifest["failure"] = r.failure;
  write_json(out / "manifest.json", manifest);
  for (const SweepRow& row : r.rows)
    std::cout << "h=" << row.h << " tau=" << row.tau << " error=" << row.error << " it_pre=" << row.iterations_pre
              << " it_nopre=" << row.iterations_nopre << "\n";
  if (r.slope) std::cout << "slope=" << *r.slope << "\n";
  if (r.partial) {
    std::cerr << "sweep aborted: " << r.failure << "\n";
    return kExitFailure;
  }
  const bool all = std::all_of(r.rows.begin(), r.rows.end(), [](const SweepRow& x) { return x.converged; });
  return all ? kExitOk : kExitNoConvergence;
}

int run_spectrum_command(const Options& o, const json& overrides) {
  ExperimentConfig c = config_from_json(overrides);
  const json resolved = config_to_json(c);
  fs::path out = prepare_out(o.out_dir);
  ProblemInstance p = build_problem(c);
  const double tau = c.T / time_steps(c);
  std::vector<cd> lam = eigenvalues_of_D(p.sys);
  StabilityVerdict v = gmm_stability_verdict(p.sys, tau);
  {
    std::ofstream f = open_csv(out / "spectrum.csv", resolved, "re,im,label");
    const std::string label = model_name(c.model);
    for (const cd& z : lam) f << z.real() << ',' << z.imag() << ',' << label << "\n";
    for (const cd& q : v.offending_eigenvalues) f << q.real() / tau << ',' << q.imag() / tau << ",offending\n";
  }
  json manifest = {{"command", "spectrum"},
                   {"config", resolved},
                   {"files", {"spectrum.csv"}},
                   {"tau", tau},
                   {"gmm_stable", v.stable},
                   {"offending_count", v.offending_eigenvalues.size()}};
  write_json(out / "manifest.json", manifest);
  std::cout << "eigenvalues=" << lam.size() << " gmm_stable=" << v.stable
            << " offending=" << v.offending_eigenvalues.size() << "\n";
  return kExitOk;
}

int run_locus_command(const Options& o) {
  fs::path out = prepare_out(o.out_dir);
  std::vector<std::string> methods = o.methods;
  if (methods.empty()) {
    for (const auto& mp : lmm_catalog()) methods.push_back(mp.name);
    for (const char* rk : {"rk2", "rk4", "radau_iia3"}) methods.emplace_back(rk);
  }
  json resolved = {{"methods", methods}, {"n_theta", o.n_theta}};
  std::ofstream f = open_csv(out / "locus.csv", resolved, "re,im,label");
  json skipped = json::object();
  for (const std::string& name : methods) {
    std::vector<cd> pts;
    if (name == "rk2" || name == "rk4" || name == "radau_iia3") {
      auto R = name == "rk2" ? rk2_stability : name == "rk4" ? rk4_stability : radau_iia3_stability;
      pts = one_step_boundary_locus(R, o.n_theta, 12.0);
    } else {
      auto cat = lmm_catalog();
      auto it = std::find_if(cat.begin(), cat.end(), [&](const MethodPolynomials& m) { return m.name == name; });
      if (it == cat.end()) throw ConfigError("methods: unknown method '" + name + "'");
      LocusResult r = boundary_locus(*it, o.n_theta);
      pts = r.samples;
      skipped[name] = r.poles_skipped;
    }
    for (const cd& z : pts) f << z.real() << ',' << z.imag() << ',' << name << "\n";
  }
  write_json(out / "manifest.json",
             {{"command", "locus"}, {"config", resolved}, {"files", {"locus.csv"}}, {"poles_skipped", skipped}});
  std::cout << "methods=" << methods.size() << "\n";
  return kExitOk;
}

int run_schrodinger_command(const Options& o, json overrides) {
  if (!overrides.contains("problem")) overrides["problem"] = "sec6_schrodinger";
  ExperimentConfig c = config_from_json(overrides);
  if (c.model != Model::Schrodinger) throw ConfigError("model: the schrodinger command needs the schrodinger model");
  return run_solve_command(o, config_to_json(c));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-Laplacian evolution solver: all-at-once boundary value methods with omega-circulant GMRES"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", o.config_path, "JSON experiment config");
    if (needs_config) opt->required();
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--workers", o.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
  };
  CLI::App* solve = app.add_subcommand("solve", "solve one configuration");
  CLI::App* converge = app.add_subcommand("converge", "convergence sweep over h (and tau)");
  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of D and the GMM stability verdict");
  CLI::App* locus = app.add_subcommand("locus", "boundary loci of classical methods and the GMM");
  CLI::App* schrod = app.add_subcommand("schrodinger", "solve the Schrodinger-type example");
  add_common(solve, true);
  add_common(converge, true);
  add_common(spectrum, true);
  add_common(schrod, false);
  locus->add_option("--out", o.out_dir, "output directory");
  locus->add_option("--methods", o.methods, "method names (default: all)")->delimiter(',');
  locus->add_option("--n-theta", o.n_theta, "samples on the unit circle")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*locus) return run_locus_command(o);
    json overrides = load_config_json(o.config_path);
    if (*solve) return run_solve_command(o, overrides);
    if (*converge) return run_converge_command(o, overrides);
    if (*spectrum) return run_spectrum_command(o, overrides);
    if (*schrod) return run_schrodinger_command(o, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedFunction& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
