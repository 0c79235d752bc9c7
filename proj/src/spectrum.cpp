#include "halfbvm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "halfbvm/numerics.hpp"

namespace halfbvm {

MethodPolynomials gmm_polynomials() { return {"gmm", {-0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}, 1, 1}; }
MethodPolynomials explicit_euler_polynomials() { return {"explicit_euler", {-1.0, 1.0}, {1.0, 0.0}, 1, 0}; }
MethodPolynomials implicit_euler_polynomials() { return {"implicit_euler", {-1.0, 1.0}, {0.0, 1.0}, 1, 0}; }
MethodPolynomials trapezoidal_polynomials() { return {"trapezoidal", {-1.0, 1.0}, {0.5, 0.5}, 1, 0}; }
MethodPolynomials bdf2_polynomials() { return {"bdf2", {0.5, -2.0, 1.5}, {0.0, 0.0, 1.0}, 2, 0}; }
MethodPolynomials bdf4_polynomials() {
  return {"bdf4", {0.25, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0}, {0.0, 0.0, 0.0, 0.0, 1.0}, 4, 0};
}

std::vector<MethodPolynomials> lmm_catalog() {
  return {gmm_polynomials(), explicit_euler_polynomials(), implicit_euler_polynomials(),
          trapezoidal_polynomials(), bdf2_polynomials(), bdf4_polynomials()};
}

cd poly_eval(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cd poly_derivative_eval(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (size_t j = c.size(); j-- > 1;) acc = acc * z + double(j) * c[j];
  return acc;
}

std::vector<cd> poly_roots(const std::vector<cd>& c) {
  const int full = static_cast<int>(c.size()) - 1;
  double scale = 0.0;
  for (const cd& a : c) scale = std::max(scale, std::abs(a));
  int deg = full;
  while (deg > 0 && std::abs(c[static_cast<size_t>(deg)]) <= 1e-14 * scale) --deg;
  std::vector<cd> roots;
  if (deg >= 1) {
    Mat comp = Mat::Zero(deg, deg);
    const cd lead = c[static_cast<size_t>(deg)];
    for (int i = 0; i < deg; ++i) comp(0, i) = -c[static_cast<size_t>(deg - 1 - i)] / lead;
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Mat> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("companion eigensolve failed");
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = deg; i < full; ++i) roots.emplace_back(inf, 0.0);
  return roots;
}

bool is_consistent(const MethodPolynomials& mp, double tol) {
  return std::abs(poly_eval(mp.rho, 1.0)) <= tol &&
         std::abs(poly_derivative_eval(mp.rho, 1.0) - poly_eval(mp.sigma, 1.0)) <= tol;
}

std::string stability_class_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::S: return "S";
    case StabilityClass::N: return "N";
    case StabilityClass::Unstable: return "unstable";
  }
  return "unknown";
}

StabilityClass classify_stability(const MethodPolynomials& mp, cd q) {
  if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) throw NumericalError("q must be finite");
  const size_t len = std::max(mp.rho.size(), mp.sigma.size());
  std::vector<cd> pi(len, 0.0);
  for (size_t j = 0; j < mp.rho.size(); ++j) pi[j] += mp.rho[j];
  for (size_t j = 0; j < mp.sigma.size(); ++j) pi[j] -= q * mp.sigma[j];
  std::vector<cd> roots = poly_roots(pi);
  for (const cd& z : roots)
    if (std::isnan(z.real()) || std::isnan(z.imag())) throw NumericalError("root finding produced NaN");
  std::vector<double> mod;
  for (const cd& z : roots) mod.push_back(std::abs(z));
  std::sort(mod.begin(), mod.end());
  const int k1 = mp.k1;
  const int k = static_cast<int>(mod.size());
  if (k != mp.k1 + mp.k2) throw NumericalError("polynomial degree does not match k1 + k2");

  auto inside = [](double r) { return r < 1.0 - kUnitCircleTol; };
  auto outside = [](double r) { return r > 1.0 + kUnitCircleTol; };
  const bool upper_ok = (k1 == k) || outside(mod[static_cast<size_t>(k1)]);
  if (upper_ok && (k1 == 0 || inside(mod[static_cast<size_t>(k1 - 1)]))) return StabilityClass::S;

  // N: the first k1 roots lie in the closed disk, the rest outside the open disk,
  // and unit-modulus roots are simple.
  if (k1 > 0 && outside(mod[static_cast<size_t>(k1 - 1)])) return StabilityClass::Unstable;
  if (k1 < k && inside(mod[static_cast<size_t>(k1)])) return StabilityClass::Unstable;
  std::vector<cd> unit;
  for (const cd& z : roots) {
    const double r = std::abs(z);
    if (r > 1.0 + kUnitCircleTol) continue;
    if (!inside(r)) unit.push_back(z);
  }
  for (size_t a = 0; a < unit.size(); ++a)
    for (size_t b = a + 1; b < unit.size(); ++b)
      if (std::abs(unit[a] - unit[b]) <= 1e-7) return StabilityClass::Unstable;
  return StabilityClass::N;
}

LocusResult boundary_locus(const MethodPolynomials& mp, int n_theta) {
  LocusResult r;
  for (int j = 0; j < n_theta; ++j) {
    const cd z = std::polar(1.0, 2.0 * kPi * j / n_theta);
    const cd s = poly_eval(mp.sigma, z);
    if (std::abs(s) < 1e-14) {
      ++r.poles_skipped;
      continue;
    }
    r.samples.push_back(poly_eval(mp.rho, z) / s);
  }
  if (r.samples.empty()) throw NumericalError("degenerate method: sigma vanishes at every sample");
  return r;
}

std::vector<cd> one_step_boundary_locus(const std::function<cd(cd)>& R, int n_rays, double r_max) {
  std::vector<cd> pts;
  const int n_r = 4000;
  for (int a = 0; a < n_rays; ++a) {
    const cd dir = std::polar(1.0, 2.0 * kPi * a / n_rays);
    auto g = [&](double r) { return std::abs(R(r * dir)) - 1.0; };
    double r_prev = r_max / n_r;
    double g_prev = g(r_prev);
    for (int i = 2; i <= n_r; ++i) {
      const double r = r_max * i / n_r;
      const double gv = g(r);
      if ((g_prev < 0) != (gv < 0)) {
        double lo = r_prev, hi = r;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((g(lo) < 0) == (g(mid) < 0)) lo = mid;
          else hi = mid;
        }
        pts.push_back(0.5 * (lo + hi) * dir);
      }
      r_prev = r;
      g_prev = gv;
    }
  }
  return pts;
}

cd rk2_stability(cd z) { return 1.0 + z + 0.5 * z * z; }
cd rk4_stability(cd z) { return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0; }
cd radau_iia3_stability(cd z) {
  return (1.0 + 0.4 * z + z * z / 20.0) / (1.0 - 0.6 * z + 0.15 * z * z - z * z * z / 60.0);
}

bool matrices_commute(const SpMat& P, const SpMat& Q, double rel_tol) {
  SpMat C = SpMat(P * Q) - SpMat(Q * P);
  const double scale = P.norm() * Q.norm();
  return C.norm() <= rel_tol * std::max(scale, std::numeric_limits<double>::min());
}

namespace {

bool is_scalar_identity(const SpMat& Q, cd& q) {
  Vec d = Q.diagonal();
  q = d.size() > 0 ? d[0] : cd(0.0);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] != q) return false;
  for (int k = 0; k < Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(Q, k); it; ++it)
      if (it.row() != it.col() && it.value() != cd(0.0)) return false;
  return true;
}

Vec first_column_symbols(const SpMat& C) {
  const int n = static_cast<int>(C.rows());
  Vec c = Vec::Zero(n);
  for (SpMat::InnerIterator it(C, 0); it; ++it) c[it.row()] = it.value();
  fft_inplace(c, -1);
  return c;
}

// scale bounds |lQ^2| + 4|lP| over the spectrum; discriminants at round-off level
// (the advection zero mode) are treated as the exact double root.
void push_pair(std::vector<cd>& out, cd lP, cd lQ, double scale) {
  cd disc = lQ * lQ + 4.0 * lP;
  if (std::abs(disc) <= 1e-14 * scale) disc = 0.0;
  const cd root = std::sqrt(disc);
  out.push_back(0.5 * (lQ + root));
  out.push_back(0.5 * (lQ - root));
}

}  // namespace

std::vector<cd> eigenvalues_dense(const DiscreteSystem& sys) {
  Eigen::ComplexEigenSolver<Mat> es(dense(sys.D), false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve of D failed");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

std::vector<cd> eigenvalues_of_D(const DiscreteSystem& sys) {
  if (!matrices_commute(sys.P, sys.Q)) return eigenvalues_dense(sys);
  std::vector<cd> out;
  const int n = sys.n();
  if (sys.grid.boundary == Boundary::Periodic) {
    Vec sP = first_column_symbols(sys.P);
    Vec sQ = first_column_symbols(sys.Q);
    double scale = 0.0;
    for (int k = 0; k < n; ++k) scale = std::max(scale, std::norm(sQ[k]) + 4.0 * std::abs(sP[k]));
    for (int k = 0; k < n; ++k) push_pair(out, sP[k], sQ[k], scale);
    return out;
  }
  cd q;
  if (is_scalar_identity(sys.Q, q)) {
    Eigen::ComplexEigenSolver<Mat> es(dense(sys.P), false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolve of P failed");
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::norm(q) + 4.0 * std::abs(es.eigenvalues()[i]));
    for (int i = 0; i < n; ++i) push_pair(out, es.eigenvalues()[i], q, scale);
    return out;
  }
  return eigenvalues_dense(sys);
}

double spectrum_mismatch(const std::vector<cd>& a, const std::vector<cd>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cd& x : a) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    used[bi] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

bool on_gmm_segment(cd q, double tol) {
  return std::abs(q.real()) <= tol && std::abs(q.imag()) <= 1.0 + tol;
}

StabilityVerdict gmm_stability_verdict(const DiscreteSystem& sys, double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  StabilityVerdict v;
  for (const cd& lam : eigenvalues_of_D(sys)) {
    const cd q = tau * lam;
    if (on_gmm_segment(q)) v.offending_eigenvalues.push_back(q);
  }
  v.stable = v.offending_eigenvalues.empty();
  v.locus_samples = boundary_locus(gmm_polynomials(), 256).samples;
  return v;
}

}  // namespace halfbvm
