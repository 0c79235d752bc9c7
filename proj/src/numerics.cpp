#include "halfbvm/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>
#include <gsl/gsl_integration.h>

namespace halfbvm {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<cd> scratch(static_cast<size_t>(n));
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, plan);
  return plan;
}

fftw_plan dst1_plan_for(int n) {
  static std::map<int, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> scratch(static_cast<size_t>(n));
  fftw_plan plan =
      fftw_plan_r2r_1d(n, scratch.data(), scratch.data(), FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(n, plan);
  return plan;
}

}  // namespace

void dst1_inplace(cd* data, int n) {
  if (n <= 0) return;
  fftw_plan plan = dst1_plan_for(n);
  std::vector<double> re(static_cast<size_t>(n)), im(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    re[static_cast<size_t>(i)] = data[i].real();
    im[static_cast<size_t>(i)] = data[i].imag();
  }
  fftw_execute_r2r(plan, re.data(), re.data());
  fftw_execute_r2r(plan, im.data(), im.data());
  for (int i = 0; i < n; ++i) data[i] = cd(re[static_cast<size_t>(i)], im[static_cast<size_t>(i)]);
}

void fft_inplace(cd* data, int n, int sign) {
  if (n <= 0) return;
  fftw_plan plan = plan_for(n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

void fft_inplace(Vec& v, int sign) { fft_inplace(v.data(), static_cast<int>(v.size()), sign); }

QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule r;
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  r.nodes.resize(static_cast<size_t>(n));
  r.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &r.nodes[static_cast<size_t>(i)],
                                  &r.weights[static_cast<size_t>(i)], t);
  gsl_integration_glfixed_table_free(t);
  return r;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
  QuadratureRule unit = gauss_legendre(order, 0.0, 1.0);
  QuadratureRule r;
  r.nodes.reserve(static_cast<size_t>(panels * order));
  r.weights.reserve(static_cast<size_t>(panels * order));
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * w;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(left + w * unit.nodes[static_cast<size_t>(i)]);
      r.weights.push_back(w * unit.weights[static_cast<size_t>(i)]);
    }
  }
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw NumericalError("slope fit needs at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace halfbvm
