#pragma once

#include <functional>
#include <limits>
#include <mutex>
#include <vector>

#include "halfbvm/doubling.hpp"

namespace halfbvm {

using ComplexFunction = std::function<cd(double)>;

enum class SeriesModel { HalfDiffusion, MassTransfer, Advection, Schrodinger };

struct SeriesOptions {
  int n_max = 400;
  int coeff_panels = 512;  // x 8 Gauss points = 4096 nodes on the window
  int time_points_per_unit = 256;
};

// Solution of u_t = -eps (-Delta)^(1/2) u + L u + f on the window (a, a + L)
// for data extended oddly and 2L-periodically. With phi_n = sin(k_n (x - a)),
// k_n = n pi / L, and the mode symbol s(k) = -eps |k| + l(k),
//   u = sum_n [c_n(t) e^{ik(x-a)} - c_{-n}(t) e^{-ik(x-a)}] / (2i),
//   c_{+-n}(t) = e^{s(+-k) t} u0_n + int_0^t e^{s(+-k)(t-s)} f_n(s) ds,
// where u0_n, f_n are the sine coefficients on the window. l = 0, delta,
// i delta k or -iV; the Schrodinger case uses eps = -i gamma.
class FourierSeriesSolution {
 public:
  FourierSeriesSolution(SeriesModel model, cd eps, cd delta, double a, double L, const ComplexFunction& u0,
                        const SourceSpec& f = {}, const SeriesOptions& opt = {});

  cd operator()(double x, double t) const;
  Vec evaluate(const std::vector<double>& xs, double t) const;

  // Green function: response at x, time t to a unit impulse of u0 at xi.
  cd kernel(double x, double xi, double t) const;

  cd symbol(double k) const;
  const std::vector<cd>& initial_coefficients() const { return u0n_; }
  int n_max() const { return opt_.n_max; }

 private:
  // Sum over modes of the two travelling components at time t.
  cd combine(double x, double t, const std::vector<cd>& plus, const std::vector<cd>& minus) const;
  void mode_amplitudes(double t, std::vector<cd>& plus, std::vector<cd>& minus) const;
  // Pointwise calls at a repeated t reuse the last amplitudes.
  void cached_amplitudes(double t, std::vector<cd>& plus, std::vector<cd>& minus) const;

  SeriesModel model_;
  cd eps_, delta_;
  double a_, L_;
  SeriesOptions opt_;
  std::vector<cd> u0n_;
  std::vector<TimeFunction> ftime_;
  std::vector<std::vector<cd>> fn_;  // sine coefficients per source term
  mutable std::mutex cache_mutex_;
  mutable double cache_t_ = std::numeric_limits<double>::quiet_NaN();
  mutable std::vector<cd> cache_plus_, cache_minus_;
};

// Sine coefficients (2/L) int_a^{a+L} g(x) sin(n pi (x - a) / L) dx, n = 1..n_max.
std::vector<cd> sine_coefficients(const ComplexFunction& g, double a, double L, int n_max, int panels = 512);

using SpaceTimeFunction = std::function<cd(double, double)>;

SpaceTimeFunction half_diffusion_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double a, double L,
                                       const SeriesOptions& opt = {});
SpaceTimeFunction mass_transfer_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double delta,
                                      double a, double L, const SeriesOptions& opt = {});
SpaceTimeFunction advection_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double delta, double a,
                                  double L, const SeriesOptions& opt = {});

// u = c(t) g(x), the exact solution of a manufactured problem.
SpaceTimeFunction manufactured_exact(const Field& g, TimeFunction c);

// The eps = 0 limit of the advection model: u0(x + delta t).
SpaceTimeFunction transport_exact(const Field& u0, double delta);

// u = (e^{-iVt}/2)[u0(x+gt) + u0(x-gt) + i Hu0(x+gt) - i Hu0(x-gt)] for the
// problem i u_t = -gamma H(u_x) + V u.
SpaceTimeFunction schrodinger_dalembert(const Field& u0, double gamma, double V);

// The same solution as a sine series on (a, a + L).
SpaceTimeFunction schrodinger_series(const ComplexFunction& u0, double gamma, double V, double a, double L,
                                     const SeriesOptions& opt = {});

struct ErrorNorm {
  double value = 0.0;
  bool absolute = false;  // exact norm vanished; value is ||numeric - exact||_2
};

ErrorNorm relative_l2_error(const Vec& numeric, const Vec& exact);
ErrorNorm relative_l2_error(const Vec& numeric, const SpaceTimeFunction& exact, const std::vector<double>& xs,
                            double t);

}  // namespace halfbvm
