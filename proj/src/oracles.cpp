#include "halfbvm/oracles.hpp"

#include <cmath>

#include "halfbvm/numerics.hpp"

namespace halfbvm {

std::vector<cd> sine_coefficients(const ComplexFunction& g, double a, double L, int n_max, int panels) {
  if (n_max < 1) throw ConfigError("n_max must be positive");
  if (!(L > 0.0)) throw ConfigError("window length must be positive");
  QuadratureRule q = composite_gauss_legendre(a, a + L, panels, 8);
  std::vector<cd> gv(q.nodes.size());
  for (size_t i = 0; i < q.nodes.size(); ++i) gv[i] = q.weights[i] * g(q.nodes[i]);
  std::vector<cd> c(static_cast<size_t>(n_max));
#pragma omp parallel for schedule(static)
  for (int n = 1; n <= n_max; ++n) {
    const double k = n * kPi / L;
    cd acc = 0.0;
    for (size_t i = 0; i < gv.size(); ++i) acc += gv[i] * std::sin(k * (q.nodes[i] - a));
    c[static_cast<size_t>(n - 1)] = (2.0 / L) * acc;
  }
  return c;
}

FourierSeriesSolution::FourierSeriesSolution(SeriesModel model, cd eps, cd delta, double a, double L,
                                             const ComplexFunction& u0, const SourceSpec& f,
                                             const SeriesOptions& opt)
    : model_(model), eps_(eps), delta_(delta), a_(a), L_(L), opt_(opt) {
  if (model_ == SeriesModel::HalfDiffusion) delta_ = 0.0;
  u0n_ = sine_coefficients(u0, a, L, opt_.n_max, opt_.coeff_panels);
  for (const auto& term : f.terms) {
    ftime_.push_back(term.time);
    const Field& space = term.space;
    fn_.push_back(sine_coefficients([&space](double x) { return space(x); }, a, L, opt_.n_max, opt_.coeff_panels));
  }
}

cd FourierSeriesSolution::symbol(double k) const {
  const cd damp = -eps_ * std::abs(k);
  switch (model_) {
    case SeriesModel::HalfDiffusion: return damp;
    case SeriesModel::MassTransfer:
    case SeriesModel::Schrodinger: return damp + delta_;
    case SeriesModel::Advection: return damp + kI * delta_ * k;
  }
  return damp;
}

void FourierSeriesSolution::mode_amplitudes(double t, std::vector<cd>& plus, std::vector<cd>& minus) const {
  const int n_max = opt_.n_max;
  plus.assign(static_cast<size_t>(n_max), 0.0);
  minus.assign(static_cast<size_t>(n_max), 0.0);
  QuadratureRule q;
  std::vector<std::vector<cd>> cvals;
  if (!ftime_.empty() && t > 0.0) {
    const int panels = std::max(1, static_cast<int>(std::ceil(t * opt_.time_points_per_unit / 8.0)));
    q = composite_gauss_legendre(0.0, t, panels, 8);
    for (const auto& c : ftime_) {
      std::vector<cd> v(q.nodes.size());
      for (size_t i = 0; i < v.size(); ++i) v[i] = q.weights[i] * c(q.nodes[i]);
      cvals.push_back(std::move(v));
    }
  }
#pragma omp parallel for schedule(static)
  for (int n = 1; n <= n_max; ++n) {
    const double k = n * kPi / L_;
    const size_t idx = static_cast<size_t>(n - 1);
    const cd sp = symbol(k), sm = symbol(-k);
    cd p = std::exp(sp * t) * u0n_[idx];
    cd m = std::exp(sm * t) * u0n_[idx];
    for (size_t term = 0; term < cvals.size(); ++term) {
      cd ip = 0.0, im = 0.0;
      for (size_t i = 0; i < q.nodes.size(); ++i) {
        const double lag = t - q.nodes[i];
        ip += std::exp(sp * lag) * cvals[term][i];
        im += std::exp(sm * lag) * cvals[term][i];
      }
      p += ip * fn_[term][idx];
      m += im * fn_[term][idx];
    }
    plus[idx] = p;
    minus[idx] = m;
  }
}

cd FourierSeriesSolution::combine(double x, double, const std::vector<cd>& plus, const std::vector<cd>& minus) const {
  cd acc = 0.0;
  for (int n = opt_.n_max; n >= 1; --n) {
    const double th = n * kPi / L_ * (x - a_);
    const cd e = std::polar(1.0, th);
    const size_t idx = static_cast<size_t>(n - 1);
    acc += (plus[idx] * e - minus[idx] * std::conj(e)) / (2.0 * kI);
  }
  return acc;
}

void FourierSeriesSolution::cached_amplitudes(double t, std::vector<cd>& plus, std::vector<cd>& minus) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (t == cache_t_) {
      plus = cache_plus_;
      minus = cache_minus_;
      return;
    }
  }
  mode_amplitudes(t, plus, minus);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cache_t_ = t;
  cache_plus_ = plus;
  cache_minus_ = minus;
}

cd FourierSeriesSolution::operator()(double x, double t) const {
  std::vector<cd> plus, minus;
  cached_amplitudes(t, plus, minus);
  return combine(x, t, plus, minus);
}

Vec FourierSeriesSolution::evaluate(const std::vector<double>& xs, double t) const {
  std::vector<cd> plus, minus;
  mode_amplitudes(t, plus, minus);
  Vec out(static_cast<Eigen::Index>(xs.size()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = combine(xs[static_cast<size_t>(i)], t, plus, minus);
  return out;
}

cd FourierSeriesSolution::kernel(double x, double xi, double t) const {
  cd acc = 0.0;
  for (int n = opt_.n_max; n >= 1; --n) {
    const double k = n * kPi / L_;
    const cd e = std::polar(1.0, k * (x - a_));
    const cd wave = (std::exp(symbol(k) * t) * e - std::exp(symbol(-k) * t) * std::conj(e)) / (2.0 * kI);
    acc += (2.0 / L_) * std::sin(k * (xi - a_)) * wave;
  }
  return acc;
}

SpaceTimeFunction half_diffusion_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double a, double L,
                                       const SeriesOptions& opt) {
  auto s = std::make_shared<FourierSeriesSolution>(SeriesModel::HalfDiffusion, eps, 0.0, a, L, u0, f, opt);
  return [s](double x, double t) { return (*s)(x, t); };
}

SpaceTimeFunction mass_transfer_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double delta,
                                      double a, double L, const SeriesOptions& opt) {
  auto s = std::make_shared<FourierSeriesSolution>(SeriesModel::MassTransfer, eps, delta, a, L, u0, f, opt);
  return [s](double x, double t) { return (*s)(x, t); };
}

SpaceTimeFunction advection_exact(const ComplexFunction& u0, const SourceSpec& f, double eps, double delta, double a,
                                  double L, const SeriesOptions& opt) {
  auto s = std::make_shared<FourierSeriesSolution>(SeriesModel::Advection, eps, delta, a, L, u0, f, opt);
  return [s](double x, double t) { return (*s)(x, t); };
}

SpaceTimeFunction manufactured_exact(const Field& g, TimeFunction c) {
  return [g, c = std::move(c)](double x, double t) { return c(t) * g(x); };
}

SpaceTimeFunction transport_exact(const Field& u0, double delta) {
  return [u0, delta](double x, double t) { return u0(x + delta * t); };
}

SpaceTimeFunction schrodinger_dalembert(const Field& u0, double gamma, double V) {
  Field hu0 = u0.hilbert();
  return [u0, hu0, gamma, V](double x, double t) {
    const double xp = x + gamma * t, xm = x - gamma * t;
    const cd phase = std::polar(0.5, -V * t);
    return phase * (u0(xp) + u0(xm) + kI * (hu0(xp) - hu0(xm)));
  };
}

SpaceTimeFunction schrodinger_series(const ComplexFunction& u0, double gamma, double V, double a, double L,
                                     const SeriesOptions& opt) {
  auto s = std::make_shared<FourierSeriesSolution>(SeriesModel::Schrodinger, -kI * gamma, -kI * V, a, L, u0,
                                                   SourceSpec{}, opt);
  return [s](double x, double t) { return (*s)(x, t); };
}

ErrorNorm relative_l2_error(const Vec& numeric, const Vec& exact) {
  if (numeric.size() != exact.size()) throw DimensionMismatch("error vectors differ in size");
  ErrorNorm e;
  const double diff = (numeric - exact).norm();
  const double ref = exact.norm();
  if (ref == 0.0) {
    e.value = diff;
    e.absolute = true;
  } else {
    e.value = diff / ref;
  }
  return e;
}

ErrorNorm relative_l2_error(const Vec& numeric, const SpaceTimeFunction& exact, const std::vector<double>& xs,
                            double t) {
  Vec ex(static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) ex[static_cast<Eigen::Index>(i)] = exact(xs[i], t);
  return relative_l2_error(numeric, ex);
}

}  // namespace halfbvm
