#include "halfbvm/hilbert.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <gsl/gsl_sf_dawson.h>

#include "halfbvm/numerics.hpp"

namespace halfbvm {

namespace {

double dawson_value(double x) { return gsl_sf_dawson(x); }
Jet dawson_value(const Jet& x) { return dawson(x); }

template <class T>
T base_value(const CatalogFunction& f, const T& y) {
  using std::cos;
  using std::exp;
  using std::sin;
  switch (f.kind) {
    case CatalogKind::Lorentzian:
      return 1.0 / (1.0 + y * y);
    case CatalogKind::Quartic:
      return 1.0 / (1.0 + y * y * y * y);
    case CatalogKind::SquaredLorentzian: {
      T d = 1.0 + y * y;
      return 1.0 / (d * d);
    }
    case CatalogKind::Gaussian:
      return exp(-f.alpha * y * y);
    case CatalogKind::Cosine:
      return cos(f.alpha * y);
    case CatalogKind::Sine:
      return sin(f.alpha * y);
    case CatalogKind::OddLorentzian:
      return y / (y * y + f.alpha * f.alpha);
  }
  throw UnsupportedFunction("unknown catalog kind");
}

template <class T>
T base_hilbert(const CatalogFunction& f, const T& y) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  switch (f.kind) {
    case CatalogKind::Lorentzian:
      return y / (1.0 + y * y);
    case CatalogKind::Quartic:
      return y * (y * y + 1.0) / (std::sqrt(2.0) * (y * y * y * y + 1.0));
    case CatalogKind::SquaredLorentzian: {
      T d = 1.0 + y * y;
      return y * (y * y + 3.0) / (2.0 * d * d);
    }
    case CatalogKind::Gaussian:
      return (2.0 / std::sqrt(kPi)) * dawson_value(std::sqrt(f.alpha) * y);
    case CatalogKind::Cosine:
      return sin(f.alpha * y);
    case CatalogKind::Sine:
      return -cos(f.alpha * y);
    case CatalogKind::OddLorentzian:
      return -f.alpha / (y * y + f.alpha * f.alpha);
  }
  throw UnsupportedFunction("unknown catalog kind");
}

// -i sgn(n) with sgn(0) = +1 for the kernel 1/(pi (x - y)).
cd eigen_factor(int n) { return n >= 0 ? -kI : kI; }

}  // namespace

std::string catalog_name(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::Lorentzian: return "lorentzian";
    case CatalogKind::Quartic: return "quartic";
    case CatalogKind::SquaredLorentzian: return "squared_lorentzian";
    case CatalogKind::Gaussian: return "gaussian";
    case CatalogKind::Cosine: return "cosine";
    case CatalogKind::Sine: return "sine";
    case CatalogKind::OddLorentzian: return "odd_lorentzian";
  }
  return "unknown";
}

CatalogKind catalog_kind_from_name(const std::string& name) {
  for (CatalogKind k : all_catalog_kinds())
    if (catalog_name(k) == name) return k;
  throw UnsupportedFunction("unknown catalog function '" + name + "'");
}

std::vector<CatalogKind> all_catalog_kinds() {
  return {CatalogKind::Lorentzian, CatalogKind::Quartic, CatalogKind::SquaredLorentzian,
          CatalogKind::Gaussian,   CatalogKind::Cosine,  CatalogKind::Sine,
          CatalogKind::OddLorentzian};
}

void validate(const CatalogFunction& f) {
  if (!std::isfinite(f.alpha) || !std::isfinite(f.shift) || !std::isfinite(f.scale))
    throw UnsupportedFunction("catalog parameters must be finite");
  switch (f.kind) {
    case CatalogKind::Lorentzian:
    case CatalogKind::Quartic:
    case CatalogKind::SquaredLorentzian:
      if (f.alpha != 1.0)
        throw UnsupportedFunction(catalog_name(f.kind) + " has no alpha parameter (got " +
                                  std::to_string(f.alpha) + ")");
      return;
    case CatalogKind::Gaussian:
    case CatalogKind::Cosine:
    case CatalogKind::Sine:
    case CatalogKind::OddLorentzian:
      if (!(f.alpha > 0.0))
        throw UnsupportedFunction(catalog_name(f.kind) + " requires alpha > 0");
      return;
  }
}

bool decays_at_infinity(const CatalogFunction& f) {
  return f.kind != CatalogKind::Cosine && f.kind != CatalogKind::Sine;
}

double catalog_value(const CatalogFunction& f, double x) {
  validate(f);
  return f.scale * base_value(f, x - f.shift);
}

Jet catalog_value(const CatalogFunction& f, const Jet& x) {
  validate(f);
  return f.scale * base_value(f, Jet(x - f.shift));
}

double hilbert_exact(const CatalogFunction& f, double x) {
  validate(f);
  return f.scale * base_hilbert(f, x - f.shift);
}

Jet hilbert_exact(const CatalogFunction& f, const Jet& x) {
  validate(f);
  return f.scale * base_hilbert(f, Jet(x - f.shift));
}

Jet dawson(const Jet& x) {
  const double x0 = static_cast<double>(x);
  std::array<double, kJetOrder + 1> d{};
  d[0] = gsl_sf_dawson(x0);
  d[1] = 1.0 - 2.0 * x0 * d[0];
  for (int k = 1; k < kJetOrder; ++k) d[k + 1] = -2.0 * k * d[k - 1] - 2.0 * x0 * d[k];
  return x.apply_derivatives(kJetOrder, [&d](size_t i) { return d[i]; });
}

std::vector<double> weideman_nodes(int N) {
  std::vector<double> x;
  x.reserve(static_cast<size_t>(2 * N - 1));
  for (int j = -N + 1; j < N; ++j) x.push_back(std::tan(0.5 * j * kPi / N));
  return x;
}

WeidemanExpansion weideman_fit(const RealFunction& f, int N) {
  if (N < 4) throw ConfigError("Weideman fit needs N >= 4");
  const int M = 2 * N;
  Vec F = Vec::Zero(M);
  for (int j = -N + 1; j < N; ++j) {
    const double x = std::tan(0.5 * j * kPi / N);
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite sample at node j=" << j << " (x=" << x << ")";
      throw InvalidSample(os.str());
    }
    F[(j + M) % M] = (1.0 - kI * x) * v;
  }
  const double far = 1e8;
  const double fp = f(far), fm = f(-far);
  if (!std::isfinite(fp) || !std::isfinite(fm))
    throw InvalidSample("non-finite sample at the theta = pi limit node");
  F[N] = 0.5 * ((1.0 - kI * far) * fp + (1.0 + kI * far) * fm);

  fft_inplace(F, -1);
  WeidemanExpansion e;
  e.N = N;
  e.coefficients.resize(static_cast<size_t>(M));
  for (int n = -N; n < N; ++n) e.coefficients[static_cast<size_t>(n + N)] = F[(n + M) % M] / double(M);
  return e;
}

namespace {

// sum_{n>=0} c_n z^n and sum_{n<0} c_n z^n by Horner in z and 1/z.
template <class Coef>
cd rational_sum(const WeidemanExpansion& e, double x, Coef coef) {
  const cd z = (1.0 + kI * x) / (1.0 - kI * x);
  const cd w = std::conj(z);  // |z| = 1 on the real line
  cd pos = 0.0, neg = 0.0;
  for (int n = e.N - 1; n >= 0; --n) pos = pos * z + coef(n) * e.a(n);
  for (int n = -e.N; n <= -1; ++n) neg = (neg + coef(n) * e.a(n)) * w;
  return (pos + neg) / (1.0 - kI * x);
}

}  // namespace

cd weideman_reconstruct(const WeidemanExpansion& e, double x) {
  if (!std::isfinite(x)) throw InvalidSample("evaluation point must be finite");
  if (e.N == 0) return 0.0;
  return rational_sum(e, x, [](int) { return cd(1.0); });
}

cd weideman_eval(const WeidemanExpansion& e, double x) {
  if (!std::isfinite(x)) throw InvalidSample("evaluation point must be finite");
  if (e.N == 0) return 0.0;
  return rational_sum(e, x, eigen_factor);
}

double hilbert_quadrature_oracle(const RealFunction& f, double x, double R, int n_quad) {
  const int order = 8;
  const int panels = std::max(1, n_quad / (2 * order));
  QuadratureRule q = composite_gauss_legendre(0.0, R, panels, order);
  double acc = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const double s = q.nodes[i];
    acc += q.weights[i] * (f(x - s) - f(x + s)) / s;
  }
  return acc / kPi;
}

std::string hilbert_method_name(HilbertMethod m) {
  switch (m) {
    case HilbertMethod::Exact: return "exact";
    case HilbertMethod::Weideman: return "weideman";
    case HilbertMethod::Quadrature: return "quadrature";
  }
  return "unknown";
}

HilbertMethod hilbert_method_from_name(const std::string& name) {
  if (name == "exact") return HilbertMethod::Exact;
  if (name == "weideman") return HilbertMethod::Weideman;
  if (name == "quadrature") return HilbertMethod::Quadrature;
  throw ConfigError("unknown hilbert method '" + name + "'");
}

double central_difference(const RealFunction& f, double x) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double half_laplacian_of(const DifferentiableFunction& u, double x, HilbertMethod method,
                         const HalfLaplacianOptions& opt) {
  RealFunction df = u.df ? u.df : RealFunction([f = u.f](double y) { return central_difference(f, y); });
  switch (method) {
    case HilbertMethod::Exact: {
      if (u.catalog == nullptr)
        throw UnsupportedFunction("exact half-Laplacian needs a catalog function");
      return hilbert_exact(*u.catalog, make_jet(x)).derivative(1);
    }
    case HilbertMethod::Weideman:
      return weideman_eval(weideman_fit(df, opt.weideman_N), x).real();
    case HilbertMethod::Quadrature:
      return hilbert_quadrature_oracle(df, x, opt.quad_R, opt.quad_n);
  }
  throw UnsupportedFunction("unknown method");
}

}  // namespace halfbvm
