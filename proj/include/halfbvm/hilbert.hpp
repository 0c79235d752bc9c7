#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/math/differentiation/autodiff.hpp>

#include "halfbvm/common.hpp"

namespace halfbvm {

// Taylor jets carry derivatives 0..kJetOrder through closed-form evaluations.
inline constexpr int kJetOrder = 3;
using Jet = boost::math::differentiation::autodiff_fvar<double, kJetOrder>;

inline Jet make_jet(double x) {
  return boost::math::differentiation::make_fvar<double, kJetOrder>(x);
}

enum class CatalogKind { Lorentzian, Quartic, SquaredLorentzian, Gaussian, Cosine, Sine, OddLorentzian };

// scale * g(x - shift) for one of the closed-form pairs (g, Hg).
struct CatalogFunction {
  CatalogKind kind = CatalogKind::Lorentzian;
  double alpha = 1.0;
  double shift = 0.0;
  double scale = 1.0;
};

std::string catalog_name(CatalogKind kind);
CatalogKind catalog_kind_from_name(const std::string& name);
std::vector<CatalogKind> all_catalog_kinds();

// Throws UnsupportedFunction for parameter combinations without a closed form.
void validate(const CatalogFunction& f);
bool decays_at_infinity(const CatalogFunction& f);

double catalog_value(const CatalogFunction& f, double x);
Jet catalog_value(const CatalogFunction& f, const Jet& x);
double hilbert_exact(const CatalogFunction& f, double x);
Jet hilbert_exact(const CatalogFunction& f, const Jet& x);

// Dawson integral lifted to jets through F' = 1 - 2xF.
Jet dawson(const Jet& x);

using RealFunction = std::function<double(double)>;

// Expansion in the rational eigenfunctions rho_n = (1+ix)^n / (1-ix)^(n+1)
// of the Hilbert transform, H rho_n = -i sgn(n) rho_n with sgn(0) = +1.
struct WeidemanExpansion {
  int N = 0;
  std::vector<cd> coefficients;  // a_n for n = -N..N-1 at index n + N

  cd a(int n) const { return coefficients[static_cast<size_t>(n + N)]; }
};

// Nodes x_j = tan(theta_j / 2), theta_j = j pi / N, |j| < N.
std::vector<double> weideman_nodes(int N);

// Samples f at the 2N-1 finite nodes plus the limit of (1 - ix) f(x) at
// theta = pi, taken as the mean of the values at x = +-1e8.
WeidemanExpansion weideman_fit(const RealFunction& f, int N);

// Reconstruction sum_n a_n rho_n(x); recovers f on the line.
cd weideman_reconstruct(const WeidemanExpansion& e, double x);
cd weideman_eval(const WeidemanExpansion& e, double x);

// (1/pi) int_0^R [f(x-s) - f(x+s)] / s ds with composite 8-point
// Gauss-Legendre panels; n_quad counts both members of each symmetric pair.
double hilbert_quadrature_oracle(const RealFunction& f, double x, double R, int n_quad);

enum class HilbertMethod { Exact, Weideman, Quadrature };

std::string hilbert_method_name(HilbertMethod m);
HilbertMethod hilbert_method_from_name(const std::string& name);

struct DifferentiableFunction {
  RealFunction f;
  RealFunction df;                          // empty: central differences
  const CatalogFunction* catalog = nullptr; // required for the exact method
};

struct HalfLaplacianOptions {
  int weideman_N = 256;
  double quad_R = 1e3;
  int quad_n = 100000;
};

// Central difference with step cbrt(eps_mach) * max(1, |x|).
double central_difference(const RealFunction& f, double x);

// (-Delta)^(1/2) f (x) = H(f')(x).
double half_laplacian_of(const DifferentiableFunction& u, double x, HilbertMethod method,
                         const HalfLaplacianOptions& opt = {});

}  // namespace halfbvm
