#pragma once

#include <functional>
#include <string>
#include <vector>

#include "halfbvm/spatial.hpp"

namespace halfbvm {

// rho(z) = sum alpha_j z^j, sigma(z) = sum beta_j z^j (ascending coefficients).
struct MethodPolynomials {
  std::string name;
  std::vector<cd> rho;
  std::vector<cd> sigma;
  int k1 = 1;
  int k2 = 0;
};

MethodPolynomials gmm_polynomials();
MethodPolynomials explicit_euler_polynomials();
MethodPolynomials implicit_euler_polynomials();
MethodPolynomials trapezoidal_polynomials();
MethodPolynomials bdf2_polynomials();
MethodPolynomials bdf4_polynomials();
std::vector<MethodPolynomials> lmm_catalog();

cd poly_eval(const std::vector<cd>& c, cd z);
cd poly_derivative_eval(const std::vector<cd>& c, cd z);
// Roots of a polynomial; a vanishing leading coefficient lowers the degree
// and the lost roots are reported as infinite.
std::vector<cd> poly_roots(const std::vector<cd>& c);

// rho(1) = 0 and rho'(1) = sigma(1).
bool is_consistent(const MethodPolynomials& mp, double tol = 1e-12);

enum class StabilityClass { S, N, Unstable };
std::string stability_class_name(StabilityClass c);

// Roots within this distance of the unit circle count as unit modulus.
inline constexpr double kUnitCircleTol = 1e-10;

StabilityClass classify_stability(const MethodPolynomials& mp, cd q);

struct LocusResult {
  std::vector<cd> samples;
  int poles_skipped = 0;
};

// q(e^{i theta}) = rho / sigma for theta_j = 2 pi j / n_theta.
LocusResult boundary_locus(const MethodPolynomials& mp, int n_theta);

// Points with |R(z)| = 1 found along n_rays rays from the origin.
std::vector<cd> one_step_boundary_locus(const std::function<cd(cd)>& R, int n_rays, double r_max);
cd rk2_stability(cd z);
cd rk4_stability(cd z);
cd radau_iia3_stability(cd z);

bool matrices_commute(const SpMat& P, const SpMat& Q, double rel_tol = 1e-12);

// lambda = (lQ +- sqrt(lQ^2 + 4 lP)) / 2 over a shared eigenbasis of P and Q,
// or a dense eigensolve of D when none is available.
std::vector<cd> eigenvalues_of_D(const DiscreteSystem& sys);
std::vector<cd> eigenvalues_dense(const DiscreteSystem& sys);

// Largest distance in a greedy nearest-neighbour pairing of two spectra.
double spectrum_mismatch(const std::vector<cd>& a, const std::vector<cd>& b);

struct StabilityVerdict {
  bool stable = true;
  std::vector<cd> offending_eigenvalues;  // tau * lambda values on [-i, i]
  std::vector<cd> locus_samples;
};

inline constexpr double kSegmentTol = 1e-12;

bool on_gmm_segment(cd q, double tol = kSegmentTol);
StabilityVerdict gmm_stability_verdict(const DiscreteSystem& sys, double tau);

}  // namespace halfbvm
