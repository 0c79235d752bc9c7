#pragma once

#include <vector>

#include "halfbvm/doubling.hpp"
#include "halfbvm/spatial.hpp"

namespace halfbvm {

// Midpoint main formula with a backward-Euler last row; B = I, b0 = 0.
struct GmmMatrices {
  int N = 0;
  double T = 0.0;
  double tau = 0.0;
  SpMat A;
  SpMat B;
  Vec a0;
  Vec b0;
};

GmmMatrices build_gmm(int N, double T);

// (A (x) I - tau B (x) D) U = tau (B (x) I) g + tau b0 (x) (D U0 + g0) - a0 (x) U0,
// with block j of U holding the doubled state at t_{j+1}.
struct AllAtOnceSystem {
  GmmMatrices gmm;
  DiscreteSystem sys;
  Vec U0;
  Vec rhs;

  int block() const { return 2 * sys.n(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(gmm.N) * block(); }
  Vec apply(const Vec& x) const;
};

AllAtOnceSystem assemble_all_at_once(const GmmMatrices& gmm, const DiscreteSystem& sys,
                                     const SourceSampler& src, const DoubledState& u0v0);

// Kronecker form, for small instances only.
SpMat materialize(const AllAtOnceSystem& s);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> u;
  std::vector<Vec> v;
};

// Unstacks the solution and prepends the initial state (N + 1 entries).
Trajectory extract_trajectory(const Vec& x, const AllAtOnceSystem& s);

}  // namespace halfbvm
