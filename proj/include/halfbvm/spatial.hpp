#pragma once

#include <string>
#include <vector>

#include "halfbvm/common.hpp"

namespace halfbvm {

enum class Boundary { DirichletHomogeneous, Periodic };

std::string boundary_name(Boundary b);

struct Grid {
  double x_left = 0.0;
  double L = 0.0;
  int m = 0;
  double h = 0.0;
  Boundary boundary = Boundary::DirichletHomogeneous;
  std::vector<double> nodes;  // interior nodes (Dirichlet) or x_0..x_{m-1} (periodic)

  int n() const { return static_cast<int>(nodes.size()); }
};

Grid make_grid(double L, int m, Boundary b, double x_left = 0.0);
// m = round(L / h); rejects spacings that do not divide L.
Grid make_grid_with_spacing(double L, double h, Boundary b, double x_left = 0.0);

enum class OperatorVariant { Zero, Scalar, Advection };

std::string operator_name(OperatorVariant v);

// L = 0, delta I, or delta d/dx. delta is complex so that L = -iV fits.
struct OperatorKind {
  OperatorVariant variant = OperatorVariant::Zero;
  cd delta = 0.0;
};

// U' = D U + G with U = (u, v), D = [[0, I], [P, Q]],
// P = eps^2 K - L_h^2 where K ~ -Delta, and Q = 2 L_h.
struct DiscreteSystem {
  Grid grid;
  cd epsilon = 1.0;
  OperatorKind op;
  SpMat K;   // approximates -Delta, positive semi-definite
  SpMat Lh;  // discrete L
  SpMat P;
  SpMat Q;
  SpMat D;

  int n() const { return grid.n(); }
};

SpMat laplacian_matrix(const Grid& g);
SpMat derivative_matrix(const Grid& g);
SpMat operator_matrix(const Grid& g, const OperatorKind& op);

// Advection needs a periodic grid; Zero and Scalar accept both boundaries.
DiscreteSystem assemble_discrete_system(const Grid& g, cd epsilon, const OperatorKind& op);

// D * (u, v) without forming D.
Vec apply_D(const DiscreteSystem& sys, const Vec& state);

Mat dense(const SpMat& A);

}  // namespace halfbvm
