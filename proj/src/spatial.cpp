#include "halfbvm/spatial.hpp"

#include <cmath>
#include <vector>

namespace halfbvm {

namespace {

using Triplet = Eigen::Triplet<cd>;

SpMat from_triplets(int n, const std::vector<Triplet>& t) {
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

void check_grid(const Grid& g) {
  if (g.m < 3) throw ConfigError("grid too small: m = " + std::to_string(g.m) + " < 3");
}

}  // namespace

std::string boundary_name(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "dirichlet";
}

std::string operator_name(OperatorVariant v) {
  switch (v) {
    case OperatorVariant::Zero: return "zero";
    case OperatorVariant::Scalar: return "scalar";
    case OperatorVariant::Advection: return "advection";
  }
  return "unknown";
}

Grid make_grid(double L, int m, Boundary b, double x_left) {
  if (!(L > 0.0)) throw ConfigError("domain length must be positive");
  Grid g;
  g.x_left = x_left;
  g.L = L;
  g.m = m;
  g.h = L / m;
  g.boundary = b;
  check_grid(g);
  if (b == Boundary::DirichletHomogeneous) {
    for (int i = 1; i < m; ++i) g.nodes.push_back(x_left + i * g.h);
  } else {
    for (int i = 0; i < m; ++i) g.nodes.push_back(x_left + i * g.h);
  }
  return g;
}

Grid make_grid_with_spacing(double L, double h, Boundary b, double x_left) {
  if (!(h > 0.0)) throw ConfigError("spacing must be positive");
  const double ratio = L / h;
  const int m = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - m) > 1e-9 * ratio)
    throw ConfigError("spacing h = " + std::to_string(h) + " does not divide L = " + std::to_string(L));
  return make_grid(L, m, b, x_left);
}

SpMat laplacian_matrix(const Grid& g) {
  check_grid(g);
  const int n = g.n();
  const double c = 1.0 / (g.h * g.h);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 * c);
    if (g.boundary == Boundary::Periodic) {
      t.emplace_back(i, (i + 1) % n, -c);
      t.emplace_back(i, (i + n - 1) % n, -c);
    } else {
      if (i + 1 < n) t.emplace_back(i, i + 1, -c);
      if (i > 0) t.emplace_back(i, i - 1, -c);
    }
  }
  return from_triplets(n, t);
}

SpMat derivative_matrix(const Grid& g) {
  check_grid(g);
  const int n = g.n();
  const double c = 1.0 / (2.0 * g.h);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (g.boundary == Boundary::Periodic) {
      t.emplace_back(i, (i + 1) % n, c);
      t.emplace_back(i, (i + n - 1) % n, -c);
    } else {
      if (i + 1 < n) t.emplace_back(i, i + 1, c);
      if (i > 0) t.emplace_back(i, i - 1, -c);
    }
  }
  return from_triplets(n, t);
}

SpMat operator_matrix(const Grid& g, const OperatorKind& op) {
  const int n = g.n();
  SpMat A(n, n);
  switch (op.variant) {
    case OperatorVariant::Zero:
      return A;
    case OperatorVariant::Scalar: {
      std::vector<Triplet> t;
      if (op.delta != cd(0.0))
        for (int i = 0; i < n; ++i) t.emplace_back(i, i, op.delta);
      return from_triplets(n, t);
    }
    case OperatorVariant::Advection: {
      SpMat d = derivative_matrix(g);
      d *= op.delta;
      return d;
    }
  }
  return A;
}

DiscreteSystem assemble_discrete_system(const Grid& g, cd epsilon, const OperatorKind& op) {
  check_grid(g);
  if (op.variant == OperatorVariant::Advection && g.boundary != Boundary::Periodic)
    throw ConfigError("advection operator requires a periodic grid");
  if (!std::isfinite(std::abs(op.delta)) || !std::isfinite(std::abs(epsilon)))
    throw ConfigError("epsilon and delta must be finite");

  DiscreteSystem s;
  s.grid = g;
  s.epsilon = epsilon;
  s.op = op;
  if (op.variant == OperatorVariant::Zero) s.op.delta = 0.0;
  s.K = laplacian_matrix(g);
  s.Lh = operator_matrix(g, s.op);
  // -eps^2 Delta - L^2 with -Delta ~ K.
  SpMat L2 = s.Lh * s.Lh;
  s.P = (epsilon * epsilon) * s.K - L2;
  s.P.prune(cd(0.0));
  s.Q = cd(2.0) * s.Lh;

  const int n = g.n();
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, n + i, 1.0);
  for (int k = 0; k < s.P.outerSize(); ++k)
    for (SpMat::InnerIterator it(s.P, k); it; ++it) t.emplace_back(n + it.row(), it.col(), it.value());
  for (int k = 0; k < s.Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(s.Q, k); it; ++it) t.emplace_back(n + it.row(), n + it.col(), it.value());
  s.D = SpMat(2 * n, 2 * n);
  s.D.setFromTriplets(t.begin(), t.end());
  s.D.makeCompressed();
  return s;
}

Vec apply_D(const DiscreteSystem& sys, const Vec& state) {
  const int n = sys.n();
  if (state.size() != 2 * n) throw DimensionMismatch("state must have size 2n");
  Vec out(2 * n);
  out.head(n) = state.tail(n);
  out.tail(n) = sys.P * state.head(n) + sys.Q * state.tail(n);
  return out;
}

Mat dense(const SpMat& A) { return Mat(A); }

}  // namespace halfbvm
