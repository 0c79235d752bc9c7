#include "halfbvm/bvm.hpp"

#include <vector>

namespace halfbvm {

GmmMatrices build_gmm(int N, double T) {
  if (N < 2) throw ConfigError("GMM needs N >= 2 time steps");
  if (!(T > 0.0)) throw ConfigError("final time must be positive");
  GmmMatrices g;
  g.N = N;
  g.T = T;
  g.tau = T / N;
  std::vector<Eigen::Triplet<cd>> t;
  for (int j = 0; j < N - 1; ++j) {
    if (j > 0) t.emplace_back(j, j - 1, -0.5);
    t.emplace_back(j, j + 1, 0.5);
  }
  t.emplace_back(N - 1, N - 2, -1.0);
  t.emplace_back(N - 1, N - 1, 1.0);
  g.A = SpMat(N, N);
  g.A.setFromTriplets(t.begin(), t.end());
  g.B = SpMat(N, N);
  g.B.setIdentity();
  g.a0 = Vec::Zero(N);
  g.a0[0] = -0.5;
  g.b0 = Vec::Zero(N);
  return g;
}

Vec AllAtOnceSystem::apply(const Vec& x) const {
  if (x.size() != size()) throw DimensionMismatch("all-at-once operand has wrong size");
  const int N = gmm.N;
  const int b = block();
  const double tau = gmm.tau;
  Vec y(x.size());
  for (int j = 0; j < N; ++j) {
    auto out = y.segment(static_cast<Eigen::Index>(j) * b, b);
    out = -tau * apply_D(sys, x.segment(static_cast<Eigen::Index>(j) * b, b));
    if (j < N - 1) {
      out += 0.5 * x.segment(static_cast<Eigen::Index>(j + 1) * b, b);
      if (j > 0) out -= 0.5 * x.segment(static_cast<Eigen::Index>(j - 1) * b, b);
    } else {
      out += x.segment(static_cast<Eigen::Index>(j) * b, b) - x.segment(static_cast<Eigen::Index>(j - 1) * b, b);
    }
  }
  return y;
}

AllAtOnceSystem assemble_all_at_once(const GmmMatrices& gmm, const DiscreteSystem& sys,
                                     const SourceSampler& src, const DoubledState& u0v0) {
  const int n = sys.n();
  if (u0v0.u.size() != n || u0v0.v.size() != n) throw DimensionMismatch("initial state does not match grid");
  if (!src.is_zero() && src.n() != n) throw DimensionMismatch("source sampler does not match grid");
  AllAtOnceSystem s;
  s.gmm = gmm;
  s.sys = sys;
  s.U0 = u0v0.stacked();
  const int b = 2 * n;
  s.rhs = Vec::Zero(static_cast<Eigen::Index>(gmm.N) * b);
  Vec g0 = src.is_zero() ? Vec::Zero(b) : src.at(0.0);
  Vec du0 = apply_D(sys, s.U0) + g0;
  for (int j = 0; j < gmm.N; ++j) {
    auto seg = s.rhs.segment(static_cast<Eigen::Index>(j) * b, b);
    if (!src.is_zero()) seg += gmm.tau * src.at((j + 1) * gmm.tau);
    if (gmm.b0[j] != cd(0.0)) seg += gmm.tau * gmm.b0[j] * du0;
    if (gmm.a0[j] != cd(0.0)) seg -= gmm.a0[j] * s.U0;
  }
  return s;
}

SpMat materialize(const AllAtOnceSystem& s) {
  const int N = s.gmm.N;
  const int b = s.block();
  std::vector<Eigen::Triplet<cd>> t;
  for (int k = 0; k < s.gmm.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(s.gmm.A, k); it; ++it)
      for (int i = 0; i < b; ++i) t.emplace_back(it.row() * b + i, it.col() * b + i, it.value());
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < s.sys.D.outerSize(); ++k)
      for (SpMat::InnerIterator it(s.sys.D, k); it; ++it)
        t.emplace_back(j * b + it.row(), j * b + it.col(), -s.gmm.tau * it.value());
  SpMat M(N * b, N * b);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

Trajectory extract_trajectory(const Vec& x, const AllAtOnceSystem& s) {
  if (x.size() != s.size()) throw DimensionMismatch("solution vector has wrong size");
  const int n = s.sys.n();
  const int b = 2 * n;
  Trajectory tr;
  tr.t.push_back(0.0);
  tr.u.push_back(s.U0.head(n));
  tr.v.push_back(s.U0.tail(n));
  for (int j = 0; j < s.gmm.N; ++j) {
    tr.t.push_back((j + 1) * s.gmm.tau);
    tr.u.push_back(x.segment(static_cast<Eigen::Index>(j) * b, n));
    tr.v.push_back(x.segment(static_cast<Eigen::Index>(j) * b + n, n));
  }
  return tr;
}

}  // namespace halfbvm
