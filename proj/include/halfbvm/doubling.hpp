#pragma once

#include <functional>
#include <vector>

#include "halfbvm/profile.hpp"
#include "halfbvm/spatial.hpp"

namespace halfbvm {

using TimeFunction = std::function<cd(double)>;

// f(x, t) = sum_i c_i(t) g_i(x).
struct SourceTerm {
  TimeFunction time;
  Field space;
};

struct SourceSpec {
  std::vector<SourceTerm> terms;

  bool is_zero() const { return terms.empty(); }
  cd operator()(double x, double t) const;
};

struct DoubledState {
  Vec u;
  Vec v;

  Vec stacked() const;
};

// Continuum L applied symbolically: 0, delta f or delta f'.
Field apply_operator(const OperatorKind& op, const Field& f);

// u = u0 at the nodes, v = -eps H(u0') + L u0.
DoubledState doubled_initial_state(const Field& u0, const DiscreteSystem& sys);

// Node samples of g_i and of L g_i - eps H(g_i') are taken once; a time
// node then costs one weighted sum.
class SourceSampler {
 public:
  SourceSampler() = default;
  SourceSampler(const SourceSpec& src, const DiscreteSystem& sys);

  Vec at(double t) const;  // (f, L f - eps H(D f)) stacked, size 2n
  bool is_zero() const { return times_.empty(); }
  int n() const { return n_; }

 private:
  int n_ = 0;
  std::vector<TimeFunction> times_;
  std::vector<Vec> upper_;
  std::vector<Vec> lower_;
};

Vec doubled_source(const SourceSpec& src, const DiscreteSystem& sys, double t);

Vec rhs(const DiscreteSystem& sys, const Vec& state, const Vec& g);

// Source for the exact solution u = c(t) g(x): f = c' g + c (eps H(g') - L g).
SourceSpec manufactured_source(const Field& g, TimeFunction c, TimeFunction dc, cd epsilon,
                               const OperatorKind& op);

// Classical RK4 on U' = D U + G, used as a reference integrator in tests.
Vec integrate_rk4(const DiscreteSystem& sys, const SourceSampler& src, const Vec& U0, double T, int steps);

}  // namespace halfbvm
