#include "halfbvm/doubling.hpp"

namespace halfbvm {

cd SourceSpec::operator()(double x, double t) const {
  cd acc = 0.0;
  for (const auto& term : terms) acc += term.time(t) * term.space(x);
  return acc;
}

Vec DoubledState::stacked() const {
  Vec s(u.size() + v.size());
  s << u, v;
  return s;
}

Field apply_operator(const OperatorKind& op, const Field& f) {
  switch (op.variant) {
    case OperatorVariant::Zero:
      return Field{};
    case OperatorVariant::Scalar:
      return op.delta * f;
    case OperatorVariant::Advection:
      return op.delta * f.derivative();
  }
  return Field{};
}

DoubledState doubled_initial_state(const Field& u0, const DiscreteSystem& sys) {
  DoubledState s;
  const auto& x = sys.grid.nodes;
  s.u = u0.sample(x);
  Field v0 = apply_operator(sys.op, u0) - sys.epsilon * u0.half_laplacian();
  s.v = v0.sample(x);
  return s;
}

SourceSampler::SourceSampler(const SourceSpec& src, const DiscreteSystem& sys) : n_(sys.n()) {
  const auto& x = sys.grid.nodes;
  for (const auto& term : src.terms) {
    times_.push_back(term.time);
    upper_.push_back(term.space.sample(x));
    Field low = apply_operator(sys.op, term.space) - sys.epsilon * term.space.half_laplacian();
    lower_.push_back(low.sample(x));
  }
}

Vec SourceSampler::at(double t) const {
  Vec g = Vec::Zero(2 * n_);
  for (size_t i = 0; i < times_.size(); ++i) {
    const cd c = times_[i](t);
    g.head(n_) += c * upper_[i];
    g.tail(n_) += c * lower_[i];
  }
  return g;
}

Vec doubled_source(const SourceSpec& src, const DiscreteSystem& sys, double t) {
  return SourceSampler(src, sys).at(t);
}

Vec rhs(const DiscreteSystem& sys, const Vec& state, const Vec& g) {
  if (g.size() != 2 * sys.n()) throw DimensionMismatch("source must have size 2n");
  return apply_D(sys, state) + g;
}

SourceSpec manufactured_source(const Field& g, TimeFunction c, TimeFunction dc, cd epsilon,
                               const OperatorKind& op) {
  SourceSpec s;
  s.terms.push_back({std::move(dc), g});
  s.terms.push_back({std::move(c), epsilon * g.half_laplacian() - apply_operator(op, g)});
  return s;
}

Vec integrate_rk4(const DiscreteSystem& sys, const SourceSampler& src, const Vec& U0, double T, int steps) {
  const double dt = T / steps;
  Vec U = U0;
  auto F = [&](double t, const Vec& y) {
    Vec r = apply_D(sys, y);
    if (!src.is_zero()) r += src.at(t);
    return r;
  };
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    Vec k1 = F(t, U);
    Vec k2 = F(t + 0.5 * dt, U + 0.5 * dt * k1);
    Vec k3 = F(t + 0.5 * dt, U + 0.5 * dt * k2);
    Vec k4 = F(t + dt, U + dt * k3);
    U += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return U;
}

}  // namespace halfbvm
