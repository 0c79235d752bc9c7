#pragma once

#include <memory>
#include <string>
#include <vector>

#include "halfbvm/hilbert.hpp"

namespace halfbvm {

// A smooth real profile p on the line exposing p^(k) and (Hp)^(k) for
// k <= kJetOrder. Differentiation commutes with H, so (Hp)^(k) = H(p^(k)).
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double value(int k, double x) const = 0;
  virtual double hilbert(int k, double x) const = 0;
  virtual HilbertMethod method() const = 0;
  virtual bool decays() const = 0;
  virtual std::string describe() const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;
using JetFunction = std::function<Jet(const Jet&)>;

ProfilePtr catalog_profile(const CatalogFunction& f);

// Closed form evaluated on jets; each derivative order gets its own
// Weideman fit, so (Hp)^(k) never differentiates the expansion.
ProfilePtr weideman_profile(JetFunction f, int N, std::string name);

// Odd 2L-periodic extension of p across the walls of (a, a + L):
//   sum_{|m|<=K} p(x + 2Lm) - p(2a - x + 2Lm).
// The H sum for k = 0 only converges symmetrically and carries an additive
// constant of order 1/K; derivatives converge absolutely.
ProfilePtr odd_periodic_images(ProfilePtr base, double a, double L, int K);

struct FieldTerm {
  cd coef;
  ProfilePtr profile;
  int k = 0;  // derivative order
  int j = 0;  // 1 when the Hilbert transform is applied
};

// Finite linear combination of D^k H^j p terms, closed under D and H.
class Field {
 public:
  Field() = default;
  explicit Field(ProfilePtr p, cd coef = 1.0);

  cd operator()(double x) const;
  Vec sample(const std::vector<double>& xs) const;

  Field derivative() const;
  Field hilbert() const;
  Field half_laplacian() const;  // H(D f)

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  friend Field operator*(cd c, const Field& f);

  bool is_zero() const { return terms_.empty(); }
  const std::vector<FieldTerm>& terms() const { return terms_; }

 private:
  std::vector<FieldTerm> terms_;
};

}  // namespace halfbvm
