#include "halfbvm/profile.hpp"

#include <array>
#include <utility>

namespace halfbvm {

namespace {

void check_order(int k) {
  if (k < 0 || k > kJetOrder)
    throw UnsupportedFunction("derivative order " + std::to_string(k) + " exceeds jet order");
}

class CatalogProfile final : public Profile {
 public:
  explicit CatalogProfile(const CatalogFunction& f) : f_(f) { validate(f_); }

  double value(int k, double x) const override {
    check_order(k);
    return catalog_value(f_, make_jet(x)).derivative(static_cast<size_t>(k));
  }
  double hilbert(int k, double x) const override {
    check_order(k);
    return hilbert_exact(f_, make_jet(x)).derivative(static_cast<size_t>(k));
  }
  HilbertMethod method() const override { return HilbertMethod::Exact; }
  bool decays() const override { return decays_at_infinity(f_); }
  std::string describe() const override {
    return catalog_name(f_.kind) + "(alpha=" + std::to_string(f_.alpha) +
           ",shift=" + std::to_string(f_.shift) + ",scale=" + std::to_string(f_.scale) + ")";
  }

 private:
  CatalogFunction f_;
};

class WeidemanProfile final : public Profile {
 public:
  WeidemanProfile(JetFunction f, int N, std::string name) : f_(std::move(f)), name_(std::move(name)) {
    for (int k = 0; k <= kJetOrder; ++k) {
      auto sample = [this, k](double x) {
        return f_(make_jet(x)).derivative(static_cast<size_t>(k));
      };
      fits_[static_cast<size_t>(k)] = weideman_fit(sample, N);
    }
  }

  double value(int k, double x) const override {
    check_order(k);
    return f_(make_jet(x)).derivative(static_cast<size_t>(k));
  }
  double hilbert(int k, double x) const override {
    check_order(k);
    return weideman_eval(fits_[static_cast<size_t>(k)], x).real();
  }
  HilbertMethod method() const override { return HilbertMethod::Weideman; }
  bool decays() const override { return true; }
  std::string describe() const override {
    return name_ + "(weideman N=" + std::to_string(fits_[0].N) + ")";
  }

 private:
  JetFunction f_;
  std::string name_;
  std::array<WeidemanExpansion, kJetOrder + 1> fits_;
};

class ImageProfile final : public Profile {
 public:
  ImageProfile(ProfilePtr base, double a, double L, int K) : base_(std::move(base)), a_(a), P_(2 * L), K_(K) {
    if (!base_->decays())
      throw UnsupportedFunction("image sums need a decaying profile: " + base_->describe());
  }

  double value(int k, double x) const override { return sum(k, x, false); }
  double hilbert(int k, double x) const override { return sum(k, x, true); }
  HilbertMethod method() const override { return base_->method(); }
  bool decays() const override { return false; }
  std::string describe() const override {
    return "odd_images(" + base_->describe() + ",K=" + std::to_string(K_) + ")";
  }

 private:
  // Reflection x -> 2a - x contributes with sign (-1)^(k + j + 1).
  double sum(int k, double x, bool hilb) const {
    const double refl_sign = ((k + (hilb ? 1 : 0) + 1) % 2 == 0) ? 1.0 : -1.0;
    const double xr = 2 * a_ - x;
    auto eval = [&](double y) { return hilb ? base_->hilbert(k, y) : base_->value(k, y); };
    double acc = 0.0;
    for (int m = K_; m >= 1; --m) {
      const double s = P_ * m;
      acc += eval(x + s) + eval(x - s) + refl_sign * (eval(xr + s) + eval(xr - s));
    }
    return acc + eval(x) + refl_sign * eval(xr);
  }

  ProfilePtr base_;
  double a_, P_;
  int K_;
};

}  // namespace

ProfilePtr catalog_profile(const CatalogFunction& f) { return std::make_shared<CatalogProfile>(f); }

ProfilePtr weideman_profile(JetFunction f, int N, std::string name) {
  return std::make_shared<WeidemanProfile>(std::move(f), N, std::move(name));
}

ProfilePtr odd_periodic_images(ProfilePtr base, double a, double L, int K) {
  return std::make_shared<ImageProfile>(std::move(base), a, L, K);
}

Field::Field(ProfilePtr p, cd coef) { terms_.push_back({coef, std::move(p), 0, 0}); }

cd Field::operator()(double x) const {
  cd acc = 0.0;
  for (const auto& t : terms_)
    acc += t.coef * (t.j == 0 ? t.profile->value(t.k, x) : t.profile->hilbert(t.k, x));
  return acc;
}

Vec Field::sample(const std::vector<double>& xs) const {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = (*this)(xs[i]);
  return out;
}

Field Field::derivative() const {
  Field out;
  for (auto t : terms_) {
    ++t.k;
    check_order(t.k);
    out.terms_.push_back(t);
  }
  return out;
}

Field Field::hilbert() const {
  Field out;
  for (auto t : terms_) {
    if (t.j == 1) {
      t.j = 0;
      t.coef = -t.coef;
    } else {
      t.j = 1;
    }
    out.terms_.push_back(t);
  }
  return out;
}

Field Field::half_laplacian() const { return derivative().hilbert(); }

Field Field::operator+(const Field& o) const {
  Field out = *this;
  out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
  return out;
}

Field Field::operator-(const Field& o) const { return *this + cd(-1.0) * o; }

Field operator*(cd c, const Field& f) {
  Field out;
  if (c == cd(0.0)) return out;
  for (auto t : f.terms_) {
    t.coef *= c;
    out.terms_.push_back(t);
  }
  return out;
}

}  // namespace halfbvm
