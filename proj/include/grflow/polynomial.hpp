#pragma once

// Small multivariate polynomials with exact evaluation and differentiation.
// These back the randomized analytic test fields: the same object yields
// machine-exact derivative jets for the closed-form path and a plain callable
// for the finite-difference oracle.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace grflow {

class Polynomial {
 public:
  static constexpr int kMaxVars = 6;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > kMaxVars)
      throw std::invalid_argument("polynomial variable count out of range");
  }

  static Polynomial constant(int nvars, double c) {
    Polynomial p(nvars);
    if (c != 0.0) p.terms_.push_back({c, {}});
    return p;
  }

  static Polynomial variable(int nvars, int i) {
    Polynomial p(nvars);
    Term t{1.0, {}};
    t.e[i] = 1;
    p.terms_.push_back(t);
    return p;
  }

  int nvars() const { return nvars_; }

  void add_term(double c, const std::array<uint8_t, kMaxVars>& exps) {
    if (c != 0.0) terms_.push_back({c, exps});
  }

  double eval(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
      double v = t.c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < t.e[i]; ++k) v *= x[i];
      acc += v;
    }
    return acc;
  }

  Polynomial partial(int i) const {
    Polynomial out(nvars_);
    for (const auto& t : terms_) {
      if (t.e[i] == 0) continue;
      Term d = t;
      d.c = t.c * t.e[i];
      d.e[i] = static_cast<uint8_t>(t.e[i] - 1);
      out.terms_.push_back(d);
    }
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    require_same(o);
    for (const auto& t : o.terms_) terms_.push_back({-t.c, t.e});
    return *this;
  }

  Polynomial& operator*=(double s) {
    for (auto& t : terms_) t.c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same(b);
    Polynomial out(a.nvars_);
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        Term t{ta.c * tb.c, {}};
        for (int i = 0; i < a.nvars_; ++i)
          t.e[i] = static_cast<uint8_t>(ta.e[i] + tb.e[i]);
        out.terms_.push_back(t);
      }
    return out;
  }

 private:
  struct Term {
    double c = 0.0;
    std::array<uint8_t, kMaxVars> e{};
  };

  void require_same(const Polynomial& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("polynomial arity mismatch");
  }

  int nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace grflow
