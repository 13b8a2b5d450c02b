#pragma once

// Seeded random analytic field sets and matrix data for the property suites.
// Field components are polynomials, so derivative jets are exact and the same
// fields feed the finite-difference oracle as plain callables.

#include "grflow/circle_bundle.hpp"
#include "grflow/oracle.hpp"
#include "grflow/polynomial.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace grflow {

// p-form field with polynomial canonical components.
struct PolyForm {
  int dim = 0;
  int rank = 0;
  std::vector<Polynomial> c;

  PolyForm() = default;
  PolyForm(int d, int r) : dim(d), rank(r), c(binom(d, r), Polynomial(d)) {}

  Form eval(const Vector& x) const {
    Form f(dim, rank);
    for (int s = 0; s < static_cast<int>(c.size()); ++s) f.raw(s) = c[s].eval(x);
    return f;
  }

  PolyForm partial(int k) const {
    PolyForm out(dim, rank);
    for (size_t s = 0; s < c.size(); ++s) out.c[s] = c[s].partial(k);
    return out;
  }

  // exterior derivative, components (d w)_K = sum_t (-1)^t d_{K_t} w_{K\t}
  PolyForm exterior_derivative() const {
    PolyForm out(dim, rank + 1);
    const Form probe(dim, rank + 1);
    for (int so = 0; so < static_cast<int>(out.c.size()); ++so) {
      const auto K = probe.tuple(so);
      Polynomial acc(dim);
      for (int t = 0; t <= rank; ++t) {
        int rest[3];
        int nn = 0;
        for (int u = 0; u <= rank; ++u)
          if (u != t) rest[nn++] = K[u];
        int idx[3] = {rest[0], rest[1], 0};
        const int slot = (rank == 0) ? 0 : detail::slot_of(dim, rank, idx);
        Polynomial term = c[slot].partial(K[t]);
        if (t % 2 == 1) term *= -1.0;
        acc += term;
      }
      out.c[so] = acc;
    }
    return out;
  }

  FormJet jet(const Vector& x, bool with_d2) const {
    FormJet j = FormJet::zero(dim, rank, with_d2);
    j.value = eval(x);
    std::vector<PolyForm> d1(dim);
    for (int k = 0; k < dim; ++k) {
      d1[k] = partial(k);
      j.d1[k] = d1[k].eval(x);
    }
    if (with_d2)
      for (int k = 0; k < dim; ++k)
        for (int l = k; l < dim; ++l) j.d2at(k, l) = d1[k].partial(l).eval(x);
    return j;
  }
};

inline PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  PolyForm out(a.dim, a.rank + b.rank);
  const Form probe(a.dim, a.rank + b.rank);
  const int r = a.rank + b.rank;
  for (int so = 0; so < static_cast<int>(out.c.size()); ++so) {
    const auto K = probe.tuple(so);
    Polynomial acc(a.dim);
    for (int mask = 0; mask < (1 << r); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != a.rank) continue;
      int I[3], J[3];
      int ni = 0, nj = 0, inversions = 0;
      for (int t = 0; t < r; ++t) {
        if (mask & (1 << t)) {
          I[ni++] = K[t];
        } else {
          inversions += a.rank - ni;
          J[nj++] = K[t];
        }
      }
      const int sa = (a.rank == 0) ? 0 : detail::slot_of(a.dim, a.rank, I);
      const int sb = (b.rank == 0) ? 0 : detail::slot_of(b.dim, b.rank, J);
      Polynomial term = a.c[sa] * b.c[sb];
      if (inversions % 2 == 1) term *= -1.0;
      acc += term;
    }
    out.c[so] = acc;
  }
  return out;
}

struct PolyScalar {
  Polynomial p;

  double eval(const Vector& x) const { return p.eval(x); }

  ScalarJet jet(const Vector& x) const {
    const int m = p.nvars();
    ScalarJet j;
    j.value = p.eval(x);
    j.d1 = Vector(m);
    j.d2 = Matrix(m, m);
    std::vector<Polynomial> d1(m);
    for (int k = 0; k < m; ++k) {
      d1[k] = p.partial(k);
      j.d1[k] = d1[k].eval(x);
    }
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) j.d2(k, l) = d1[k].partial(l).eval(x);
    return j;
  }
};

// Symmetric matrix field with polynomial entries.
struct PolySym {
  int m = 0;
  std::vector<Polynomial> c;  // canonical (i<=j) slots

  PolySym() = default;
  explicit PolySym(int dim) : m(dim), c(sym_slot_count(dim), Polynomial(dim)) {}

  const Polynomial& at(int i, int j) const { return c[sym_slot(m, i, j)]; }
  Polynomial& at(int i, int j) { return c[sym_slot(m, i, j)]; }

  Matrix eval(const Vector& x) const {
    Matrix M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) M(i, j) = M(j, i) = at(i, j).eval(x);
    return M;
  }

  BaseChartSample chart_jet(const Vector& x) const {
    std::vector<Matrix> dh(m, Matrix(m, m));
    std::vector<Matrix> d2h(sym_slot_count(m), Matrix(m, m));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        std::vector<Polynomial> di(m);
        for (int k = 0; k < m; ++k) {
          di[k] = at(i, j).partial(k);
          dh[k](i, j) = dh[k](j, i) = di[k].eval(x);
        }
        for (int k = 0; k < m; ++k)
          for (int l = k; l < m; ++l) {
            const double v = di[k].partial(l).eval(x);
            d2h[sym_slot(m, k, l)](i, j) = v;
            d2h[sym_slot(m, k, l)](j, i) = v;
          }
      }
    return BaseChartSample(BaseMetric(eval(x)), std::move(dh), std::move(d2h));
  }
};

// Complete invariant field set over an m-dimensional base chart.
struct InvariantPolyFields {
  int m = 0;
  PolyScalar phi, gauge;
  PolySym h;
  PolyForm pot, eta, mu, y0, z0;

  InvariantSample sample(const Vector& x) const {
    return InvariantSample(m, phi.jet(x), pot.jet(x, true), h.chart_jet(x),
                           eta.jet(x, true), mu.jet(x, true), y0.jet(x, false),
                           z0.jet(x, false), gauge.jet(x));
  }

  // Chart closures for the oracle, coordinates ordered (y, x^1..x^m).
  oracle::MetricField metric_field() const {
    const auto self = *this;
    return [self](const oracle::Vec& p) {
      const Vector x = p.tail(self.m);
      const double ph = self.phi.eval(x);
      const Matrix hb = self.h.eval(x);
      Vector A(self.m);
      const Form av = self.pot.eval(x);
      for (int i = 0; i < self.m; ++i) A[i] = av(i);
      Matrix g(self.m + 1, self.m + 1);
      g(0, 0) = ph;
      for (int i = 0; i < self.m; ++i) {
        g(0, i + 1) = ph * A[i];
        g(i + 1, 0) = g(0, i + 1);
      }
      for (int i = 0; i < self.m; ++i)
        for (int j = 0; j < self.m; ++j)
          g(i + 1, j + 1) = hb(i, j) + ph * A[i] * A[j];
      return g;
    };
  }

  // Assembled total flux theta ^ Y + Z as a dense array on the chart.
  oracle::ThreeFormField flux_field() const {
    // precompute the flux component polynomials
    PolyForm Y = y0;
    { const PolyForm de = eta.exterior_derivative();
      for (size_t s = 0; s < Y.c.size(); ++s) Y.c[s] -= de.c[s]; }
    PolyForm F = pot.exterior_derivative();
    PolyForm Z = wedge(F, eta);
    { const PolyForm dm = mu.exterior_derivative();
      for (size_t s = 0; s < Z.c.size(); ++s) Z.c[s] += dm.c[s] + z0.c[s]; }
    const PolyForm A = pot;
    const int mm = m;
    return [Y, Z, A, mm](const oracle::Vec& p) {
      const Vector x = p.tail(mm);
      const Form Yv = Y.eval(x);
      const Form Zv = Z.eval(x);
      const Form Av = A.eval(x);
      oracle::Dense3 H(mm + 1);
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j) {
          const double y = Yv(i, j);
          H.at(0, i + 1, j + 1) = y;
          H.at(i + 1, 0, j + 1) = -y;
          H.at(i + 1, j + 1, 0) = y;
        }
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mm; ++j)
          for (int k = 0; k < mm; ++k) {
            double v = (mm >= 3) ? Zv(i, j, k) : 0.0;
            v += Av(i) * Yv(j, k) - Av(j) * Yv(i, k) + Av(k) * Yv(i, j);
            H.at(i + 1, j + 1, k + 1) = v;
          }
      return H;
    };
  }

  oracle::ScalarField gauge_field() const {
    const PolyScalar f = gauge;
    const int mm = m;
    return [f, mm](const oracle::Vec& p) { return f.eval(p.tail(mm)); };
  }
};

struct FieldOptions {
  double amplitude = 0.4;     // leading coefficient scale
  double metric_bump = 0.25;  // deviation of h from the identity
  int degree = 3;
  bool with_flux = true;
  bool with_gauge = true;
  bool closed_y0 = true;      // generate y0 as an exact derivative
};

namespace detail {

inline Polynomial random_poly(std::mt19937_64& rng, int m, int degree, double amp,
                              bool zero_constant = false) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Polynomial p(m);
  std::array<uint8_t, Polynomial::kMaxVars> e{};
  // enumerate exponent tuples of total degree <= degree
  std::function<void(int, int)> rec = [&](int var, int remaining) {
    if (var == m) {
      int total = 0;
      for (int i = 0; i < m; ++i) total += e[i];
      if (zero_constant && total == 0) return;
      const double damp = std::pow(0.5, total);
      p.add_term(amp * damp * U(rng), e);
      return;
    }
    for (int d = 0; d <= remaining; ++d) {
      e[var] = static_cast<uint8_t>(d);
      rec(var + 1, remaining - d);
    }
    e[var] = 0;
  };
  rec(0, degree);
  return p;
}

}  // namespace detail

inline InvariantPolyFields random_invariant_fields(std::mt19937_64& rng, int m,
                                                   const FieldOptions& opt = {}) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  InvariantPolyFields f;
  f.m = m;

  for (int attempt = 0; attempt < 100; ++attempt) {
    f.phi.p = Polynomial::constant(m, 1.0 + 0.4 * U(rng)) +
              detail::random_poly(rng, m, opt.degree, opt.amplitude, true);
    const ScalarJet j = f.phi.jet(Vector::Zero(m));
    if (j.value > 0.4 && j.d1.cwiseAbs().maxCoeff() > 0.1) break;
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    f.h = PolySym(m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        f.h.at(i, j) = detail::random_poly(rng, m, opt.degree, opt.metric_bump);
        if (i == j) f.h.at(i, j) += Polynomial::constant(m, 1.0);
      }
    Eigen::SelfAdjointEigenSolver<Matrix> es(f.h.eval(Vector::Zero(m)));
    if (es.eigenvalues().minCoeff() > 0.35) break;
  }

  f.pot = PolyForm(m, 1);
  for (auto& c : f.pot.c) c = detail::random_poly(rng, m, opt.degree, opt.amplitude);

  f.eta = PolyForm(m, 1);
  f.mu = PolyForm(m, 2);
  f.y0 = PolyForm(m, 2);
  f.z0 = PolyForm(m, 3);
  if (opt.with_flux) {
    for (auto& c : f.eta.c) c = detail::random_poly(rng, m, opt.degree, opt.amplitude);
    for (auto& c : f.mu.c) c = detail::random_poly(rng, m, opt.degree, opt.amplitude);
    if (opt.closed_y0) {
      PolyForm beta(m, 1);
      for (auto& c : beta.c)
        c = detail::random_poly(rng, m, opt.degree, opt.amplitude);
      f.y0 = beta.exterior_derivative();
    } else {
      for (auto& c : f.y0.c) c = detail::random_poly(rng, m, opt.degree, opt.amplitude);
    }
    for (auto& c : f.z0.c) c = detail::random_poly(rng, m, opt.degree, opt.amplitude);
  }

  f.gauge.p = Polynomial(m);
  if (opt.with_gauge) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      f.gauge.p = detail::random_poly(rng, m, opt.degree, opt.amplitude, true);
      if (f.gauge.jet(Vector::Zero(m)).d1.cwiseAbs().maxCoeff() > 0.1) break;
    }
  }
  return f;
}

// ---- random matrix data for the fiberwise suites ----

inline Matrix random_spd(std::mt19937_64& rng, int n, double bump = 0.35) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = U(rng);
  return Matrix::Identity(n, n) + bump * 0.5 * (S + S.transpose());
}

inline Matrix random_symmetric(std::mt19937_64& rng, int n, double amp = 1.0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = U(rng);
  return amp * 0.5 * (S + S.transpose());
}

inline Matrix random_antisymmetric(std::mt19937_64& rng, int n, double amp = 1.0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = U(rng);
  return amp * 0.5 * (S - S.transpose());
}

inline Form random_form(std::mt19937_64& rng, int dim, int rank, double amp = 1.0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Form f(dim, rank);
  for (int s = 0; s < f.components(); ++s) f.raw(s) = amp * U(rng);
  return f;
}

inline oracle::Dense3 random_three_form_dense(std::mt19937_64& rng, int n,
                                              double amp = 1.0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  oracle::Dense3 H(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double v = amp * U(rng);
        H.at(i, j, k) = v;
        H.at(j, k, i) = v;
        H.at(k, i, j) = v;
        H.at(j, i, k) = -v;
        H.at(i, k, j) = -v;
        H.at(k, j, i) = -v;
      }
  return H;
}

}  // namespace grflow
