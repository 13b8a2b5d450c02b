#pragma once

// Levi-Civita geometry of the base from point-sampled derivative data:
// Christoffel symbols, the Ricci tensor, covariant Hessians, and the
// codifferential of basic forms. Derivative stacks are supplied by the
// caller (analytically or via finite differences); nothing here
// differentiates.

#include "grflow/forms.hpp"

#include <stdexcept>
#include <vector>

namespace grflow {

// Canonical slot for an unordered pair (k,l), k <= l, row-major upper triangle.
inline int sym_slot(int m, int k, int l) {
  if (k > l) std::swap(k, l);
  if (k < 0 || l >= m) throw std::invalid_argument("pair index out of range");
  return k * m - k * (k - 1) / 2 + (l - k);
}

inline int sym_slot_count(int m) { return m * (m + 1) / 2; }

// Scalar with first and second coordinate derivatives at a point.
struct ScalarJet {
  double value = 0.0;
  Vector d1;
  Matrix d2;

  static ScalarJet constant(int m, double v) {
    return {v, Vector::Zero(m), Matrix::Zero(m, m)};
  }
};

// p-form with coordinate derivatives of its components. d2 is optional (empty
// when only first derivatives are needed) and uses canonical (k<=l) slots.
struct FormJet {
  Form value;
  std::vector<Form> d1;
  std::vector<Form> d2;

  static FormJet zero(int m, int rank, bool with_d2 = true) {
    FormJet j;
    j.value = Form(m, rank);
    j.d1.assign(m, Form(m, rank));
    if (with_d2) j.d2.assign(sym_slot_count(m), Form(m, rank));
    return j;
  }

  const Form& d2at(int k, int l) const {
    return d2.at(sym_slot(value.dim(), k, l));
  }
  Form& d2at(int k, int l) { return d2.at(sym_slot(value.dim(), k, l)); }

  bool has_d2() const { return !d2.empty(); }
};

inline FormJet operator+(const FormJet& a, const FormJet& b) {
  FormJet r;
  r.value = a.value + b.value;
  for (size_t k = 0; k < a.d1.size(); ++k) r.d1.push_back(a.d1[k] + b.d1[k]);
  const size_t n2 = std::min(a.d2.size(), b.d2.size());
  for (size_t k = 0; k < n2; ++k) r.d2.push_back(a.d2[k] + b.d2[k]);
  return r;
}

inline FormJet operator-(const FormJet& a, const FormJet& b) {
  FormJet r;
  r.value = a.value - b.value;
  for (size_t k = 0; k < a.d1.size(); ++k) r.d1.push_back(a.d1[k] - b.d1[k]);
  const size_t n2 = std::min(a.d2.size(), b.d2.size());
  for (size_t k = 0; k < n2; ++k) r.d2.push_back(a.d2[k] - b.d2[k]);
  return r;
}

inline FormJet operator*(double s, const FormJet& a) {
  FormJet r = a;
  r.value *= s;
  for (auto& f : r.d1) f *= s;
  for (auto& f : r.d2) f *= s;
  return r;
}

// Wedge of two jets with the product rule applied to the derivative stacks.
inline FormJet wedge(const FormJet& a, const FormJet& b) {
  const int m = a.value.dim();
  FormJet r;
  r.value = wedge(a.value, b.value);
  r.d1.reserve(m);
  for (int k = 0; k < m; ++k)
    r.d1.push_back(wedge(a.d1[k], b.value) + wedge(a.value, b.d1[k]));
  if (a.has_d2() && b.has_d2()) {
    for (int k = 0; k < m; ++k)
      for (int l = k; l < m; ++l)
        r.d2.push_back(wedge(a.d2at(k, l), b.value) + wedge(a.d1[k], b.d1[l]) +
                       wedge(a.d1[l], b.d1[k]) + wedge(a.value, b.d2at(k, l)));
  }
  return r;
}

// Exterior derivative from the stored component derivatives:
// (dw)_{k0..kp} = sum_t (-1)^t d_{kt} w_{k0..^kt..kp}.
inline Form exterior_derivative_value(const FormJet& w) {
  const int m = w.value.dim();
  const int p = w.value.rank();
  if (p + 1 > 3) throw std::invalid_argument("unsupported form rank: d exceeds rank 3");
  Form out(m, p + 1);
  for (int so = 0; so < out.components(); ++so) {
    const auto K = out.tuple(so);
    double acc = 0.0;
    for (int t = 0; t <= p; ++t) {
      int rest[3];
      int n = 0;
      for (int u = 0; u <= p; ++u)
        if (u != t) rest[n++] = K[u];
      const double sgn = (t % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * w.d1[K[t]].component(rest, p);
    }
    out.raw(so) = acc;
  }
  return out;
}

// d of a jet, carrying first derivatives along (requires d2 of the input).
inline FormJet exterior_derivative_jet(const FormJet& w) {
  const int m = w.value.dim();
  if (!w.has_d2())
    throw std::invalid_argument("exterior derivative jet needs second derivatives");
  FormJet r;
  r.value = exterior_derivative_value(w);
  for (int k = 0; k < m; ++k) {
    FormJet shifted;
    shifted.value = w.d1[k];
    for (int l = 0; l < m; ++l) shifted.d1.push_back(w.d2at(k, l));
    r.d1.push_back(exterior_derivative_value(shifted));
  }
  return r;
}

// Metric with its first and second coordinate derivatives at a chart point.
struct BaseChartSample {
  BaseMetric h;
  std::vector<Matrix> dh;   // dh[k](i,j) = d_k h_ij
  std::vector<Matrix> d2h;  // canonical (k<=l) slots

  BaseChartSample(BaseMetric metric, std::vector<Matrix> dh_in,
                  std::vector<Matrix> d2h_in)
      : h(std::move(metric)), dh(std::move(dh_in)), d2h(std::move(d2h_in)) {
    const int m = h.dim();
    if (static_cast<int>(dh.size()) != m ||
        static_cast<int>(d2h.size()) != sym_slot_count(m))
      throw std::invalid_argument("metric derivative stack has wrong shape");
    for (const auto& M : dh) check_sym(M, m);
    for (const auto& M : d2h) check_sym(M, m);
  }

  static BaseChartSample flat(int m) {
    return BaseChartSample(BaseMetric(Matrix::Identity(m, m)),
                           std::vector<Matrix>(m, Matrix::Zero(m, m)),
                           std::vector<Matrix>(sym_slot_count(m), Matrix::Zero(m, m)));
  }

  const Matrix& d2(int k, int l) const { return d2h.at(sym_slot(h.dim(), k, l)); }
  int dim() const { return h.dim(); }

 private:
  static void check_sym(const Matrix& M, int m) {
    if (M.rows() != m || M.cols() != m)
      throw std::invalid_argument("metric derivative stack has wrong shape");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("metric derivative not symmetric in (i,j)");
  }
};

// Gamma^k_ij = 1/2 h^{kl} (d_i h_jl + d_j h_il - d_l h_ij), as out[k](i,j).
inline std::vector<Matrix> christoffel(const BaseChartSample& s) {
  const int m = s.dim();
  const Matrix& hinv = s.h.inv();
  std::vector<Matrix> out(m, Matrix::Zero(m, m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int l = 0; l < m; ++l)
          acc += hinv(k, l) * (s.dh[i](j, l) + s.dh[j](i, l) - s.dh[l](i, j));
        out[k](i, j) = 0.5 * acc;
      }
  return out;
}

// d_l Gamma^k_ij as out[l][k](i,j).
inline std::vector<std::vector<Matrix>> christoffel_derivative(
    const BaseChartSample& s) {
  const int m = s.dim();
  const Matrix& hinv = s.h.inv();
  std::vector<Matrix> dhinv(m);
  for (int l = 0; l < m; ++l) dhinv[l] = -hinv * s.dh[l] * hinv;
  std::vector<std::vector<Matrix>> out(m, std::vector<Matrix>(m, Matrix::Zero(m, m)));
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double acc = 0.0;
          for (int r = 0; r < m; ++r) {
            acc += dhinv[l](k, r) * (s.dh[i](j, r) + s.dh[j](i, r) - s.dh[r](i, j));
            acc += hinv(k, r) * (s.d2(l, i)(j, r) + s.d2(l, j)(i, r) - s.d2(l, r)(i, j));
          }
          out[l][k](i, j) = 0.5 * acc;
        }
  return out;
}

// Ricci tensor in a coordinate frame:
// R_ij = d_k Gamma^k_ij - d_i Gamma^k_kj - Gamma^u_kj Gamma^k_iu
//        + Gamma^u_ij Gamma^k_ku.
inline SymTwoTensor ricci_base(const BaseChartSample& s) {
  const int m = s.dim();
  const auto G = christoffel(s);
  const auto dG = christoffel_derivative(s);
  Matrix R = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) {
        acc += dG[k][k](i, j) - dG[i][k](k, j);
        for (int u = 0; u < m; ++u)
          acc += -G[u](k, j) * G[k](i, u) + G[u](i, j) * G[k](k, u);
      }
      R(i, j) = acc;
    }
  return R;
}

// Codifferential with the sign convention (d* w)_{j...} = -h^{kl} (D_k w)_{l j...}.
inline Form codiff(const FormJet& w, const BaseChartSample& s) {
  const int m = s.dim();
  const int p = w.value.rank();
  if (p < 1 || p > 3) throw std::invalid_argument("codiff supports ranks 1..3");
  if (static_cast<int>(w.d1.size()) != m)
    throw std::invalid_argument("form derivative stack has wrong shape");
  const auto G = christoffel(s);
  const Matrix& hinv = s.h.inv();
  Form out(m, p - 1);
  for (int so = 0; so < out.components(); ++so) {
    const auto J = out.tuple(so);
    double acc = 0.0;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        int idx[3] = {l, J[0], J[1]};
        double cov = w.d1[k].component(idx, p);
        for (int u = 0; u < m; ++u) {
          idx[0] = u;
          cov -= G[u](k, l) * w.value.component(idx, p);
        }
        idx[0] = l;
        for (int r = 1; r < p; ++r) {
          const int saved = idx[r];
          for (int u = 0; u < m; ++u) {
            idx[r] = u;
            cov -= G[u](k, saved) * w.value.component(idx, p);
          }
          idx[r] = saved;
        }
        acc += hinv(k, l) * cov;
      }
    out.raw(so) = -acc;
  }
  return out;
}

inline SymTwoTensor hessian_base(const ScalarJet& f, const BaseChartSample& s) {
  const int m = s.dim();
  const auto G = christoffel(s);
  Matrix H = f.d2;
  for (int k = 0; k < m; ++k) H -= G[k] * f.d1[k];
  return H;
}

inline double laplacian_base(const ScalarJet& f, const BaseChartSample& s) {
  return (s.h.inv() * hessian_base(f, s)).trace();
}

}  // namespace grflow
