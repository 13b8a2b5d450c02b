#pragma once

// Pointwise exterior algebra on a low-dimensional tangent space: antisymmetric
// forms of rank 0..3 in canonical (strictly increasing index) storage, a
// positive-definite base metric with cached inverse, and the contraction
// operations built on them.
//
// Convention: inner products of p-forms contract ALL indices with no 1/p!
// normalization, i.e. <a,b> = a_{i1..ip} b_{j1..jp} h^{i1 j1} ... h^{ip jp}.
// Under this convention |dx^1 ^ dx^2|^2 = 2 for the Euclidean metric.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace grflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SymTwoTensor = Eigen::MatrixXd;

constexpr int kMaxBaseDim = 4;
// Internal forms may live on a fiber product (base + two circle directions).
constexpr int kMaxFormDim = 6;

constexpr int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(r);
}

namespace detail {

// Sign of the permutation sorting idx[0..r), or 0 on a repeated index.
inline int sort_sign(int* idx, int r) {
  int sign = 1;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) {
        std::swap(idx[i], idx[j]);
        sign = -sign;
      }
    }
  return sign;
}

// Canonical slot of a strictly increasing tuple; small ranks only, so a plain
// enumeration is fine.
inline int slot_of(int dim, int rank, const int* idx) {
  switch (rank) {
    case 0:
      return 0;
    case 1:
      return idx[0];
    case 2: {
      int s = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j, ++s)
          if (i == idx[0] && j == idx[1]) return s;
      break;
    }
    case 3: {
      int s = 0;
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
          for (int k = j + 1; k < dim; ++k, ++s)
            if (i == idx[0] && j == idx[1] && k == idx[2]) return s;
      break;
    }
    default:
      break;
  }
  throw std::invalid_argument("form index out of range");
}

inline std::array<int, 3> tuple_at(int dim, int rank, int slot) {
  std::array<int, 3> t{0, 0, 0};
  if (rank == 0) return t;
  if (rank == 1) {
    t[0] = slot;
    return t;
  }
  int s = 0;
  if (rank == 2) {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j, ++s)
        if (s == slot) return {i, j, 0};
  } else {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        for (int k = j + 1; k < dim; ++k, ++s)
          if (s == slot) return {i, j, k};
  }
  throw std::invalid_argument("form slot out of range");
}

}  // namespace detail

// Fully antisymmetric tensor of rank 0..3; only the strictly increasing
// component tuples are stored, everything else is recovered by sign on read.
class Form {
 public:
  Form() = default;

  Form(int dim, int rank) : dim_(dim), rank_(rank) {
    if (dim < 1 || dim > kMaxFormDim)
      throw std::invalid_argument("form dimension out of range");
    if (rank < 0 || rank > 3)
      throw std::invalid_argument("form rank out of range (0..3 supported)");
    c_.assign(binom(dim, rank), 0.0);
  }

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  int components() const { return static_cast<int>(c_.size()); }

  double raw(int slot) const { return c_.at(slot); }
  double& raw(int slot) { return c_.at(slot); }

  std::array<int, 3> tuple(int slot) const {
    return detail::tuple_at(dim_, rank_, slot);
  }

  double value() const {
    require_rank(0);
    return c_[0];
  }

  double operator()(int i) const {
    require_rank(1);
    bounds(i);
    return c_[i];
  }

  double operator()(int i, int j) const {
    require_rank(2);
    bounds(i);
    bounds(j);
    int idx[2] = {i, j};
    const int s = detail::sort_sign(idx, 2);
    return s == 0 ? 0.0 : s * c_[detail::slot_of(dim_, 2, idx)];
  }

  double operator()(int i, int j, int k) const {
    require_rank(3);
    bounds(i);
    bounds(j);
    bounds(k);
    int idx[3] = {i, j, k};
    const int s = detail::sort_sign(idx, 3);
    return s == 0 ? 0.0 : s * c_[detail::slot_of(dim_, 3, idx)];
  }

  double component(const int* idx, int rank) const {
    switch (rank) {
      case 0:
        return value();
      case 1:
        return (*this)(idx[0]);
      case 2:
        return (*this)(idx[0], idx[1]);
      case 3:
        return (*this)(idx[0], idx[1], idx[2]);
      default:
        throw std::invalid_argument("form rank out of range");
    }
  }

  void set(int i, double v) {
    require_rank(1);
    bounds(i);
    c_[i] = v;
  }

  void set(int i, int j, double v) {
    require_rank(2);
    int idx[2] = {i, j};
    const int s = detail::sort_sign(idx, 2);
    if (s == 0) {
      if (v != 0.0) throw std::invalid_argument("repeated index in form assignment");
      return;
    }
    c_[detail::slot_of(dim_, 2, idx)] = s * v;
  }

  void set(int i, int j, int k, double v) {
    require_rank(3);
    int idx[3] = {i, j, k};
    const int s = detail::sort_sign(idx, 3);
    if (s == 0) {
      if (v != 0.0) throw std::invalid_argument("repeated index in form assignment");
      return;
    }
    c_[detail::slot_of(dim_, 3, idx)] = s * v;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  Form& operator+=(const Form& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }

  Form& operator-=(const Form& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }

  Form& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(double s, Form a) { return a *= s; }
  friend Form operator*(Form a, double s) { return a *= s; }
  friend Form operator-(Form a) { return a *= -1.0; }

 private:
  void require_rank(int r) const {
    if (rank_ != r) throw std::invalid_argument("form rank mismatch");
  }
  void require_same(const Form& o) const {
    if (dim_ != o.dim_ || rank_ != o.rank_)
      throw std::invalid_argument("form shape mismatch");
  }
  void bounds(int i) const {
    if (i < 0 || i >= dim_) throw std::invalid_argument("form index out of range");
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<double> c_;
};

using OneForm = Form;
using TwoForm = Form;
using ThreeForm = Form;

inline OneForm one_form(const Vector& c) {
  OneForm a(static_cast<int>(c.size()), 1);
  for (int i = 0; i < c.size(); ++i) a.set(i, c[i]);
  return a;
}

inline Vector to_vector(const OneForm& a) {
  Vector v(a.dim());
  for (int i = 0; i < a.dim(); ++i) v[i] = a(i);
  return v;
}

// Positive-definite symmetric metric on the base tangent space, with its
// inverse computed once at construction.
class BaseMetric {
 public:
  explicit BaseMetric(Matrix h) : h_(std::move(h)) {
    const int m = static_cast<int>(h_.rows());
    if (h_.cols() != m || m < 1 || m > kMaxBaseDim)
      throw std::invalid_argument("base metric must be m x m with 1 <= m <= 4");
    const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
    if ((h_ - h_.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale)
      throw std::invalid_argument("base metric not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_);
    if (es.eigenvalues().minCoeff() <= 1e-12 * scale)
      throw std::runtime_error("degenerate base metric");
    hinv_ = h_.inverse();
  }

  int dim() const { return static_cast<int>(h_.rows()); }
  const Matrix& mat() const { return h_; }
  const Matrix& inv() const { return hinv_; }

 private:
  Matrix h_;
  Matrix hinv_;
};

namespace detail {

inline double subdet(const Matrix& M, const std::array<int, 3>& rows,
                     const std::array<int, 3>& cols, int p) {
  switch (p) {
    case 1:
      return M(rows[0], cols[0]);
    case 2:
      return M(rows[0], cols[0]) * M(rows[1], cols[1]) -
             M(rows[0], cols[1]) * M(rows[1], cols[0]);
    case 3: {
      double d = 0.0;
      d += M(rows[0], cols[0]) * (M(rows[1], cols[1]) * M(rows[2], cols[2]) -
                                  M(rows[1], cols[2]) * M(rows[2], cols[1]));
      d -= M(rows[0], cols[1]) * (M(rows[1], cols[0]) * M(rows[2], cols[2]) -
                                  M(rows[1], cols[2]) * M(rows[2], cols[0]));
      d += M(rows[0], cols[2]) * (M(rows[1], cols[0]) * M(rows[2], cols[1]) -
                                  M(rows[1], cols[1]) * M(rows[2], cols[0]));
      return d;
    }
    default:
      throw std::invalid_argument("form rank out of range");
  }
}

// out_I = sum_J a_J det(M[I, J]) over canonical tuples; with M = h^{-1} this
// raises all indices, with M = h it lowers them.
inline Form contract_all(const Form& a, const Matrix& M) {
  const int p = a.rank();
  if (p == 0) return a;
  Form out(a.dim(), p);
  for (int so = 0; so < out.components(); ++so) {
    const auto I = out.tuple(so);
    double acc = 0.0;
    for (int sa = 0; sa < a.components(); ++sa) {
      const auto J = a.tuple(sa);
      acc += a.raw(sa) * subdet(M, I, J, p);
    }
    out.raw(so) = acc;
  }
  return out;
}

constexpr double factorial(int p) { return p <= 1 ? 1.0 : p * factorial(p - 1); }

}  // namespace detail

// All-index contraction of two equal-rank forms (no 1/p! factor).
inline double inner(const Form& a, const Form& b, const BaseMetric& h) {
  if (a.rank() != b.rank() || a.dim() != b.dim())
    throw std::invalid_argument("inner product requires equal-rank forms");
  if (a.rank() < 1 || a.rank() > 3)
    throw std::invalid_argument("inner product supports ranks 1..3");
  if (a.dim() != h.dim()) throw std::invalid_argument("form/metric dimension mismatch");
  const Form ar = detail::contract_all(a, h.inv());
  double s = 0.0;
  for (int i = 0; i < ar.components(); ++i) s += ar.raw(i) * b.raw(i);
  return detail::factorial(a.rank()) * s;
}

// (v . w)_{j...} = v^i w_{i j...}; v carries contravariant components.
inline Form interior(const Vector& v, const Form& w) {
  if (w.rank() < 1)
    throw std::invalid_argument("interior product requires a form of rank >= 1");
  if (static_cast<int>(v.size()) != w.dim())
    throw std::invalid_argument("vector/form dimension mismatch");
  Form out(w.dim(), w.rank() - 1);
  for (int so = 0; so < out.components(); ++so) {
    const auto J = out.tuple(so);
    int idx[3] = {0, J[0], J[1]};
    double acc = 0.0;
    for (int i = 0; i < w.dim(); ++i) {
      idx[0] = i;
      acc += v[i] * w.component(idx, w.rank());
    }
    out.raw(so) = acc;
  }
  return out;
}

inline Form raise(const Form& a, const BaseMetric& h) {
  if (a.dim() != h.dim()) throw std::invalid_argument("form/metric dimension mismatch");
  return detail::contract_all(a, h.inv());
}

inline Form lower(const Form& a, const BaseMetric& h) {
  if (a.dim() != h.dim()) throw std::invalid_argument("form/metric dimension mismatch");
  return detail::contract_all(a, h.mat());
}

// Gradient components v^i = h^{ij} df_j.
inline Vector sharp(const Vector& df, const BaseMetric& h) {
  return h.inv() * df;
}

inline Form interior_sharp(const OneForm& a, const BaseMetric& h, const Form& w) {
  return interior(to_vector(raise(a, h)), w);
}

// Shuffle-convention wedge: (dx^1 ^ dx^2) has component +1 at (1,2).
inline Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("form dimension mismatch");
  const int p = a.rank(), q = b.rank();
  if (p + q > 3)
    throw std::invalid_argument("unsupported form rank: wedge degree exceeds 3");
  Form out(a.dim(), p + q);
  const int r = p + q;
  for (int so = 0; so < out.components(); ++so) {
    const auto K = out.tuple(so);
    double acc = 0.0;
    for (int mask = 0; mask < (1 << r); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != p) continue;
      int I[3], J[3];
      int ni = 0, nj = 0, inversions = 0;
      for (int t = 0; t < r; ++t) {
        if (mask & (1 << t)) {
          I[ni++] = K[t];
        } else {
          // every already-chosen I position located after this J position
          inversions += p - ni;
          J[nj++] = K[t];
        }
      }
      const double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
      acc += sign * a.component(I, p) * b.component(J, q);
    }
    out.raw(so) = acc;
  }
  return out;
}

}  // namespace grflow
