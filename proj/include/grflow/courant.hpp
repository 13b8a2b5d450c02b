#pragma once

// Generalized-metric linear algebra over a fixed fiber T + T*: the neutral
// pairing J = [[0,I],[I,0]], the block endomorphism carried by a pair (g, b),
// +/- projections, the so(E) elements attached to symmetric/antisymmetric
// pairs, Bismut Ricci curvature, and the pointwise flow-equivalence check.
//
// Splitting bookkeeping: b measures the splitting against the background, so
// b = 0 puts the endomorphism in the bare block form [[0, g^-1], [g, 0]].
// At general b all (h,k) translation happens through conjugation by
// e^b = [[I,0],[b,I]].

#include "grflow/forms.hpp"

#include <stdexcept>
#include <utility>

namespace grflow {

namespace detail {

inline void require_square(const Matrix& M, int n, const char* what) {
  if (M.rows() != n || M.cols() != n) throw std::invalid_argument(what);
}

inline void require_symmetric(const Matrix& M, const char* what, double tol = 1e-10) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument(what);
}

inline void require_antisymmetric(const Matrix& M, const char* what,
                                  double tol = 1e-10) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M + M.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument(what);
}

}  // namespace detail

class GeneralizedMetric {
 public:
  GeneralizedMetric(Matrix g, Matrix b) : g_(std::move(g)), b_(std::move(b)) {
    n_ = static_cast<int>(g_.rows());
    detail::require_square(g_, n_, "metric must be square");
    detail::require_square(b_, n_, "two-form must match the metric size");
    detail::require_symmetric(g_, "metric must be symmetric");
    detail::require_antisymmetric(b_, "two-form must be antisymmetric");
    Eigen::LLT<Matrix> llt(g_);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("metric is not positive definite");
    ginv_ = g_.inverse();

    G_ = Matrix::Zero(2 * n_, 2 * n_);
    G_.block(0, 0, n_, n_) = -ginv_ * b_;
    G_.block(0, n_, n_, n_) = ginv_;
    G_.block(n_, 0, n_, n_) = g_ - b_ * ginv_ * b_;
    G_.block(n_, n_, n_, n_) = b_ * ginv_;
  }

  // Reads (g, b) back from an endomorphism in the splitting basis, through
  // g^-1 = pi G pi* and the graph splitting G pi* g = [[I],[b]].
  static GeneralizedMetric from_endomorphism(const Matrix& G) {
    const int n = static_cast<int>(G.rows()) / 2;
    if (G.rows() != 2 * n || G.cols() != 2 * n)
      throw std::invalid_argument("endomorphism must be 2n x 2n");
    const Matrix ginv = G.block(0, n, n, n);
    Eigen::LLT<Matrix> llt(ginv);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("endomorphism does not carry a positive metric");
    const Matrix g = ginv.inverse();
    const Matrix b = G.block(n, n, n, n) * g;
    return GeneralizedMetric(0.5 * (g + g.transpose()), 0.5 * (b - b.transpose()));
  }

  int n() const { return n_; }
  const Matrix& matrix() const { return G_; }
  const Matrix& g() const { return g_; }
  const Matrix& ginv() const { return ginv_; }
  const Matrix& b() const { return b_; }

  Matrix neutral_pairing() const {
    Matrix J = Matrix::Zero(2 * n_, 2 * n_);
    J.block(0, n_, n_, n_) = Matrix::Identity(n_, n_);
    J.block(n_, 0, n_, n_) = Matrix::Identity(n_, n_);
    return J;
  }

  std::pair<Matrix, Matrix> projections() const {
    const Matrix I = Matrix::Identity(2 * n_, 2 * n_);
    return {0.5 * (I + G_), 0.5 * (I - G_)};
  }

  Matrix exp_b() const {
    Matrix E = Matrix::Identity(2 * n_, 2 * n_);
    E.block(n_, 0, n_, n_) = b_;
    return E;
  }

  Matrix exp_minus_b() const {
    Matrix E = Matrix::Identity(2 * n_, 2 * n_);
    E.block(n_, 0, n_, n_) = -b_;
    return E;
  }

 private:
  int n_ = 0;
  Matrix g_, b_, ginv_, G_;
};

// so(E) element attached to (h, k) via the block matrix
// V = 1/2 [[-g^-1 h, -g^-1 k g^-1], [k, h g^-1]], translated to the metric's
// splitting by e^b conjugation.
inline Matrix lie_element(const Matrix& h, const Matrix& k, const GeneralizedMetric& G) {
  const int n = G.n();
  detail::require_square(h, n, "h must be n x n");
  detail::require_square(k, n, "k must be n x n");
  detail::require_symmetric(h, "h must be symmetric");
  detail::require_antisymmetric(k, "k must be antisymmetric");
  Matrix V = Matrix::Zero(2 * n, 2 * n);
  V.block(0, 0, n, n) = -0.5 * G.ginv() * h;
  V.block(0, n, n, n) = -0.5 * G.ginv() * k * G.ginv();
  V.block(n, 0, n, n) = 0.5 * k;
  V.block(n, n, n, n) = 0.5 * h * G.ginv();
  return G.exp_b() * V * G.exp_minus_b();
}

// Same element through the projector construction R = P- eta P+ - P+ eta* P-
// with eta = pi*(h+k)pi and the adjoint taken against the neutral pairing.
inline Matrix lie_element_projector(const Matrix& h, const Matrix& k,
                                    const GeneralizedMetric& G) {
  const int n = G.n();
  Matrix eta = Matrix::Zero(2 * n, 2 * n);
  eta.block(n, 0, n, n) = h + k;
  const Matrix J = G.neutral_pairing();
  const Matrix eta_star = J * eta.transpose() * J;
  const auto [Pp, Pm] = G.projections();
  return Pm * eta * Pp - Pp * eta_star * Pm;
}

// Reads (h, k) back from the bracket [V, G] in the b = 0 frame of G.
// Throws when the bracket is not of variation type.
inline std::pair<Matrix, Matrix> induced_variation(const GeneralizedMetric& G,
                                                   const Matrix& V,
                                                   double tol = 1e-8) {
  const int n = G.n();
  const Matrix B = G.exp_minus_b() * (V * G.matrix() - G.matrix() * V) * G.exp_b();
  const Matrix h = B.block(n, 0, n, n);
  const Matrix k = -G.g() * B.block(0, 0, n, n);
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  detail::require_symmetric(h, "bracket does not carry a symmetric metric rate", tol);
  detail::require_antisymmetric(k, "bracket does not carry an antisymmetric rate", tol);
  const double r12 =
      (B.block(0, n, n, n) + G.ginv() * h * G.ginv()).cwiseAbs().maxCoeff();
  const double r22 = (B.block(n, n, n, n) - k * G.ginv()).cwiseAbs().maxCoeff();
  if (r12 > tol * scale || r22 > tol * scale)
    throw std::invalid_argument("variation is not induced by an (h, k) pair");
  return {0.5 * (h + h.transpose()), 0.5 * (k - k.transpose())};
}

// Ric(LC connection +/- torsion) = Rc - 1/4 Hsq -/+ 1/2 dstarH.
inline Matrix bismut_ricci(const Matrix& Rc, const Matrix& Hsq, const Matrix& dstarH,
                           int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  detail::require_symmetric(Rc, "Ricci input must be symmetric");
  detail::require_symmetric(Hsq, "H^2 input must be symmetric");
  detail::require_antisymmetric(dstarH, "d*H input must be antisymmetric");
  return Rc - 0.25 * Hsq - 0.5 * sign * dstarH;
}

// The so(E) element attached to the minus-connection Ricci curvature.
inline Matrix generalized_ricci(const GeneralizedMetric& G, const Matrix& Rc,
                                const Matrix& Hsq, const Matrix& dstarH) {
  const Matrix ric_minus = bismut_ricci(Rc, Hsq, dstarH, -1);
  const Matrix h = 0.5 * (ric_minus + ric_minus.transpose());
  const Matrix k = 0.5 * (ric_minus - ric_minus.transpose());
  return lie_element_projector(h, k, G);
}

// Pointwise flow equivalence: the variation induced by -2 R must reproduce
// (-2 Rc + 1/2 Hsq, -dstarH). Returns the max-norm mismatch.
inline double verify_grf_equivalence(const Matrix& g, const Matrix& b, const Matrix& Rc,
                                     const Matrix& Hsq, const Matrix& dstarH) {
  const GeneralizedMetric G(g, b);
  const Matrix R = generalized_ricci(G, Rc, Hsq, dstarH);
  const auto [h, k] = induced_variation(G, -2.0 * R);
  const double r1 = (h - (-2.0 * Rc + 0.5 * Hsq)).cwiseAbs().maxCoeff();
  const double r2 = (k + dstarH).cwiseAbs().maxCoeff();
  return std::max(r1, r2);
}

// Connection coefficients of LC +/- 1/2 g^-1 H in a coordinate frame,
// out[c](i,j) = Gamma^c_ij +/- 1/2 g^{cl} H_ijl.
inline std::vector<Matrix> bismut_connection(const std::vector<Matrix>& gamma,
                                             const Form& H, const Matrix& g, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const int n = static_cast<int>(g.rows());
  if (H.rank() != 3 || H.dim() != n)
    throw std::invalid_argument("torsion form must be a rank-3 form on the fiber");
  const Matrix ginv = g.inverse();
  std::vector<Matrix> out(n, Matrix::Zero(n, n));
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double torsion = 0.0;
        for (int l = 0; l < n; ++l) torsion += ginv(c, l) * H(i, j, l);
        out[c](i, j) = gamma[c](i, j) + 0.5 * sign * torsion;
      }
  return out;
}

// Max-norm of g(T(e_i,e_j), e_k) -/+ H_ijk for the given connection.
inline double torsion_check(const std::vector<Matrix>& conn, const Form& H,
                            const Matrix& g, int sign) {
  const int n = static_cast<int>(g.rows());
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double t = 0.0;
        for (int l = 0; l < n; ++l) t += g(k, l) * (conn[l](i, j) - conn[l](j, i));
        r = std::max(r, std::abs(t - sign * H(i, j, k)));
      }
  return r;
}

}  // namespace grflow
