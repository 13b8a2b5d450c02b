#pragma once

// Brute-force verification engines: Richardson-extrapolated central
// differences over callable chart fields, generic coordinate-frame tensor
// calculus on the full space, and dense index-loop contractions. Used as
// ground truth by the property suites. Deliberately self-contained: nothing
// here shares code with the closed-form modules.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace grflow::oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct FdOptions {
  double h0 = 1e-3;
  int depth = 1;              // Richardson levels beyond the base step
  double error_threshold = 1e-3;
};

using VectorField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;
using MetricField = std::function<Mat(const Vec&)>;

// Dense rank-3 array with no symmetry assumptions.
struct Dense3 {
  int d = 0;
  std::vector<double> a;

  Dense3() = default;
  explicit Dense3(int dim) : d(dim), a(static_cast<size_t>(dim) * dim * dim, 0.0) {}
  double& at(int i, int j, int k) { return a[(static_cast<size_t>(i) * d + j) * d + k]; }
  double at(int i, int j, int k) const {
    return a[(static_cast<size_t>(i) * d + j) * d + k];
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

using ThreeFormField = std::function<Dense3(const Vec&)>;

struct FdJet {
  Vec value;
  Mat d1;                    // (component, coordinate)
  std::vector<Mat> d2;       // per component, symmetric d x d
  double error_estimate = 0.0;
};

namespace detail {

inline double richardson_pair(double coarse, double fine) {
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace detail

// Central differences at steps h0/2^L combined through a Romberg table.
// The error estimate is the magnitude of the last extrapolation correction.
inline FdJet fd_derivatives(const VectorField& F, const Vec& p,
                            const FdOptions& opt = {}) {
  const int d = static_cast<int>(p.size());
  const Vec f0 = F(p);
  const int K = static_cast<int>(f0.size());
  const int levels = opt.depth + 1;

  std::vector<Mat> d1_raw(levels, Mat::Zero(K, d));
  std::vector<std::vector<Mat>> d2_raw(levels, std::vector<Mat>(K, Mat::Zero(d, d)));

  for (int L = 0; L < levels; ++L) {
    const double h = opt.h0 / std::pow(2.0, L);
    std::vector<Vec> plus(d), minus(d);
    for (int a = 0; a < d; ++a) {
      Vec e = Vec::Zero(d);
      e[a] = h;
      plus[a] = F(p + e);
      minus[a] = F(p - e);
    }
    for (int a = 0; a < d; ++a) {
      for (int c = 0; c < K; ++c) {
        d1_raw[L](c, a) = (plus[a][c] - minus[a][c]) / (2.0 * h);
        d2_raw[L][c](a, a) = (plus[a][c] - 2.0 * f0[c] + minus[a][c]) / (h * h);
      }
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        Vec ea = Vec::Zero(d), eb = Vec::Zero(d);
        ea[a] = h;
        eb[b] = h;
        const Vec fpp = F(p + ea + eb);
        const Vec fpm = F(p + ea - eb);
        const Vec fmp = F(p - ea + eb);
        const Vec fmm = F(p - ea - eb);
        for (int c = 0; c < K; ++c) {
          const double v = (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / (4.0 * h * h);
          d2_raw[L][c](a, b) = v;
          d2_raw[L][c](b, a) = v;
        }
      }
  }

  // Romberg in the step-halving parameter; central stencils have even error
  // expansions so each column gains two orders.
  auto romberg = [&](std::vector<Mat>& col) -> double {
    double last_corr = 0.0;
    for (int r = 1; r < levels; ++r) {
      const double w = std::pow(4.0, r);
      for (int L = levels - 1; L >= r; --L) {
        const Mat prev = col[L];
        col[L] = (w * col[L] - col[L - 1]) / (w - 1.0);
        if (L == levels - 1) last_corr = (col[L] - prev).cwiseAbs().maxCoeff();
      }
    }
    return last_corr;
  };

  FdJet out;
  out.value = f0;
  double err = 0.0;
  {
    std::vector<Mat> col = d1_raw;
    err = std::max(err, romberg(col));
    out.d1 = col[levels - 1];
  }
  out.d2.assign(K, Mat::Zero(d, d));
  for (int c = 0; c < K; ++c) {
    std::vector<Mat> col(levels);
    for (int L = 0; L < levels; ++L) col[L] = d2_raw[L][c];
    err = std::max(err, romberg(col));
    out.d2[c] = col[levels - 1];
  }
  out.error_estimate = err;
  if (err > opt.error_threshold)
    throw std::runtime_error("fd_derivatives: non-smooth or step too large");
  return out;
}

inline FdJet fd_scalar(const ScalarField& f, const Vec& p, const FdOptions& opt = {}) {
  return fd_derivatives([&](const Vec& x) { return Vec::Constant(1, f(x)); }, p, opt);
}

// ---- dense coordinate-frame tensor calculus ----

struct CoordinateTensors {
  Mat g, ginv;
  std::vector<Mat> dg;                     // dg[k](i,j)
  std::vector<Mat> gamma;                  // gamma[k](i,j) = Gamma^k_ij
  std::vector<std::vector<Mat>> dgamma;    // [l][k](i,j)
  Mat ricci;
};

// Everything from the 2-jet of the metric, by plain loops.
inline CoordinateTensors coordinate_tensors_from_jet(const Mat& g,
                                                     const std::vector<Mat>& dg,
                                                     const std::vector<std::vector<Mat>>& d2g) {
  const int d = static_cast<int>(g.rows());
  CoordinateTensors T;
  T.g = g;
  T.ginv = g.inverse();
  T.dg = dg;
  std::vector<Mat> dginv(d);
  for (int l = 0; l < d; ++l) dginv[l] = -T.ginv * dg[l] * T.ginv;

  T.gamma.assign(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int l = 0; l < d; ++l)
          acc += T.ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        T.gamma[k](i, j) = 0.5 * acc;
      }

  T.dgamma.assign(d, std::vector<Mat>(d, Mat::Zero(d, d)));
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double acc = 0.0;
          for (int r = 0; r < d; ++r) {
            acc += dginv[l](k, r) * (dg[i](j, r) + dg[j](i, r) - dg[r](i, j));
            acc += T.ginv(k, r) * (d2g[l][i](j, r) + d2g[l][j](i, r) - d2g[l][r](i, j));
          }
          T.dgamma[l][k](i, j) = 0.5 * acc;
        }

  T.ricci = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += T.dgamma[k][k](i, j) - T.dgamma[i][k](k, j);
        for (int u = 0; u < d; ++u)
          acc += -T.gamma[u](k, j) * T.gamma[k](i, u) + T.gamma[u](i, j) * T.gamma[k](k, u);
      }
      T.ricci(i, j) = acc;
    }
  return T;
}

inline CoordinateTensors coordinate_tensors(const MetricField& gf, const Vec& p,
                                            const FdOptions& opt = {}) {
  const int d = static_cast<int>(p.size());
  const auto jet = fd_derivatives(
      [&](const Vec& x) {
        const Mat g = gf(x);
        Vec flat(d * d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) flat[i * d + j] = g(i, j);
        return flat;
      },
      p, opt);
  Mat g(d, d);
  std::vector<Mat> dg(d, Mat::Zero(d, d));
  std::vector<std::vector<Mat>> d2g(d, std::vector<Mat>(d, Mat::Zero(d, d)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int c = i * d + j;
      g(i, j) = jet.value[c];
      for (int k = 0; k < d; ++k) dg[k](i, j) = jet.d1(c, k);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) d2g[k][l](i, j) = jet.d2[c](k, l);
    }
  return coordinate_tensors_from_jet(g, dg, d2g);
}

inline Mat full_ricci_fd(const MetricField& gf, const Vec& p, const FdOptions& opt = {}) {
  return coordinate_tensors(gf, p, opt).ricci;
}

// ---- dense contractions (test-side ground truth) ----

// Hsq_ij = g^{ab} g^{cd} H_iac H_jbd.
inline Mat hsq_dense(const Dense3& H, const Mat& ginv) {
  const int d = H.d;
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e)
              acc += ginv(a, b) * ginv(c, e) * H.at(i, a, c) * H.at(j, b, e);
      out(i, j) = acc;
    }
  return out;
}

// (d* H)_{ij} = -g^{ab} (d_a H_bij - Gamma^u_ab H_uij - Gamma^u_ai H_buj
//                        - Gamma^u_aj H_biu).
inline Mat dstar_dense(const Dense3& H, const std::vector<Dense3>& dH,
                       const CoordinateTensors& T) {
  const int d = H.d;
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double cov = dH[a].at(b, i, j);
          for (int u = 0; u < d; ++u) {
            cov -= T.gamma[u](a, b) * H.at(u, i, j);
            cov -= T.gamma[u](a, i) * H.at(b, u, j);
            cov -= T.gamma[u](a, j) * H.at(b, i, u);
          }
          acc += T.ginv(a, b) * cov;
        }
      out(i, j) = -acc;
    }
  return out;
}

inline Mat hessian_dense(const Vec& df, const Mat& d2f, const CoordinateTensors& T) {
  const int d = static_cast<int>(df.size());
  Mat out = d2f;
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j) -= T.gamma[k](i, j) * df[k];
  return out;
}

// (grad f . H)_{ij} = g^{ab} df_a H_bij.
inline Mat grad_contract_dense(const Vec& df, const Dense3& H,
                               const CoordinateTensors& T) {
  const int d = H.d;
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) acc += T.ginv(a, b) * df[a] * H.at(b, i, j);
      out(i, j) = acc;
    }
  return out;
}

// ---- anholonomic frame over an invariant chart ----
//
// Chart coordinate order is (y, x^1..x^m) with the circle direction first.
// The frame is (e_theta = d_y, e_i = d_i - A_i d_y) with A_i = g_{yi}/g_{yy},
// ordered (theta, 1..m) to match the coordinate order.

struct FrameBlocks {
  Mat bb;       // (e_i, e_j)
  Vec bf;       // (e_i, e_theta)
  double ff = 0.0;  // (e_theta, e_theta)
};

struct FrameChristoffels {
  std::vector<Mat> base;  // Gamma^k_ij
  Mat theta_ij;           // Gamma^theta_ij
  Mat mixed;              // mixed(k,i) = Gamma^k_{i theta}
  Vec fiber_up;           // Gamma^k_{theta theta}
  Vec fiber_theta;        // Gamma^theta_{i theta}
  double theta_theta_theta = 0.0;
};

struct FullSpaceReport {
  CoordinateTensors coord;
  Dense3 H;
  FrameBlocks ricci, hsq, dstar, hessian, grad_contract;
  FrameChristoffels christoffels;
  Vec A;        // connection components read from the metric
  Mat dA;       // dA(k,i) = d_k A_i
};

namespace detail {

inline Mat frame_matrix(const Vec& A) {
  const int m = static_cast<int>(A.size());
  Mat M = Mat::Zero(m + 1, m + 1);
  M(0, 0) = 1.0;  // e_theta = d_y
  for (int i = 0; i < m; ++i) {
    M(0, i + 1) = -A[i];  // e_i has coordinate components (-A_i, delta)
    M(i + 1, i + 1) = 1.0;
  }
  return M;
}

inline FrameBlocks to_blocks(const Mat& Tf, int m) {
  FrameBlocks B;
  B.bb = Tf.block(1, 1, m, m);
  B.bf = Vec(m);
  for (int i = 0; i < m; ++i) B.bf[i] = Tf(i + 1, 0);
  B.ff = Tf(0, 0);
  return B;
}

}  // namespace detail

inline Mat to_frame(const Mat& T_coord, const Vec& A) {
  const Mat M = detail::frame_matrix(A);
  return M.transpose() * T_coord * M;
}

// Connection coefficients in the frame via the transformation law
// Gamma'^c_ab = (M^-1)^c_n [ M_a^u d_u M_b^n + M_a^u M_b^v Gamma^n_uv ].
inline FrameChristoffels frame_christoffels(const CoordinateTensors& T, const Vec& A,
                                            const Mat& dA) {
  const int m = static_cast<int>(A.size());
  const int d = m + 1;
  const Mat M = detail::frame_matrix(A);
  const Mat Minv = M.inverse();

  // dM[u](n, b): coordinate derivative d_u of column b, component n. Only the
  // y-components of the base columns vary, through A.
  std::vector<Mat> dM(d, Mat::Zero(d, d));
  for (int u = 1; u < d; ++u)
    for (int b = 1; b < d; ++b) dM[u](0, b) = -dA(u - 1, b - 1);

  std::vector<Mat> Gf(d, Mat::Zero(d, d));  // Gf[c](a,b)
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double acc = 0.0;
        for (int n = 0; n < d; ++n) {
          double inner = 0.0;
          for (int u = 0; u < d; ++u) {
            inner += M(u, a) * dM[u](n, b);
            for (int v = 0; v < d; ++v)
              inner += M(u, a) * M(v, b) * T.gamma[n](u, v);
          }
          acc += Minv(c, n) * inner;
        }
        Gf[c](a, b) = acc;
      }

  FrameChristoffels F;
  F.base.assign(m, Mat::Zero(m, m));
  F.theta_ij = Mat::Zero(m, m);
  F.mixed = Mat::Zero(m, m);
  F.fiber_up = Vec::Zero(m);
  F.fiber_theta = Vec::Zero(m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) F.base[k](i, j) = Gf[k + 1](i + 1, j + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) F.theta_ij(i, j) = Gf[0](i + 1, j + 1);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) F.mixed(k, i) = Gf[k + 1](i + 1, 0);
  for (int k = 0; k < m; ++k) F.fiber_up[k] = Gf[k + 1](0, 0);
  for (int i = 0; i < m; ++i) F.fiber_theta[i] = Gf[0](i + 1, 0);
  F.theta_theta_theta = Gf[0](0, 0);
  return F;
}

// Full pipeline: coordinate FD tensors, then the frame transform.
inline FullSpaceReport oracle_full(const MetricField& gf, const ThreeFormField& Hf,
                                   const ScalarField& ff, const Vec& p,
                                   const FdOptions& opt = {}) {
  const int d = static_cast<int>(p.size());
  const int m = d - 1;
  FullSpaceReport R;
  try {
    R.coord = coordinate_tensors(gf, p, opt);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("oracle unreliable at this step size");
  }

  // H and its first derivatives
  R.H = Hf(p);
  std::vector<Dense3> dH(d, Dense3(d));
  {
    const auto jet = fd_derivatives(
        [&](const Vec& x) {
          const Dense3 h = Hf(x);
          return Eigen::Map<const Vec>(h.a.data(), static_cast<int>(h.a.size())).eval();
        },
        p, opt);
    for (int c = 0; c < static_cast<int>(R.H.a.size()); ++c)
      for (int k = 0; k < d; ++k) dH[k].a[c] = jet.d1(c, k);
  }

  const auto fjet = fd_scalar(ff, p, opt);
  const Vec df = fjet.d1.row(0).transpose();
  const Mat d2f = fjet.d2[0];

  R.A = Vec(m);
  R.dA = Mat::Zero(m, m);
  const double gyy = R.coord.g(0, 0);
  if (gyy <= 0.0) throw std::runtime_error("degenerate fiber");
  for (int i = 0; i < m; ++i) R.A[i] = R.coord.g(0, i + 1) / gyy;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      R.dA(k, i) = R.coord.dg[k + 1](0, i + 1) / gyy -
                   R.coord.g(0, i + 1) * R.coord.dg[k + 1](0, 0) / (gyy * gyy);

  R.ricci = detail::to_blocks(to_frame(R.coord.ricci, R.A), m);
  R.hsq = detail::to_blocks(to_frame(hsq_dense(R.H, R.coord.ginv), R.A), m);
  R.dstar = detail::to_blocks(to_frame(dstar_dense(R.H, dH, R.coord), R.A), m);
  R.hessian = detail::to_blocks(to_frame(hessian_dense(df, d2f, R.coord), R.A), m);
  R.grad_contract =
      detail::to_blocks(to_frame(grad_contract_dense(df, R.H, R.coord), R.A), m);
  R.christoffels = frame_christoffels(R.coord, R.A, R.dA);
  return R;
}

// Ricci directly in the frame, from the contraction with the commutator term
// R_bc = e_a G^a_bc - e_b G^a_ac - G^u_ac G^a_bu + G^u_bc G^a_au - C^u_ab G^a_uc.
// Frame derivatives of the connection coefficients are taken by (nested)
// central differences; this is an internal consistency check for the oracle.
inline Mat frame_ricci_contraction(const MetricField& gf, const Vec& p,
                                   const FdOptions& opt = {}) {
  const int d = static_cast<int>(p.size());
  const int m = d - 1;

  auto frame_gamma_flat = [&](const Vec& x) {
    const auto T = coordinate_tensors(gf, x, opt);
    Vec A(m);
    Mat dA = Mat::Zero(m, m);
    const double gyy = T.g(0, 0);
    for (int i = 0; i < m; ++i) A[i] = T.g(0, i + 1) / gyy;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        dA(k, i) = T.dg[k + 1](0, i + 1) / gyy -
                   T.g(0, i + 1) * T.dg[k + 1](0, 0) / (gyy * gyy);
    const auto F = frame_christoffels(T, A, dA);
    Vec flat(d * d * d);
    auto G = [&](int c, int a, int b) -> double {
      if (c == 0 && a > 0 && b > 0) return F.theta_ij(a - 1, b - 1);
      if (c > 0 && a > 0 && b > 0) return F.base[c - 1](a - 1, b - 1);
      if (c > 0 && a > 0 && b == 0) return F.mixed(c - 1, a - 1);
      if (c > 0 && a == 0 && b > 0) return F.mixed(c - 1, b - 1);
      if (c > 0 && a == 0 && b == 0) return F.fiber_up[c - 1];
      if (c == 0 && a > 0 && b == 0) return F.fiber_theta[a - 1];
      if (c == 0 && a == 0 && b > 0) return F.fiber_theta[b - 1];
      return F.theta_theta_theta;
    };
    for (int c = 0; c < d; ++c)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) flat[(c * d + a) * d + b] = G(c, a, b);
    return flat;
  };

  // e_i acts as d_i on invariant component functions; e_theta kills them.
  // Outer differences reuse the base coordinates only.
  const Vec gamma0_flat = frame_gamma_flat(p);
  std::vector<Vec> dgamma(d, Vec::Zero(d * d * d));
  for (int i = 1; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = opt.h0;
    const Vec gp = frame_gamma_flat(p + e);
    const Vec gm = frame_gamma_flat(p - e);
    Vec e2 = e / 2.0;
    const Vec gp2 = frame_gamma_flat(p + e2);
    const Vec gm2 = frame_gamma_flat(p - e2);
    const Vec coarse = (gp - gm) / (2.0 * opt.h0);
    const Vec fine = (gp2 - gm2) / opt.h0;
    dgamma[i] = (4.0 * fine - coarse) / 3.0;
  }

  auto G0 = [&](int c, int a, int b) { return gamma0_flat[(c * d + a) * d + b]; };
  auto dG = [&](int e, int c, int a, int b) { return dgamma[e][(c * d + a) * d + b]; };

  // frame commutators: [e_i, e_j] = -F_ij e_theta with F = dA
  const auto T0 = coordinate_tensors(gf, p, opt);
  Vec A(m);
  Mat dA = Mat::Zero(m, m);
  const double gyy = T0.g(0, 0);
  for (int i = 0; i < m; ++i) A[i] = T0.g(0, i + 1) / gyy;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      dA(k, i) = T0.dg[k + 1](0, i + 1) / gyy -
                 T0.g(0, i + 1) * T0.dg[k + 1](0, 0) / (gyy * gyy);
  auto C = [&](int u, int a, int b) -> double {
    if (u == 0 && a > 0 && b > 0) return -(dA(a - 1, b - 1) - dA(b - 1, a - 1));
    return 0.0;
  };

  Mat ric = Mat::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a) {
        acc += dG(a, a, b, c) - dG(b, a, a, c);
        for (int u = 0; u < d; ++u) {
          acc += -G0(u, a, c) * G0(a, b, u) + G0(u, b, c) * G0(a, a, u);
          acc -= C(u, a, b) * G0(a, u, c);
        }
      }
      ric(b, c) = acc;
    }
  return ric;
}

}  // namespace grflow::oracle
