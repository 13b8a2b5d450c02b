#pragma once

// Circle-invariant geometry on an S^1 bundle over an m-dimensional base, in
// the anholonomic frame (e_i = d_i - A_i d_y, e_theta = d_y). Carries the
// decompositions of an invariant metric g = phi theta (x) theta + h, two-form
// b = theta ^ eta + mu and flux H = theta ^ Y + Z, the closed-form curvature
// and flux blocks, and the assembled flow right-hand side.
//
// Full-space matrices and forms order the chart coordinates (y, x^1..x^m)
// with the circle direction first. Mixed frame components are stored with the
// base index first, i.e. X_ib = X(e_i, e_theta).

#include "grflow/base_geometry.hpp"
#include "grflow/forms.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace grflow {

// Point sample of all decomposed invariant field data, with the derivative
// stacks every downstream operation needs. The connection enters as the
// potential of the metric connection in the chart, theta = dy + A_i dx^i.
// (y0, z0) decompose the background flux against that same connection; the
// total flux adds the contribution of (eta, mu).
struct InvariantSample {
  int m = 0;
  ScalarJet phi;        // fiber length^2, positive
  FormJet pot;          // A, rank 1, full 2-jet
  BaseChartSample base;
  FormJet eta;          // rank 1, full 2-jet
  FormJet mu;           // rank 2, full 2-jet
  FormJet y0;           // rank 2, value + d1
  FormJet z0;           // rank 3, value + d1
  ScalarJet gauge;      // gauge function f

  InvariantSample(int m_in, ScalarJet phi_in, FormJet pot_in, BaseChartSample base_in,
                  FormJet eta_in, FormJet mu_in, FormJet y0_in, FormJet z0_in,
                  ScalarJet gauge_in)
      : m(m_in),
        phi(std::move(phi_in)),
        pot(std::move(pot_in)),
        base(std::move(base_in)),
        eta(std::move(eta_in)),
        mu(std::move(mu_in)),
        y0(std::move(y0_in)),
        z0(std::move(z0_in)),
        gauge(std::move(gauge_in)) {
    validate();
  }

  static InvariantSample trivial_flat(int m) {
    return InvariantSample(m, ScalarJet::constant(m, 1.0), FormJet::zero(m, 1),
                           BaseChartSample::flat(m), FormJet::zero(m, 1),
                           FormJet::zero(m, 2), FormJet::zero(m, 2, false),
                           FormJet::zero(m, 3, false), ScalarJet::constant(m, 0.0));
  }

  void validate() const {
    if (m < 1 || m > kMaxBaseDim)
      throw std::invalid_argument("base dimension out of range");
    if (phi.value <= 0.0) throw std::runtime_error("degenerate fiber");
    if (base.dim() != m) throw std::invalid_argument("base chart dimension mismatch");
    auto check = [&](const FormJet& f, int rank, bool need_d2) {
      if (f.value.dim() != m || f.value.rank() != rank)
        throw std::invalid_argument("sample form has wrong shape");
      if (static_cast<int>(f.d1.size()) != m)
        throw std::invalid_argument("sample form derivative stack missing");
      if (need_d2 && !f.has_d2())
        throw std::invalid_argument("sample form second derivatives missing");
    };
    check(pot, 1, true);
    check(eta, 1, true);
    check(mu, 2, true);
    check(y0, 2, false);
    check(z0, 3, false);
  }
};

// ---- decompositions of full-space data ----

struct DecomposedMetric {
  double phi;
  OneForm a;      // connection offset against the chart reference dy
  BaseMetric h;
};

inline DecomposedMetric decompose_metric(const Matrix& g) {
  const int d = static_cast<int>(g.rows());
  if (g.cols() != d || d < 2)
    throw std::invalid_argument("full metric must be (m+1) x (m+1)");
  const int m = d - 1;
  const double phi = g(0, 0);
  if (phi <= 0.0) throw std::runtime_error("degenerate fiber");
  OneForm a(m, 1);
  for (int i = 0; i < m; ++i) a.set(i, g(0, i + 1) / phi);
  Matrix h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = g(i + 1, j + 1) - phi * a(i) * a(j);
  return {phi, a, BaseMetric(h)};
}

inline Matrix assemble_metric(const DecomposedMetric& dm) {
  const int m = dm.h.dim();
  Matrix g(m + 1, m + 1);
  g(0, 0) = dm.phi;
  for (int i = 0; i < m; ++i) {
    g(0, i + 1) = dm.phi * dm.a(i);
    g(i + 1, 0) = g(0, i + 1);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g(i + 1, j + 1) = dm.h.mat()(i, j) + dm.phi * dm.a(i) * dm.a(j);
  return g;
}

// b = theta ^ eta + mu with both pieces basic for the connection dy + A.
inline std::pair<OneForm, TwoForm> decompose_two_form(const Matrix& b, const OneForm& A) {
  const int d = static_cast<int>(b.rows());
  const int m = d - 1;
  if (b.cols() != d || A.dim() != m)
    throw std::invalid_argument("two-form/connection shape mismatch");
  OneForm eta(m, 1);
  for (int i = 0; i < m; ++i) eta.set(i, b(0, i + 1));
  TwoForm mu(m, 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      mu.set(i, j, b(i + 1, j + 1) - A(i) * eta(j) + A(j) * eta(i));
  return {eta, mu};
}

inline Matrix assemble_two_form(const OneForm& eta, const TwoForm& mu, const OneForm& A) {
  const int m = eta.dim();
  Matrix b = Matrix::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    b(0, i + 1) = eta(i);
    b(i + 1, 0) = -eta(i);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      b(i + 1, j + 1) = mu(i, j) + A(i) * eta(j) - A(j) * eta(i);
  return b;
}

inline std::pair<TwoForm, ThreeForm> decompose_three_form(const Form& H, const OneForm& A) {
  if (H.rank() != 3) throw std::invalid_argument("flux must have rank 3");
  const int m = H.dim() - 1;
  if (A.dim() != m) throw std::invalid_argument("flux/connection shape mismatch");
  TwoForm Y(m, 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) Y.set(i, j, H(0, i + 1, j + 1));
  ThreeForm Z(m, 3);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        Z.set(i, j, k,
              H(i + 1, j + 1, k + 1) - A(i) * Y(j, k) + A(j) * Y(i, k) - A(k) * Y(i, j));
  return {Y, Z};
}

inline Form assemble_three_form(const TwoForm& Y, const ThreeForm& Z, const OneForm& A) {
  const int m = Y.dim();
  Form H(m + 1, 3);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) H.set(0, i + 1, j + 1, Y(i, j));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        H.set(i + 1, j + 1, k + 1,
              Z(i, j, k) + A(i) * Y(j, k) - A(j) * Y(i, k) + A(k) * Y(i, j));
  return H;
}

// ---- derived field data ----

// Curvature F = dA with its first derivatives.
inline FormJet curvature(const InvariantSample& s) {
  return exterior_derivative_jet(s.pot);
}

// Total flux decomposition: Y = y0 - d eta, Z = z0 + F ^ eta + d mu.
inline std::pair<FormJet, FormJet> flux(const InvariantSample& s) {
  const FormJet deta = exterior_derivative_jet(s.eta);
  FormJet Y = s.y0 - deta;

  const FormJet F = curvature(s);
  const FormJet dmu = exterior_derivative_jet(s.mu);
  FormJet Z = s.z0 + wedge(F, s.eta) + dmu;
  return {std::move(Y), std::move(Z)};
}

// ---- closed-form frame blocks ----

struct KKChristoffels {
  std::vector<Matrix> base;  // Gamma^k_ij
  Matrix theta_ij;           // Gamma^theta_ij = -1/2 F_ij
  Matrix mixed;              // mixed(k,i) = Gamma^k_{i theta} = phi/2 h^{kl} F_il
  Vector fiber_up;           // Gamma^k_{theta theta} = -1/2 grad^k phi
  Vector fiber_theta;        // Gamma^theta_{i theta} = 1/(2 phi) d_i phi
};

inline KKChristoffels kk_christoffels(const InvariantSample& s) {
  if (s.phi.value <= 0.0) throw std::runtime_error("degenerate fiber");
  const int m = s.m;
  const FormJet F = curvature(s);
  const Matrix& hinv = s.base.h.inv();
  KKChristoffels out;
  out.base = christoffel(s.base);
  out.theta_ij = Matrix::Zero(m, m);
  out.mixed = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.theta_ij(i, j) = -0.5 * F.value(i, j);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc += hinv(k, l) * F.value(i, l);
      out.mixed(k, i) = 0.5 * s.phi.value * acc;
    }
  out.fiber_up = -0.5 * (hinv * s.phi.d1);
  out.fiber_theta = s.phi.d1 / (2.0 * s.phi.value);
  return out;
}

struct KKRicci {
  SymTwoTensor rij;
  Vector ritheta;  // R(e_i, e_theta)
  double rthth = 0.0;
};

// R_ij   = ^h R_ij - phi/2 FF_ij - 1/(2 phi) Hess_ij phi
//          + 1/(4 phi^2) d_i phi d_j phi,           FF_ij = h^{kl} F_ik F_jl
// R_ib   = phi/2 (d*_h F)_i - 3/4 (grad phi . F)_i
// R_bb   = -1/2 Lap phi + 1/(4 phi) |d phi|^2 + phi^2/4 |F|^2
inline KKRicci kk_ricci(const InvariantSample& s) {
  if (s.phi.value <= 0.0) throw std::runtime_error("degenerate fiber");
  const int m = s.m;
  const double phi = s.phi.value;
  const FormJet F = curvature(s);
  const Matrix& hinv = s.base.h.inv();

  Matrix FF = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) acc += hinv(k, l) * F.value(i, k) * F.value(j, l);
      FF(i, j) = acc;
    }

  const Matrix hess_phi = hessian_base(s.phi, s.base);
  const double lap_phi = (hinv * hess_phi).trace();
  const Vector grad_phi = hinv * s.phi.d1;
  const double grad_phi_sq = s.phi.d1.dot(grad_phi);

  KKRicci out;
  out.rij = ricci_base(s.base) - 0.5 * phi * FF - hess_phi / (2.0 * phi);
  out.rij += (s.phi.d1 * s.phi.d1.transpose()) / (4.0 * phi * phi);

  const Form dstarF = codiff(F, s.base);
  const Form gradphi_F = interior(grad_phi, F.value);
  out.ritheta = Vector(m);
  for (int i = 0; i < m; ++i)
    out.ritheta[i] = 0.5 * phi * dstarF(i) - 0.75 * gradphi_F(i);

  const double F_sq = inner(F.value, F.value, s.base.h);
  out.rthth = -0.5 * lap_phi + grad_phi_sq / (4.0 * phi) + 0.25 * phi * phi * F_sq;
  return out;
}

struct HSquared {
  SymTwoTensor hij;
  Vector hitheta;  // (e_i, e_theta)
  double hthth = 0.0;
};

// HH_ij = 2/phi YY_ij + ZZ_ij, HH_ib = <e_i . Z, Y>, HH_bb = |Y|^2.
inline HSquared h_squared(const InvariantSample& s) {
  if (s.phi.value <= 0.0) throw std::runtime_error("degenerate fiber");
  const int m = s.m;
  const auto [Y, Z] = flux(s);
  const Matrix& hinv = s.base.h.inv();

  HSquared out;
  out.hij = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double yy = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) yy += hinv(k, l) * Y.value(i, k) * Y.value(j, l);
      double zz = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          for (int u = 0; u < m; ++u)
            for (int v = 0; v < m; ++v)
              zz += hinv(k, l) * hinv(u, v) * Z.value(i, k, u) * Z.value(j, l, v);
      out.hij(i, j) = 2.0 / s.phi.value * yy + zz;
    }

  out.hitheta = Vector(m);
  Vector ei = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    out.hitheta[i] = inner(interior(ei, Z.value), Y.value, s.base.h);
  }
  out.hthth = inner(Y.value, Y.value, s.base.h);
  return out;
}

struct CodiffH {
  Vector itheta;  // (d*_g H)(e_i, e_theta)
  TwoForm ij;     // (d*_g H)(e_i, e_j)
};

// (d*_g H)_ib = (d*_h Y)_i - phi/2 <e_i . Z, F> + 1/(2 phi) (grad phi . Y)_i
// (d*_g H)_ij = (d*_h Z)_ij - 1/(2 phi) (grad phi . Z)_ij
inline CodiffH codiff_H(const InvariantSample& s) {
  if (s.phi.value <= 0.0) throw std::runtime_error("degenerate fiber");
  const int m = s.m;
  const double phi = s.phi.value;
  const auto [Y, Z] = flux(s);
  const FormJet F = curvature(s);
  const Vector grad_phi = s.base.h.inv() * s.phi.d1;

  CodiffH out;
  const Form dstarY = codiff(Y, s.base);
  const Form gphi_Y = interior(grad_phi, Y.value);
  out.itheta = Vector(m);
  Vector ei = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    const double eiZ_F = inner(interior(ei, Z.value), F.value, s.base.h);
    out.itheta[i] = dstarY(i) - 0.5 * phi * eiZ_F + gphi_Y(i) / (2.0 * phi);
  }

  if (m >= 2) {
    const Form dstarZ = codiff(Z, s.base);
    const Form gphi_Z = interior(grad_phi, Z.value);
    out.ij = dstarZ - gphi_Z * (1.0 / (2.0 * phi));
  } else {
    out.ij = TwoForm(m, 2);
  }
  return out;
}

struct FrameSymTensor {
  Matrix bb;
  Vector bf;  // (e_i, e_theta)
  double ff = 0.0;
};

// Hess_ij f = base Hessian; Hess_ib f = phi/2 (grad f . F)_i;
// Hess_bb f = 1/2 <grad phi, grad f>.
inline FrameSymTensor hessian_full(const InvariantSample& s, const ScalarJet& f) {
  const int m = s.m;
  const FormJet F = curvature(s);
  const Vector grad_f = s.base.h.inv() * f.d1;
  FrameSymTensor out;
  out.bb = hessian_base(f, s.base);
  const Form gf_F = interior(grad_f, F.value);
  out.bf = Vector(m);
  for (int i = 0; i < m; ++i) out.bf[i] = 0.5 * s.phi.value * gf_F(i);
  out.ff = 0.5 * s.phi.d1.dot(grad_f);
  return out;
}

// (grad f . H) restricted to the frame: (., e_theta) gives grad f . Y and the
// basic part gives grad f . Z.
inline std::pair<OneForm, TwoForm> grad_contract_H(const InvariantSample& s,
                                                   const ScalarJet& f) {
  const auto [Y, Z] = flux(s);
  const Vector grad_f = s.base.h.inv() * f.d1;
  return {interior(grad_f, Y.value), interior(grad_f, Z.value)};
}

struct FrameTwoForm {
  TwoForm bb;
  Vector itheta;  // X(e_i, e_theta)
};

struct FlowTensors {
  FrameSymTensor k;  // metric rate
  FrameTwoForm c;    // two-form rate
};

// k = -2 Ric + 1/2 Hsq + 2 Hess f and c = -d*_g H + grad f . H, all in frame
// components with the sample's own gauge function.
inline FlowTensors flow_tensors(const InvariantSample& s) {
  const KKRicci ric = kk_ricci(s);
  const HSquared hsq = h_squared(s);
  const FrameSymTensor hess = hessian_full(s, s.gauge);
  const CodiffH dstar = codiff_H(s);
  const auto [gY, gZ] = grad_contract_H(s, s.gauge);

  FlowTensors t;
  t.k.bb = -2.0 * ric.rij + 0.5 * hsq.hij + 2.0 * hess.bb;
  t.k.bf = -2.0 * ric.ritheta + 0.5 * hsq.hitheta + 2.0 * hess.bf;
  t.k.ff = -2.0 * ric.rthth + 0.5 * hsq.hthth + 2.0 * hess.ff;
  t.c.bb = -dstar.ij + gZ;
  t.c.itheta = Vector(s.m);
  for (int i = 0; i < s.m; ++i) t.c.itheta[i] = -dstar.itheta[i] + gY(i);
  return t;
}

// Rates of the five decomposed components induced by (k, c):
// phi' = k(e_th, e_th), a' = k(e_th, .)/phi, h' = k restricted,
// eta' = e_th . c, mu' = basic part of c minus a' ^ eta.
struct FlowRate {
  double dphi = 0.0;
  Vector da;
  SymTwoTensor dh;
  Vector deta;
  TwoForm dmu;
};

inline FlowRate flow_rhs(const InvariantSample& s) {
  const FlowTensors t = flow_tensors(s);
  FlowRate r;
  r.dphi = t.k.ff;
  r.da = t.k.bf / s.phi.value;
  r.dh = t.k.bb;
  r.deta = -t.c.itheta;  // (e_theta . c)_i = c(e_theta, e_i)
  OneForm da_form = one_form(r.da);
  OneForm eta_form = s.eta.value;
  r.dmu = t.c.bb - wedge(da_form, eta_form);
  return r;
}

// The fiber component of the flow in closed form, used as a cross-check on
// the generic composition:
// phi' = Lap phi - |d phi|^2/(2 phi) - phi^2 |F|^2 / 2 + |Y|^2 / 2
//        + <grad phi, grad f>.
inline double flow_phi_rate_explicit(const InvariantSample& s) {
  const double phi = s.phi.value;
  const FormJet F = curvature(s);
  const auto [Y, Z] = flux(s);
  const Vector grad_phi = s.base.h.inv() * s.phi.d1;
  const double lap = laplacian_base(s.phi, s.base);
  const double gp2 = s.phi.d1.dot(grad_phi);
  const double F2 = inner(F.value, F.value, s.base.h);
  const double Y2 = inner(Y.value, Y.value, s.base.h);
  return lap - gp2 / (2.0 * phi) - 0.5 * phi * phi * F2 + 0.5 * Y2 +
         s.gauge.d1.dot(grad_phi);
}

// Same for the connection rate:
// a'_i = -(d*_h F)_i + 3/(2 phi) (grad phi . F)_i + 1/(2 phi) <e_i . Z, Y>
//        + (grad f . F)_i.
inline Vector flow_connection_rate_explicit(const InvariantSample& s) {
  const int m = s.m;
  const double phi = s.phi.value;
  const FormJet F = curvature(s);
  const auto [Y, Z] = flux(s);
  const Vector grad_phi = s.base.h.inv() * s.phi.d1;
  const Vector grad_f = s.base.h.inv() * s.gauge.d1;
  const Form dstarF = codiff(F, s.base);
  const Form gp_F = interior(grad_phi, F.value);
  const Form gf_F = interior(grad_f, F.value);
  Vector out(m);
  Vector ei = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    const double eiZ_Y = inner(interior(ei, Z.value), Y.value, s.base.h);
    out[i] = -dstarF(i) + 1.5 * gp_F(i) / phi + 0.5 * eiZ_Y / phi + gf_F(i);
  }
  return out;
}

}  // namespace grflow
