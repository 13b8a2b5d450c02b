#pragma once

// The Buscher transform on circle-invariant data and the machinery to verify
// that it commutes with the flow: dual-sample construction at the jet level,
// the variation rules of the dualized components, the flux relations between
// the two sides, and the fiber-product consistency identity.
//
// Canonical variables are (phi, a, h, eta, mu) with a the connection offset
// against a reference; the transform reads
//   phi -> 1/phi,  a -> eta,  eta -> a,  h -> h,  mu -> mu - eta ^ a.
// References enter only through their curvature; a chart reference dy (zero
// reference curvature) is the default.

#include "grflow/base_geometry.hpp"
#include "grflow/circle_bundle.hpp"
#include "grflow/forms.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace grflow {

struct DecomposedConfig {
  double phi = 1.0;
  OneForm a;
  Matrix h;
  OneForm eta;
  TwoForm mu;
};

inline DecomposedConfig dualize(const DecomposedConfig& d) {
  if (d.phi <= 0.0) throw std::runtime_error("degenerate fiber");
  DecomposedConfig out;
  out.phi = 1.0 / d.phi;
  out.a = d.eta;
  out.h = d.h;
  out.eta = d.a;
  out.mu = d.mu - wedge(d.eta, d.a);
  return out;
}

// Component layout of the derived coefficient view:
//   g = g0 theta (x) theta + g1 (x) theta + theta (x) g1 + g2
//   b = b1 ^ theta + b2
struct BuscherComponents {
  double g0 = 1.0;
  OneForm g1;
  Matrix g2;
  OneForm b1;
  TwoForm b2;
};

inline DecomposedConfig to_canonical(const BuscherComponents& c) {
  if (c.g0 <= 0.0) throw std::runtime_error("degenerate fiber");
  const int m = c.g1.dim();
  DecomposedConfig d;
  d.phi = c.g0;
  d.a = c.g1 * (1.0 / c.g0);
  d.h = c.g2;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d.h(i, j) -= c.g1(i) * c.g1(j) / c.g0;
  d.eta = -c.b1;
  d.mu = c.b2 + wedge(d.a, c.b1);
  return d;
}

inline BuscherComponents from_canonical(const DecomposedConfig& d) {
  const int m = d.a.dim();
  BuscherComponents c;
  c.g0 = d.phi;
  c.g1 = d.a * d.phi;
  c.g2 = d.h;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) c.g2(i, j) += d.phi * d.a(i) * d.a(j);
  c.b1 = -d.eta;
  c.b2 = d.mu + wedge(d.a, d.eta);
  return c;
}

// Buscher rules as the composition decompose -> dualize -> assemble.
inline BuscherComponents buscher(const BuscherComponents& c) {
  return from_canonical(dualize(to_canonical(c)));
}

// Quadratic (radial-gauge) jet of a potential with the prescribed curvature
// 1-jet. Requires the jet to be closed at the point.
inline FormJet potential_jet_from_curvature(const Form& F, const std::vector<Form>& dF,
                                            double tol = 1e-10) {
  const int m = F.dim();
  if (F.rank() != 2 || static_cast<int>(dF.size()) != m)
    throw std::invalid_argument("curvature jet has wrong shape");
  double scale = std::max(1.0, F.max_abs());
  for (const auto& f : dF) scale = std::max(scale, f.max_abs());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c) {
        const double dFabc = dF[a](b, c) - dF[b](a, c) + dF[c](a, b);
        if (std::abs(dFabc) > tol * scale)
          throw std::invalid_argument("curvature jet is not closed at the point");
      }

  FormJet A = FormJet::zero(m, 1);
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i) A.d1[l].set(i, -0.5 * F(i, l));
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l)
      for (int i = 0; i < m; ++i)
        A.d2at(k, l).set(i, -(dF[l](i, k) + dF[k](i, l)) / 3.0);
  return A;
}

namespace detail {

inline ScalarJet reciprocal_jet(const ScalarJet& p) {
  const double v = p.value;
  ScalarJet out;
  out.value = 1.0 / v;
  out.d1 = -p.d1 / (v * v);
  out.d2 = -p.d2 / (v * v) + 2.0 * (p.d1 * p.d1.transpose()) / (v * v * v);
  return out;
}

inline ScalarJet log_shift_jet(const ScalarJet& f, const ScalarJet& phi) {
  const double v = phi.value;
  ScalarJet out;
  out.value = f.value + std::log(v);
  out.d1 = f.d1 + phi.d1 / v;
  out.d2 = f.d2 + phi.d2 / v - (phi.d1 * phi.d1.transpose()) / (v * v);
  return out;
}

inline FormJet truncate_to_d1(const FormJet& f) {
  FormJet out;
  out.value = f.value;
  out.d1 = f.d1;
  return out;
}

}  // namespace detail

// A primal sample together with its T-dual and the offset of the primal
// connection against the duality reference.
struct TDualPair {
  InvariantSample primal;
  InvariantSample dual;
  FormJet offset;  // a = theta_g - theta_ref as a jet
};

// Builds the T-dual sample of s. The primal reference connection enters only
// through its curvature jet; when absent the chart reference dy is used, so
// the offset is the full potential. The dual reference curvature is -y0 and
// the dual background flux becomes (-F_ref, z0 + F_ref ^ eta + y0 ^ a).
// The dual gauge function is f + log phi unless omit_dilaton is set.
inline TDualPair make_dual_pair(const InvariantSample& s,
                                const FormJet* reference_curvature = nullptr,
                                bool omit_dilaton = false) {
  const int m = s.m;

  FormJet Fref = FormJet::zero(m, 2, false);
  FormJet offset = s.pot;
  if (reference_curvature) {
    Fref = detail::truncate_to_d1(*reference_curvature);
    const FormJet Aref = potential_jet_from_curvature(Fref.value, Fref.d1);
    offset = s.pot - Aref;
  }

  // dual metric connection: reference with curvature -y0, shifted by eta
  FormJet Fbar_ref;
  Fbar_ref.value = -1.0 * s.y0.value;
  for (int k = 0; k < m; ++k) Fbar_ref.d1.push_back(-1.0 * s.y0.d1[k]);
  const FormJet Abar_ref = potential_jet_from_curvature(Fbar_ref.value, Fbar_ref.d1);
  FormJet pot_bar = Abar_ref + s.eta;

  const ScalarJet phi_bar = detail::reciprocal_jet(s.phi);
  const FormJet eta_bar = offset;
  const FormJet mu_bar = s.mu - wedge(s.eta, offset);

  FormJet y0_bar;
  y0_bar.value = -1.0 * Fref.value;
  for (int k = 0; k < m; ++k) y0_bar.d1.push_back(-1.0 * Fref.d1[k]);

  const FormJet z0_bar = s.z0 + detail::truncate_to_d1(wedge(Fref, s.eta)) +
                         detail::truncate_to_d1(wedge(s.y0, offset));

  const ScalarJet gauge_bar =
      omit_dilaton ? s.gauge : detail::log_shift_jet(s.gauge, s.phi);

  InvariantSample dual(m, phi_bar, std::move(pot_bar), s.base, eta_bar, mu_bar,
                       y0_bar, z0_bar, gauge_bar);
  return {s, std::move(dual), std::move(offset)};
}

// Rates of the dualized components induced by a primal variation (k, c):
//   phi_bar' = -k(e_th,e_th)/phi^2     theta_bar' = e_th . c
//   h_bar'   = k restricted            eta_bar'   = k(e_th, .)/phi
//   mu_bar'  = basic part of c + eta_bar ^ (e_th . c)
struct DualRates {
  double dphi = 0.0;
  Vector da;
  SymTwoTensor dh;
  Vector deta;
  TwoForm dmu;
};

inline DualRates dual_variation(const FrameSymTensor& k, const FrameTwoForm& c,
                                double phi, const OneForm& eta_bar) {
  DualRates r;
  r.dphi = -k.ff / (phi * phi);
  r.da = -c.itheta;  // (e_theta . c)_i = -c(e_i, e_theta)
  r.dh = k.bb;
  r.deta = k.bf / phi;
  const OneForm theta_c = one_form(r.da);
  r.dmu = c.bb + wedge(eta_bar, theta_c);
  return r;
}

struct CommutationResiduals {
  double phi = 0.0, a = 0.0, h = 0.0, eta = 0.0, mu = 0.0;
  double max() const { return std::max({phi, a, h, eta, mu}); }
};

// Pointwise commutation of dualization with the flow: the primal flow rates
// pushed through dual_variation must equal the intrinsic flow rates of the
// dual sample evaluated with the shifted gauge.
inline CommutationResiduals commutation_check(const InvariantSample& s,
                                              bool omit_dilaton = false,
                                              const FormJet* reference_curvature = nullptr) {
  const TDualPair pair = make_dual_pair(s, reference_curvature, omit_dilaton);

  const FlowTensors t = flow_tensors(pair.primal);
  const DualRates pushed =
      dual_variation(t.k, t.c, s.phi.value, pair.offset.value);

  const FlowRate intrinsic = flow_rhs(pair.dual);

  CommutationResiduals res;
  res.phi = std::abs(pushed.dphi - intrinsic.dphi);
  res.a = (pushed.da - intrinsic.da).cwiseAbs().maxCoeff();
  res.h = (pushed.dh - intrinsic.dh).cwiseAbs().maxCoeff();
  res.eta = (pushed.deta - intrinsic.deta).cwiseAbs().maxCoeff();
  res.mu = (pushed.dmu - intrinsic.dmu).max_abs();
  return res;
}

struct FluxRelationResiduals {
  double z = 0.0;        // Z = Z_bar
  double y_primal = 0.0; // Y = -F_bar
  double y_dual = 0.0;   // Y_bar = -F
  double max() const { return std::max({z, y_primal, y_dual}); }
};

// The three flux identities tying a dual pair together, with both sides
// computed from their own flux decomposition and metric curvature.
inline FluxRelationResiduals flux_relation(const TDualPair& pair) {
  const auto [Y, Z] = flux(pair.primal);
  const auto [Yb, Zb] = flux(pair.dual);
  const FormJet F = curvature(pair.primal);
  const FormJet Fb = curvature(pair.dual);
  FluxRelationResiduals r;
  r.z = (Z.value - Zb.value).max_abs();
  r.y_primal = (Y.value + Fb.value).max_abs();
  r.y_dual = (Yb.value + F.value).max_abs();
  return r;
}

namespace detail {

// Embed a basic p-form of the m-dimensional base into the fiber product
// chart ordered (x^1..x^m, y, y_bar).
inline Form embed_base(const Form& f, int m) {
  Form out(m + 2, f.rank());
  for (int s = 0; s < f.components(); ++s) {
    const auto t = f.tuple(s);
    if (f.rank() == 1)
      out.set(t[0], f.raw(s));
    else if (f.rank() == 2)
      out.set(t[0], t[1], f.raw(s));
    else
      out.set(t[0], t[1], t[2], f.raw(s));
  }
  return out;
}

inline Form circle_direction(int m, int which) {
  Form dy(m + 2, 1);
  dy.set(m + which, 1.0);
  return dy;
}

// Pullback of theta ^ Y + Z to the fiber product, with theta = dy + A.
inline Form pullback_flux(const Form& Y, const Form& Z, const Form& A, int m,
                          int which) {
  const Form theta = circle_direction(m, which) + A;
  return wedge(theta, embed_base(Y, m)) + embed_base(Z, m);
}

}  // namespace detail

// Componentwise check of p* H - pbar* H_bar = d(theta_g ^ theta_bar) on the
// fiber product of the two bundles.
inline double consistency_check(const TDualPair& pair) {
  const int m = pair.primal.m;
  const auto [Y, Z] = flux(pair.primal);
  const auto [Yb, Zb] = flux(pair.dual);
  const FormJet F = curvature(pair.primal);
  const FormJet Fb = curvature(pair.dual);

  const Form A = detail::embed_base(pair.primal.pot.value, m);
  const Form Ab = detail::embed_base(pair.dual.pot.value, m);
  const Form Fe = detail::embed_base(F.value, m);
  const Form Fbe = detail::embed_base(Fb.value, m);

  const Form lhs = detail::pullback_flux(Y.value, Z.value, A, m, 0) -
                   detail::pullback_flux(Yb.value, Zb.value, Ab, m, 1);

  // d(theta ^ theta_bar) = F ^ theta_bar - theta ^ F_bar
  const Form theta = detail::circle_direction(m, 0) + A;
  const Form theta_bar = detail::circle_direction(m, 1) + Ab;
  const Form rhs = wedge(Fe, theta_bar) - wedge(theta, Fbe);

  return (lhs - rhs).max_abs();
}

}  // namespace grflow
