#pragma once

// Time integration of the reduced homogeneous flows on circle bundles over
// Einstein Kaehler bases: g = A theta (x) theta + B g_base with d theta the
// base Kaehler form on the primal side, and the T-dual family (trivial
// bundle, flux -theta_bar ^ omega) on the other. Closed-form rates are
// cross-checked against the generic right-hand side instantiated on an
// affine-chart jet of the base at every accepted step.

#include "grflow/circle_bundle.hpp"
#include "grflow/tduality.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace grflow {

enum class Scenario { hopf, hopf_dual, cpn, cpn_dual };

inline bool is_dual_scenario(Scenario s) {
  return s == Scenario::hopf_dual || s == Scenario::cpn_dual;
}

inline Scenario dual_of(Scenario s) {
  switch (s) {
    case Scenario::hopf:
      return Scenario::hopf_dual;
    case Scenario::cpn:
      return Scenario::cpn_dual;
    default:
      throw std::invalid_argument("scenario has no dual counterpart");
  }
}

inline std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::hopf:
      return "hopf";
    case Scenario::hopf_dual:
      return "hopf_dual";
    case Scenario::cpn:
      return "cpn";
    case Scenario::cpn_dual:
      return "cpn_dual";
  }
  return {};
}

inline Scenario scenario_from_name(const std::string& name) {
  if (name == "hopf") return Scenario::hopf;
  if (name == "hopf_dual") return Scenario::hopf_dual;
  if (name == "cpn") return Scenario::cpn;
  if (name == "cpn_dual") return Scenario::cpn_dual;
  throw std::invalid_argument("unknown scenario: " + name);
}

// Reduced state (A, B): fiber scale and base scale. n is the complex base
// dimension (base dimension m = 2n) and lambda the base Einstein constant.
// The sphere scenarios fix (n, lambda) = (1, 1); the projective-space family
// defaults to lambda = n + 1.
struct ReducedState {
  Scenario scenario = Scenario::hopf;
  double A = 1.0;
  double B = 1.0;
  double t = 0.0;
  int n = 1;
  double lambda = 1.0;

  static ReducedState make(Scenario sc, double A, double B, int n = 1,
                           double lambda = -1.0) {
    ReducedState s;
    s.scenario = sc;
    s.A = A;
    s.B = B;
    s.n = (sc == Scenario::hopf || sc == Scenario::hopf_dual) ? 1 : n;
    if (lambda > 0.0)
      s.lambda = lambda;
    else if (sc == Scenario::hopf || sc == Scenario::hopf_dual)
      s.lambda = 1.0;
    else
      s.lambda = s.n + 1.0;
    s.validate();
    return s;
  }

  void validate() const {
    if (!(A > 0.0) || !(B > 0.0))
      throw std::invalid_argument("reduced state requires positive coefficients");
    if (n < 1 || 2 * n > kMaxBaseDim)
      throw std::invalid_argument("base dimension out of range for this scenario");
    if (!(lambda > 0.0)) throw std::invalid_argument("Einstein constant must be positive");
  }
};

// Closed-form reduced rates.
//   primal: A' = -n A^2/B^2,  B' = -2 lambda + A/B
//   dual:   A' =  n / B^2,    B' = -2 lambda + 1/(A B)
inline std::pair<double, double> reduced_rhs(const ReducedState& s) {
  s.validate();
  if (is_dual_scenario(s.scenario))
    return {s.n / (s.B * s.B), -2.0 * s.lambda + 1.0 / (s.A * s.B)};
  return {-s.n * s.A * s.A / (s.B * s.B), -2.0 * s.lambda + s.A / s.B};
}

// ---- affine-chart jets of the Einstein Kaehler base ----

namespace detail {

// Second-order jets at the chart origin of the projective-space metric with
// Einstein constant lambda (scale factor sfac = (n+1)/lambda) and of the
// connection potential whose curvature is the Kaehler form.
struct BaseChartJets {
  BaseChartSample chart;
  FormJet potential;     // d(potential) = kahler form
  Form kahler;           // value at the origin
};

inline BaseChartJets fubini_study_jets(int n, double lambda, double base_scale) {
  using cd = std::complex<double>;
  const int m = 2 * n;
  const double sfac = (n + 1.0) / lambda;

  Matrix g0 = 2.0 * sfac * base_scale * Matrix::Identity(m, m);
  std::vector<Matrix> dg(m, Matrix::Zero(m, m));
  std::vector<Matrix> d2g(sym_slot_count(m), Matrix::Zero(m, m));

  auto uvec = [&](int a) -> cd { return (a % 2 == 0) ? cd(1, 0) : cd(0, 1); };
  auto pz = [&](int beta, int d) -> cd {  // d_d z_beta
    if (d == 2 * beta) return cd(1, 0);
    if (d == 2 * beta + 1) return cd(0, 1);
    return cd(0, 0);
  };

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int al = a / 2, be = b / 2;
      const cd uab = uvec(a) * std::conj(uvec(b));
      for (int c = 0; c < m; ++c)
        for (int d = c; d < m; ++d) {
          cd term(0, 0);
          if (al == be && c == d) term += cd(2, 0) * uab;
          // second derivative of conj(z_al) z_be
          const cd zz = std::conj(pz(al, c)) * pz(be, d) + std::conj(pz(al, d)) * pz(be, c);
          term += zz * uab;
          d2g[sym_slot(m, c, d)](a, b) += -2.0 * sfac * base_scale * term.real();
        }
    }

  BaseChartJets out{
      BaseChartSample(BaseMetric(g0), std::move(dg), std::move(d2g)),
      FormJet::zero(m, 1), Form(m, 2)};

  for (int al = 0; al < n; ++al) {
    out.potential.d1[2 * al + 1].set(2 * al, -sfac);
    out.potential.d1[2 * al].set(2 * al + 1, sfac);
    out.kahler.set(2 * al, 2 * al + 1, 2.0 * sfac);
  }
  return out;
}

}  // namespace detail

// The invariant sample realizing a reduced state at a base chart point.
// On the dual side the bundle is trivial and the flux background is minus
// the base Kaehler form; the dual gauge function is spatially constant, so
// its jets vanish.
inline InvariantSample scenario_sample(const ReducedState& s) {
  s.validate();
  const int m = 2 * s.n;
  const auto base = detail::fubini_study_jets(s.n, s.lambda, s.B);

  if (!is_dual_scenario(s.scenario)) {
    return InvariantSample(m, ScalarJet::constant(m, s.A), base.potential, base.chart,
                           FormJet::zero(m, 1), FormJet::zero(m, 2),
                           FormJet::zero(m, 2, false), FormJet::zero(m, 3, false),
                           ScalarJet::constant(m, 0.0));
  }

  FormJet y0 = FormJet::zero(m, 2, false);
  y0.value = -1.0 * base.kahler;
  return InvariantSample(m, ScalarJet::constant(m, s.A), FormJet::zero(m, 1),
                         base.chart, FormJet::zero(m, 1), FormJet::zero(m, 2),
                         std::move(y0), FormJet::zero(m, 3, false),
                         ScalarJet::constant(m, 0.0));
}

struct GenericRates {
  double Adot = 0.0;
  double Bdot = 0.0;
  double ansatz_residual = 0.0;  // drift out of the homogeneous family
};

// Reduced rates through the full machinery: instantiate the sample, evaluate
// the flow, and read the two scales back off the frame blocks.
inline GenericRates reduced_rhs_generic(const ReducedState& s) {
  const InvariantSample sample = scenario_sample(s);
  const FlowRate r = flow_rhs(sample);
  const int m = sample.m;

  GenericRates out;
  out.Adot = r.dphi;
  const Matrix ghat = sample.base.h.mat() / s.B;
  out.Bdot = (ghat.inverse() * r.dh).trace() / m;

  double drift = std::max(r.da.cwiseAbs().maxCoeff(), r.deta.cwiseAbs().maxCoeff());
  drift = std::max(drift, r.dmu.max_abs());
  drift = std::max(drift, (r.dh - out.Bdot * ghat).cwiseAbs().maxCoeff());
  out.ansatz_residual = drift;
  return out;
}

struct IntegrateOptions {
  bool check_generic = true;
  double generic_tol = 1e-10;
  double extinction_threshold = 1e-6;
  double blowup_guard = 1e9;
};

enum class Termination { horizon, extinction, blowup };

struct Trajectory {
  std::vector<ReducedState> states;
  double dt = 0.0;
  Termination termination = Termination::horizon;
};

namespace detail {

// Stage evaluations may leave the valid region near extinction; the stepper
// uses the raw formulas and guards the committed states instead.
inline std::pair<double, double> raw_rates(const ReducedState& proto, double A,
                                           double B) {
  if (is_dual_scenario(proto.scenario))
    return {proto.n / (B * B), -2.0 * proto.lambda + 1.0 / (A * B)};
  return {-proto.n * A * A / (B * B), -2.0 * proto.lambda + A / B};
}

inline void check_against_generic(const ReducedState& s, double tol) {
  const auto closed = reduced_rhs(s);
  const auto generic = reduced_rhs_generic(s);
  const double scale = std::max({1.0, std::abs(closed.first), std::abs(closed.second)});
  if (std::abs(closed.first - generic.Adot) > tol * scale ||
      std::abs(closed.second - generic.Bdot) > tol * scale ||
      generic.ansatz_residual > tol * scale)
    throw std::runtime_error("reduced flow deviates from the generic rate");
}

}  // namespace detail

// Classical fixed-step RK4 with extinction and blowup guards.
inline Trajectory integrate(const ReducedState& s0, double dt, double t_max,
                            const IntegrateOptions& opt = {}) {
  if (!(dt > 0.0) || !(t_max > 0.0))
    throw std::invalid_argument("step size and horizon must be positive");
  s0.validate();

  Trajectory traj;
  traj.dt = dt;
  traj.states.push_back(s0);

  ReducedState cur = s0;
  const long nsteps = std::lround(t_max / dt);
  for (long step = 0; step < nsteps; ++step) {
    if (opt.check_generic) detail::check_against_generic(cur, opt.generic_tol);

    const auto k1 = detail::raw_rates(cur, cur.A, cur.B);
    const auto k2 =
        detail::raw_rates(cur, cur.A + 0.5 * dt * k1.first, cur.B + 0.5 * dt * k1.second);
    const auto k3 =
        detail::raw_rates(cur, cur.A + 0.5 * dt * k2.first, cur.B + 0.5 * dt * k2.second);
    const auto k4 = detail::raw_rates(cur, cur.A + dt * k3.first, cur.B + dt * k3.second);

    ReducedState next = cur;
    next.A += dt / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    next.B += dt / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    next.t = s0.t + (step + 1) * dt;

    if (!std::isfinite(next.A) || !std::isfinite(next.B) ||
        !(next.A > opt.extinction_threshold) || !(next.B > opt.extinction_threshold)) {
      if (std::isfinite(next.A) && std::isfinite(next.B) && next.A > 0.0 &&
          next.B > 0.0)
        traj.states.push_back(next);
      traj.termination = Termination::extinction;
      return traj;
    }
    if (next.A > opt.blowup_guard || next.B > opt.blowup_guard) {
      traj.states.push_back(next);
      traj.termination = Termination::blowup;
      return traj;
    }
    traj.states.push_back(next);
    cur = next;
  }
  traj.termination = Termination::horizon;
  return traj;
}

// Dualize a reduced state: the fiber scale inverts, the base scale is shared.
inline ReducedState dualize(const ReducedState& s) {
  ReducedState d = s;
  d.scenario = is_dual_scenario(s.scenario) ? (s.scenario == Scenario::hopf_dual
                                                   ? Scenario::hopf
                                                   : Scenario::cpn)
                                            : dual_of(s.scenario);
  d.A = 1.0 / s.A;
  return d;
}

// Integrates the intrinsic dual flow on the primal grid and returns the max
// pointwise mismatch against the dualized primal trajectory.
inline double trajectory_commutation(const Trajectory& primal,
                                     const IntegrateOptions& opt = {}) {
  if (primal.states.empty()) throw std::invalid_argument("empty trajectory");
  const ReducedState& s0 = primal.states.front();
  if (is_dual_scenario(s0.scenario))
    throw std::invalid_argument("trajectory is already on the dual side");

  const double horizon = (static_cast<double>(primal.states.size()) - 1) * primal.dt;
  Trajectory dual = integrate(dualize(s0), primal.dt, horizon, opt);
  if (dual.states.size() != primal.states.size())
    throw std::runtime_error("mismatched grids between primal and dual trajectories");

  double res = 0.0;
  for (size_t i = 0; i < primal.states.size(); ++i) {
    res = std::max(res, std::abs(1.0 / primal.states[i].A - dual.states[i].A));
    res = std::max(res, std::abs(primal.states[i].B - dual.states[i].B));
  }
  return res;
}

// ---- full chart fields for the sphere scenarios (n = 1), used by the
// finite-difference oracle ----

struct ScenarioFields {
  std::function<Matrix(const Vector&)> metric;       // (y, x) chart, m+1 dims
  std::function<double(const Vector&)> gauge;
  int m = 0;
};

// Closed-form affine-chart fields of the projective base at any chart point:
// metric 2 s [D delta_ab - Re(conj(z) z zz-block)] / D^2 pattern and the
// rotation potential s (x dy - y dx)/D per complex pair, both exact.
inline Matrix fubini_study_metric(int n, double lambda, const Vector& x) {
  using cd = std::complex<double>;
  const int m = 2 * n;
  const double sfac = (n + 1.0) / lambda;
  double rho = x.squaredNorm();
  const double D = 1.0 + rho;
  Matrix g(m, m);
  auto z = [&](int al) { return cd(x[2 * al], x[2 * al + 1]); };
  auto uvec = [](int a) { return (a % 2 == 0) ? cd(1, 0) : cd(0, 1); };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int al = a / 2, be = b / 2;
      cd h = (al == be) ? cd(D, 0) : cd(0, 0);
      h -= std::conj(z(al)) * z(be);
      h *= sfac / (D * D);
      g(a, b) = 2.0 * (h * uvec(a) * std::conj(uvec(b))).real();
    }
  return g;
}

inline Vector fubini_study_potential(int n, double lambda, const Vector& x) {
  const int m = 2 * n;
  const double sfac = (n + 1.0) / lambda;
  const double D = 1.0 + x.squaredNorm();
  Vector a(m);
  for (int al = 0; al < n; ++al) {
    a[2 * al] = -sfac * x[2 * al + 1] / D;
    a[2 * al + 1] = sfac * x[2 * al] / D;
  }
  return a;
}

inline ScenarioFields scenario_fields(const ReducedState& s) {
  s.validate();
  if (is_dual_scenario(s.scenario))
    throw std::invalid_argument("chart fields are provided for the primal scenarios");
  ScenarioFields f;
  const int n = s.n;
  const double lambda = s.lambda;
  const double A = s.A, B = s.B;
  f.m = 2 * n;
  f.metric = [n, lambda, A, B](const Vector& p) {
    const int m = 2 * n;
    const Vector x = p.tail(m);
    const Matrix hb = B * fubini_study_metric(n, lambda, x);
    const Vector pot = fubini_study_potential(n, lambda, x);
    Matrix g(m + 1, m + 1);
    g(0, 0) = A;
    for (int i = 0; i < m; ++i) {
      g(0, i + 1) = A * pot[i];
      g(i + 1, 0) = g(0, i + 1);
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i + 1, j + 1) = hb(i, j) + A * pot[i] * pot[j];
    return g;
  };
  f.gauge = [](const Vector&) { return 0.0; };
  return f;
}

}  // namespace grflow
