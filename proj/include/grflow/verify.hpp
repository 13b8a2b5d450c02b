#pragma once

// Seeded verification suites behind `verify`: each row is one identity with
// its max residual over the sampled instances and the tolerance it must meet.
// The acceptance driver and the CLI both run these.

#include "grflow/circle_bundle.hpp"
#include "grflow/courant.hpp"
#include "grflow/flow_ode.hpp"
#include "grflow/oracle.hpp"
#include "grflow/sampling.hpp"
#include "grflow/tduality.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace grflow {

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass() const { return residual <= tol; }
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<CheckRow> rows;

  bool pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const CheckRow& r) { return r.pass(); });
  }
  double max_residual() const {
    double r = 0.0;
    for (const auto& row : rows) r = std::max(r, row.residual);
    return r;
  }
};

namespace detail {

// |closed - reference| normalized by abs_tol + rel_tol |reference|; a value
// <= 1 passes.
inline double normalized_residual(double closed, double ref, double rel, double abs) {
  return std::abs(closed - ref) / (abs + rel * std::abs(ref));
}

inline void fold(double& acc, double v) { acc = std::max(acc, v); }

}  // namespace detail

// Closed-form curvature blocks against the finite-difference oracle on
// random analytic samples. Residuals are normalized to rel 1e-6 / abs 1e-8.
inline SuiteReport run_curvature_suite(std::uint64_t seed, int n_samples, int m = 2) {
  SuiteReport rep;
  rep.suite = "curvature";
  rep.seed = seed;
  rep.samples = n_samples;
  std::mt19937_64 rng(seed);

  const double rel = 1e-6, abs = 1e-8;
  double r_ric = 0.0, r_hsq = 0.0, r_dstar = 0.0, r_hess = 0.0, r_chris = 0.0,
         r_grad = 0.0;

  for (int t = 0; t < n_samples; ++t) {
    const InvariantPolyFields fields = random_invariant_fields(rng, m);
    const Vector x0 = Vector::Zero(m);
    const InvariantSample s = fields.sample(x0);

    Vector p0 = Vector::Zero(m + 1);
    const auto rep_full = oracle::oracle_full(fields.metric_field(), fields.flux_field(),
                                              fields.gauge_field(), p0);

    const KKRicci ric = kk_ricci(s);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        detail::fold(r_ric, detail::normalized_residual(ric.rij(i, j),
                                                        rep_full.ricci.bb(i, j), rel, abs));
    for (int i = 0; i < m; ++i)
      detail::fold(r_ric, detail::normalized_residual(ric.ritheta[i],
                                                      rep_full.ricci.bf[i], rel, abs));
    detail::fold(r_ric,
                 detail::normalized_residual(ric.rthth, rep_full.ricci.ff, rel, abs));

    const HSquared hsq = h_squared(s);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        detail::fold(r_hsq, detail::normalized_residual(hsq.hij(i, j),
                                                        rep_full.hsq.bb(i, j), rel, abs));
    for (int i = 0; i < m; ++i)
      detail::fold(r_hsq, detail::normalized_residual(hsq.hitheta[i],
                                                      rep_full.hsq.bf[i], rel, abs));
    detail::fold(r_hsq,
                 detail::normalized_residual(hsq.hthth, rep_full.hsq.ff, rel, abs));

    const CodiffH ds = codiff_H(s);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        detail::fold(r_dstar, detail::normalized_residual(ds.ij(i, j),
                                                          rep_full.dstar.bb(i, j), rel, abs));
    for (int i = 0; i < m; ++i)
      detail::fold(r_dstar, detail::normalized_residual(ds.itheta[i],
                                                        rep_full.dstar.bf[i], rel, abs));

    const FrameSymTensor hess = hessian_full(s, s.gauge);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        detail::fold(r_hess, detail::normalized_residual(hess.bb(i, j),
                                                         rep_full.hessian.bb(i, j), rel, abs));
    for (int i = 0; i < m; ++i)
      detail::fold(r_hess, detail::normalized_residual(hess.bf[i],
                                                       rep_full.hessian.bf[i], rel, abs));
    detail::fold(r_hess,
                 detail::normalized_residual(hess.ff, rep_full.hessian.ff, rel, abs));

    const auto [gY, gZ] = grad_contract_H(s, s.gauge);
    for (int i = 0; i < m; ++i)
      detail::fold(r_grad, detail::normalized_residual(gY(i), rep_full.grad_contract.bf[i],
                                                       rel, abs));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        detail::fold(r_grad, detail::normalized_residual(gZ(i, j),
                                                         rep_full.grad_contract.bb(i, j),
                                                         rel, abs));

    const KKChristoffels chris = kk_christoffels(s);
    const auto& oc = rep_full.christoffels;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          detail::fold(r_chris, detail::normalized_residual(chris.base[k](i, j),
                                                            oc.base[k](i, j), rel, abs));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        detail::fold(r_chris, detail::normalized_residual(chris.theta_ij(i, j),
                                                          oc.theta_ij(i, j), rel, abs));
        detail::fold(r_chris, detail::normalized_residual(chris.mixed(i, j),
                                                          oc.mixed(i, j), rel, abs));
      }
    for (int i = 0; i < m; ++i) {
      detail::fold(r_chris, detail::normalized_residual(chris.fiber_up[i],
                                                        oc.fiber_up[i], rel, abs));
      detail::fold(r_chris, detail::normalized_residual(chris.fiber_theta[i],
                                                        oc.fiber_theta[i], rel, abs));
    }
  }

  rep.rows = {
      {"kk_ricci vs oracle (normalized 1e-6 rel, 1e-8 abs)", r_ric, 1.0},
      {"h_squared vs oracle (normalized)", r_hsq, 1.0},
      {"codiff_H vs oracle (normalized)", r_dstar, 1.0},
      {"hessian_full vs oracle (normalized)", r_hess, 1.0},
      {"grad_contract_H vs oracle (normalized)", r_grad, 1.0},
      {"kk_christoffels vs oracle (normalized)", r_chris, 1.0},
  };
  return rep;
}

// Pointwise flow equivalence plus the structural invariants of the
// generalized-metric algebra.
inline SuiteReport run_courant_suite(std::uint64_t seed, int n_samples) {
  SuiteReport rep;
  rep.suite = "courant";
  rep.seed = seed;
  rep.samples = n_samples;
  std::mt19937_64 rng(seed);

  double r_equiv = 0.0, r_inv = 0.0, r_proj = 0.0, r_lie = 0.0, r_round = 0.0;
  for (int t = 0; t < n_samples; ++t) {
    const int n = 2 + t % 3;
    const Matrix g = random_spd(rng, n);
    const Matrix b = random_antisymmetric(rng, n);
    const Matrix Rc = random_symmetric(rng, n);
    const oracle::Dense3 H = random_three_form_dense(rng, n);
    const Matrix Hsq = oracle::hsq_dense(H, g.inverse());
    const Matrix dstarH = random_antisymmetric(rng, n);

    detail::fold(r_equiv, verify_grf_equivalence(g, b, Rc, Hsq, dstarH));

    const GeneralizedMetric G(g, b);
    const Matrix I = Matrix::Identity(2 * n, 2 * n);
    const Matrix J = G.neutral_pairing();
    detail::fold(r_inv, (G.matrix() * G.matrix() - I).cwiseAbs().maxCoeff());
    detail::fold(r_inv,
                 (J * G.matrix() - G.matrix().transpose() * J).cwiseAbs().maxCoeff());
    const auto [Pp, Pm] = G.projections();
    detail::fold(r_proj, (Pp * Pp - Pp).cwiseAbs().maxCoeff());
    detail::fold(r_proj, (Pm * Pm - Pm).cwiseAbs().maxCoeff());
    detail::fold(r_proj, (Pp * Pm).cwiseAbs().maxCoeff());

    const Matrix h = random_symmetric(rng, n);
    const Matrix k = random_antisymmetric(rng, n);
    const Matrix V1 = lie_element(h, k, G);
    const Matrix V2 = lie_element_projector(h, k, G);
    detail::fold(r_lie, (V1 - V2).cwiseAbs().maxCoeff());
    detail::fold(r_lie, (V1.transpose() * J + J * V1).cwiseAbs().maxCoeff());
    const auto [h2, k2] = induced_variation(G, V1);
    detail::fold(r_round, (h2 - h).cwiseAbs().maxCoeff());
    detail::fold(r_round, (k2 - k).cwiseAbs().maxCoeff());
  }

  rep.rows = {
      {"flow equivalence residual", r_equiv, 1e-10},
      {"involution and self-adjointness", r_inv, 1e-12},
      {"projector idempotency", r_proj, 1e-12},
      {"so(E) membership and path agreement", r_lie, 1e-12},
      {"variation round-trip", r_round, 1e-10},
  };
  return rep;
}

// Transform-level identities on random dual pairs.
inline SuiteReport run_tduality_suite(std::uint64_t seed, int n_samples) {
  SuiteReport rep;
  rep.suite = "tduality";
  rep.seed = seed;
  rep.samples = n_samples;
  std::mt19937_64 rng(seed);

  double r_invol = 0.0, r_bus = 0.0, r_flux = 0.0, r_cons = 0.0;
  for (int t = 0; t < n_samples; ++t) {
    const int m = 2 + t % 2;

    DecomposedConfig d;
    d.phi = 0.5 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    d.a = random_form(rng, m, 1);
    d.h = random_spd(rng, m);
    d.eta = random_form(rng, m, 1);
    d.mu = random_form(rng, m, 2);

    const DecomposedConfig dd = dualize(dualize(d));
    detail::fold(r_invol, std::abs(dd.phi - d.phi));
    detail::fold(r_invol, (dd.a - d.a).max_abs());
    detail::fold(r_invol, (dd.eta - d.eta).max_abs());
    detail::fold(r_invol, (dd.mu - d.mu).max_abs());

    const BuscherComponents bc = from_canonical(d);
    const BuscherComponents dual_bc = buscher(bc);
    const DecomposedConfig via_canonical = dualize(d);
    const BuscherComponents expect = from_canonical(via_canonical);
    detail::fold(r_bus, std::abs(dual_bc.g0 - expect.g0));
    detail::fold(r_bus, (dual_bc.g1 - expect.g1).max_abs());
    detail::fold(r_bus, (dual_bc.g2 - expect.g2).cwiseAbs().maxCoeff());
    detail::fold(r_bus, (dual_bc.b1 - expect.b1).max_abs());
    detail::fold(r_bus, (dual_bc.b2 - expect.b2).max_abs());

    const InvariantPolyFields fields = random_invariant_fields(rng, m);
    const InvariantSample s = fields.sample(Vector::Zero(m));
    const TDualPair pair = make_dual_pair(s);
    detail::fold(r_flux, flux_relation(pair).max());
    detail::fold(r_cons, consistency_check(pair));
  }

  rep.rows = {
      {"dualize involution", r_invol, 1e-15},
      {"buscher vs canonical path", r_bus, 1e-12},
      {"flux relation residual", r_flux, 1e-10},
      {"consistency identity residual", r_cons, 1e-10},
  };
  return rep;
}

// The five pointwise commutation identities on random analytic samples with
// gauge function, fiber gradient and flux all switched on.
inline SuiteReport run_commutation_suite(std::uint64_t seed, int n_samples,
                                         bool omit_dilaton = false, int m = 2) {
  SuiteReport rep;
  rep.suite = omit_dilaton ? "commutation(no dilaton shift)" : "commutation";
  rep.seed = seed;
  rep.samples = n_samples;
  std::mt19937_64 rng(seed);

  CommutationResiduals worst;
  for (int t = 0; t < n_samples; ++t) {
    const InvariantPolyFields fields = random_invariant_fields(rng, m);
    const InvariantSample s = fields.sample(Vector::Zero(m));
    const CommutationResiduals r = commutation_check(s, omit_dilaton);
    worst.phi = std::max(worst.phi, r.phi);
    worst.a = std::max(worst.a, r.a);
    worst.h = std::max(worst.h, r.h);
    worst.eta = std::max(worst.eta, r.eta);
    worst.mu = std::max(worst.mu, r.mu);
  }

  const double tol = 1e-8;
  rep.rows = {
      {"fiber length rate", worst.phi, tol}, {"connection rate", worst.a, tol},
      {"base metric rate", worst.h, tol},    {"eta rate", worst.eta, tol},
      {"mu rate", worst.mu, tol},
  };
  return rep;
}

inline std::vector<SuiteReport> run_all_suites(std::uint64_t seed, int n_samples) {
  return {run_curvature_suite(seed, std::min(n_samples, 50)),
          run_courant_suite(seed, n_samples), run_tduality_suite(seed, n_samples),
          run_commutation_suite(seed, n_samples)};
}

}  // namespace grflow
