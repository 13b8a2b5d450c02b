// Acceptance suite: every criterion runs at its pinned tolerance and prints
// one pass/fail line. Exit code is nonzero when any criterion fails.

#include "grflow/circle_bundle.hpp"
#include "grflow/courant.hpp"
#include "grflow/flow_ode.hpp"
#include "grflow/io.hpp"
#include "grflow/oracle.hpp"
#include "grflow/sampling.hpp"
#include "grflow/tduality.hpp"
#include "grflow/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

namespace {

using namespace grflow;

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] %d. %s (%s, %.2fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str(), seconds);
  if (!pass) ++failures;
}

std::string residual_str(double r, double tol) {
  return "max residual " + format_double(r) + ", tol " + format_double(tol);
}

// 1. closed-form curvature blocks against the finite-difference oracle
void criterion_curvature() {
  Timer timer;
  const SuiteReport rep = run_curvature_suite(20260809, 50, 2);
  const double r = rep.max_residual();
  report(1, "kaluza-klein curvature blocks vs oracle, 50 samples (m = 2)",
         rep.pass() && timer.seconds() < 10.0,
         "normalized residual " + format_double(r) +
             " (1e-6 rel + 1e-8 abs), bound 1",
         timer.seconds());
}

// 2. pointwise flow equivalence on the generalized-metric side
void criterion_flow_equivalence() {
  Timer timer;
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 3;
    const Matrix g = random_spd(rng, n);
    const Matrix b = random_antisymmetric(rng, n);
    const Matrix Rc = random_symmetric(rng, n);
    const oracle::Dense3 H = random_three_form_dense(rng, n);
    const Matrix Hsq = oracle::hsq_dense(H, g.inverse());
    const Matrix dstarH = random_antisymmetric(rng, n);
    worst = std::max(worst, verify_grf_equivalence(g, b, Rc, Hsq, dstarH));
  }
  report(2, "flow equivalence residual, 200 instances (n = 2..4)",
         worst <= 1e-10 && timer.seconds() < 1.0, residual_str(worst, 1e-10),
         timer.seconds());
}

// 3. the five commutation identities plus the dilaton negative control
void criterion_commutation() {
  Timer timer;
  std::mt19937_64 rng(777);
  CommutationResiduals worst;
  double control = 0.0;
  for (int t = 0; t < 100; ++t) {
    const InvariantPolyFields f = random_invariant_fields(rng, 2);
    const InvariantSample s = f.sample(Vector::Zero(2));
    const CommutationResiduals r = commutation_check(s);
    worst.phi = std::max(worst.phi, r.phi);
    worst.a = std::max(worst.a, r.a);
    worst.h = std::max(worst.h, r.h);
    worst.eta = std::max(worst.eta, r.eta);
    worst.mu = std::max(worst.mu, r.mu);
    control = std::max(control, commutation_check(s, true).max());
  }
  const bool pass = worst.max() <= 1e-8 && control > 1e-3;
  report(3, "duality commutes with the flow, 100 samples + negative control",
         pass && timer.seconds() < 30.0,
         residual_str(worst.max(), 1e-8) + "; control residual " +
             format_double(control) + " > 1e-3",
         timer.seconds());
}

// 4. reduced rates: exact fixed values and closed-vs-generic over a grid
void criterion_reduced_rates() {
  Timer timer;
  const auto hopf = reduced_rhs(ReducedState::make(Scenario::hopf, 1.0, 1.0));
  const auto dual = reduced_rhs(ReducedState::make(Scenario::hopf_dual, 1.0, 1.0));
  bool pass = hopf.first == -1.0 && hopf.second == -1.0 && dual.first == 1.0 &&
              dual.second == -1.0;

  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double A = 0.2 + (5.0 - 0.2) * i / 9.0;
      const double B = 0.2 + (5.0 - 0.2) * j / 9.0;
      for (const auto sc : {Scenario::hopf, Scenario::hopf_dual}) {
        const ReducedState st = ReducedState::make(sc, A, B);
        const auto closed = reduced_rhs(st);
        const GenericRates gen = reduced_rhs_generic(st);
        worst = std::max(worst, std::abs(closed.first - gen.Adot));
        worst = std::max(worst, std::abs(closed.second - gen.Bdot));
      }
    }
  pass = pass && worst <= 1e-10;
  report(4, "reduced rates: exact values and 10x10 closed-vs-generic grid", pass,
         "fixed values exact; grid " + residual_str(worst, 1e-10), timer.seconds());
}

// 5. trajectory-level commutation with fourth-order step convergence
void criterion_trajectory() {
  Timer timer;
  IntegrateOptions opt;
  opt.check_generic = false;
  const ReducedState s0 = ReducedState::make(Scenario::hopf, 1.0, 1.0);

  const double res = trajectory_commutation(integrate(s0, 1e-4, 0.2, opt), opt);
  auto residual = [&](double dt) {
    return trajectory_commutation(integrate(s0, dt, 0.2, opt), opt);
  };
  const double r1 = residual(4e-3);
  const double r2 = residual(2e-3);
  const double ratio = r1 / r2;
  const bool pass = res <= 1e-6 && ratio > 8.0 && ratio < 32.0;
  report(5, "trajectory commutation, dt = 1e-4 over [0, 0.2]",
         pass && timer.seconds() < 5.0,
         residual_str(res, 1e-6) + "; halving ratio " + format_double(ratio),
         timer.seconds());
}

// 6. qualitative behavior of the two model trajectories
void criterion_qualitative() {
  Timer timer;
  IntegrateOptions opt;
  opt.check_generic = false;

  const Trajectory round =
      integrate(ReducedState::make(Scenario::hopf, 1.0, 1.0), 1e-3, 2.0, opt);
  bool pass = round.termination == Termination::extinction;
  double round_dev = 0.0;
  for (const auto& st : round.states)
    round_dev = std::max(round_dev, std::abs(st.A - st.B));
  pass = pass && round_dev <= 1e-8;

  const Trajectory dual =
      integrate(ReducedState::make(Scenario::hopf_dual, 1.0, 1.0), 1e-3, 2.0, opt);
  pass = pass && dual.termination == Termination::extinction;
  for (size_t i = 1; i < dual.states.size(); ++i) {
    pass = pass && dual.states[i].A > dual.states[i - 1].A;
    pass = pass && dual.states[i].B < dual.states[i - 1].B;
  }
  report(6, "round ray shrinks to extinction; dual fiber expands, base shrinks", pass,
         "|A - B| max " + format_double(round_dev) + ", both extinct in finite time",
         timer.seconds());
}

// 7. structural invariants of the transform and the fiberwise algebra
void criterion_structural() {
  Timer timer;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double inv_res = 0.0, bus_res = 0.0, alg_res = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 1 + t % 4;
    DecomposedConfig d;
    d.phi = 0.5 + 2.0 * U(rng);
    d.a = random_form(rng, m, 1);
    d.h = random_spd(rng, m);
    d.eta = random_form(rng, m, 1);
    d.mu = random_form(rng, m, 2);

    const DecomposedConfig dd = dualize(dualize(d));
    inv_res = std::max({inv_res, std::abs(dd.phi - d.phi), (dd.a - d.a).max_abs(),
                        (dd.eta - d.eta).max_abs(), (dd.mu - d.mu).max_abs()});

    const BuscherComponents via_bus = buscher(from_canonical(d));
    const BuscherComponents via_can = from_canonical(dualize(d));
    bus_res = std::max({bus_res, std::abs(via_bus.g0 - via_can.g0),
                        (via_bus.g1 - via_can.g1).max_abs(),
                        (via_bus.g2 - via_can.g2).cwiseAbs().maxCoeff(),
                        (via_bus.b1 - via_can.b1).max_abs(),
                        (via_bus.b2 - via_can.b2).max_abs()});

    const int n = 2 + t % 3;
    const GeneralizedMetric G(random_spd(rng, n), random_antisymmetric(rng, n));
    const Matrix I = Matrix::Identity(2 * n, 2 * n);
    const Matrix J = G.neutral_pairing();
    alg_res = std::max(alg_res, (G.matrix() * G.matrix() - I).cwiseAbs().maxCoeff());
    const auto [Pp, Pm] = G.projections();
    alg_res = std::max(alg_res, (Pp * Pp - Pp).cwiseAbs().maxCoeff());
    alg_res = std::max(alg_res, (Pm * Pm - Pm).cwiseAbs().maxCoeff());
    const Matrix V =
        lie_element(random_symmetric(rng, n), random_antisymmetric(rng, n), G);
    alg_res = std::max(alg_res, (V.transpose() * J + J * V).cwiseAbs().maxCoeff());
  }
  const bool pass = inv_res <= 1e-15 && bus_res <= 1e-12 && alg_res <= 1e-12;
  report(7, "structural invariants over 1000 instances",
         pass && timer.seconds() < 1.0,
         "involution " + format_double(inv_res) + " (1e-15); coefficient path " +
             format_double(bus_res) + " (1e-12); algebra " + format_double(alg_res) +
             " (1e-12)",
         timer.seconds());
}

// 8. flux relations and the fiber-product consistency identity
void criterion_consistency() {
  Timer timer;
  std::mt19937_64 rng(555);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 2 + t % 2;
    const InvariantPolyFields f = random_invariant_fields(rng, m);
    const TDualPair pair = make_dual_pair(f.sample(Vector::Zero(m)));
    worst = std::max({worst, flux_relation(pair).max(), consistency_check(pair)});
  }
  const TDualPair hopf =
      make_dual_pair(scenario_sample(ReducedState::make(Scenario::hopf, 1.0, 1.0)));
  worst = std::max({worst, flux_relation(hopf).max(), consistency_check(hopf)});
  report(8, "flux relations and consistency identity, 100 pairs + Hopf pair",
         worst <= 1e-10, residual_str(worst, 1e-10), timer.seconds());
}

}  // namespace

int main() {
  Timer total;
  criterion_curvature();
  criterion_flow_equivalence();
  criterion_commutation();
  criterion_reduced_rates();
  criterion_trajectory();
  criterion_qualitative();
  criterion_structural();
  criterion_consistency();
  std::printf("%d/8 criteria passed (%.2fs total)\n", 8 - failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
