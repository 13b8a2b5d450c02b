#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grflow/base_geometry.hpp"
#include "grflow/circle_bundle.hpp"
#include "grflow/courant.hpp"
#include "grflow/oracle.hpp"
#include "grflow/sampling.hpp"

#include <random>

using namespace grflow;

TEST_CASE("block form at b = 0 and endomorphism round-trip") {
  std::mt19937_64 rng(8);
  const Matrix g = random_spd(rng, 3);
  const GeneralizedMetric G0(g, Matrix::Zero(3, 3));
  CHECK((G0.matrix().block(0, 0, 3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((G0.matrix().block(0, 3, 3, 3) - g.inverse()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((G0.matrix().block(3, 0, 3, 3) - g).cwiseAbs().maxCoeff() < 1e-14);

  for (int n = 2; n <= 4; ++n) {
    const Matrix g2 = random_spd(rng, n);
    const Matrix b2 = random_antisymmetric(rng, n);
    const GeneralizedMetric G(g2, b2);
    const GeneralizedMetric back = GeneralizedMetric::from_endomorphism(G.matrix());
    CHECK((back.g() - g2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.b() - b2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("generalized metric invariants on random pairs") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 3;
    const GeneralizedMetric G(random_spd(rng, n), random_antisymmetric(rng, n));
    const Matrix I = Matrix::Identity(2 * n, 2 * n);
    const Matrix J = G.neutral_pairing();
    CHECK((G.matrix() * G.matrix() - I).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((J * G.matrix() - G.matrix().transpose() * J).cwiseAbs().maxCoeff() < 1e-12);
    // <G ., .> is positive definite
    const Matrix GJ = J * G.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (GJ + GJ.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("projections: graphs at the identity metric, idempotency, rank") {
  const GeneralizedMetric G(Matrix::Identity(2, 2), Matrix::Zero(2, 2));
  const auto [Pp, Pm] = G.projections();
  // P+ image is the graph {X + X}, P- the graph {X - X}
  Vector v(4);
  v << 1.0, -2.0, 0.5, 0.25;
  const Vector plus = Pp * v;
  CHECK(plus[0] == doctest::Approx(plus[2]));
  CHECK(plus[1] == doctest::Approx(plus[3]));
  const Vector minus = Pm * v;
  CHECK(minus[0] == doctest::Approx(-minus[2]));
  CHECK(minus[1] == doctest::Approx(-minus[3]));

  std::mt19937_64 rng(34);
  for (int t = 0; t < 25; ++t) {
    const int n = 2 + t % 3;
    const GeneralizedMetric Gr(random_spd(rng, n), random_antisymmetric(rng, n));
    const auto [Qp, Qm] = Gr.projections();
    CHECK((Qp * Qp - Qp).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Qm * Qm - Qm).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Qp * Qm).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Qp + Qm - Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::JacobiSVD<Matrix> svd(Qp);
    const int rank =
        static_cast<int>((svd.singularValues().array() > 1e-10).count());
    CHECK(rank == n);
  }
}

TEST_CASE("lie_element: fixed slice, so(E) membership, projector path") {
  std::mt19937_64 rng(55);
  const int n = 3;
  const Matrix g = random_spd(rng, n);
  const GeneralizedMetric G(g, Matrix::Zero(n, n));

  // pure-k slice at b = 0
  const Matrix k = random_antisymmetric(rng, n);
  const Matrix V = lie_element(Matrix::Zero(n, n), k, G);
  CHECK((V.block(0, 0, n, n)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((V.block(n, n, n, n)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((V.block(n, 0, n, n) - 0.5 * k).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((V.block(0, n, n, n) + 0.5 * g.inverse() * k * g.inverse())
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  CHECK(lie_element(Matrix::Zero(n, n), Matrix::Zero(n, n), G).cwiseAbs().maxCoeff() ==
        0.0);

  for (int t = 0; t < 50; ++t) {
    const int nn = 2 + t % 3;
    const GeneralizedMetric Gr(random_spd(rng, nn), random_antisymmetric(rng, nn));
    const Matrix h = random_symmetric(rng, nn);
    const Matrix kk = random_antisymmetric(rng, nn);
    const Matrix V1 = lie_element(h, kk, Gr);
    const Matrix V2 = lie_element_projector(h, kk, Gr);
    CHECK((V1 - V2).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix J = Gr.neutral_pairing();
    CHECK((V1.transpose() * J + J * V1).cwiseAbs().maxCoeff() < 1e-12);
  }

  CHECK_THROWS_AS(lie_element(random_antisymmetric(rng, n), Matrix::Zero(n, n), G),
                  std::invalid_argument);
}

TEST_CASE("induced_variation inverts lie_element; pure-k keeps g frozen") {
  std::mt19937_64 rng(89);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 3;
    const GeneralizedMetric G(random_spd(rng, n), random_antisymmetric(rng, n));
    const Matrix h = random_symmetric(rng, n);
    const Matrix k = random_antisymmetric(rng, n);
    const auto [h2, k2] = induced_variation(G, lie_element(h, k, G));
    CHECK((h2 - h).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((k2 - k).cwiseAbs().maxCoeff() < 1e-12);
  }

  const int n = 3;
  const GeneralizedMetric G(random_spd(rng, n), random_antisymmetric(rng, n));
  const auto [h0, k0] = induced_variation(G, Matrix::Zero(2 * n, 2 * n));
  CHECK(h0.cwiseAbs().maxCoeff() == 0.0);
  CHECK(k0.cwiseAbs().maxCoeff() == 0.0);

  const Matrix kpure = random_antisymmetric(rng, n);
  const auto [hk, kk2] =
      induced_variation(G, lie_element(Matrix::Zero(n, n), kpure, G));
  CHECK(hk.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((kk2 - kpure).cwiseAbs().maxCoeff() < 1e-12);

  // a generic endomorphism does not bracket to a variation
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix W(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) W(i, j) = U(rng);
  CHECK_THROWS_AS(induced_variation(G, W), std::invalid_argument);
}

TEST_CASE("bismut_ricci: zero-torsion slice and sign split") {
  std::mt19937_64 rng(13);
  const int n = 4;
  const Matrix Rc = random_symmetric(rng, n);
  const Matrix Z = Matrix::Zero(n, n);
  CHECK((bismut_ricci(Rc, Z, Z, +1) - Rc).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bismut_ricci(Rc, Z, Z, -1) - Rc).cwiseAbs().maxCoeff() == 0.0);

  const Matrix Hsq = random_symmetric(rng, n);
  const Matrix dstarH = random_antisymmetric(rng, n);
  const Matrix minus = bismut_ricci(Rc, Hsq, dstarH, -1);
  const Matrix sym = 0.5 * (minus + minus.transpose());
  const Matrix skew = 0.5 * (minus - minus.transpose());
  CHECK((sym - (Rc - 0.25 * Hsq)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((skew - 0.5 * dstarH).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("bismut_connection: torsion identity and averaging") {
  std::mt19937_64 rng(77);
  const int n = 3;
  const InvariantPolyFields f = random_invariant_fields(rng, n);
  const auto chart = f.h.chart_jet(Vector::Zero(n));
  const auto gamma = christoffel(chart);
  const Form H = random_form(rng, n, 3);
  const Matrix g = chart.h.mat();

  const auto plus = bismut_connection(gamma, H, g, +1);
  const auto minus = bismut_connection(gamma, H, g, -1);
  CHECK(torsion_check(plus, H, g, +1) < 1e-13);
  CHECK(torsion_check(minus, H, g, -1) < 1e-13);
  for (int c = 0; c < n; ++c)
    CHECK((0.5 * (plus[c] + minus[c]) - gamma[c]).cwiseAbs().maxCoeff() < 1e-14);

  const Form H0(n, 3);
  const auto lc = bismut_connection(gamma, H0, g, +1);
  for (int c = 0; c < n; ++c)
    CHECK((lc[c] - gamma[c]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(torsion_check(lc, H0, g, +1) < 1e-14);
}

TEST_CASE("flow equivalence: torsion-free slice and random instances") {
  std::mt19937_64 rng(101);
  const int n = 3;
  const Matrix g = random_spd(rng, n);
  const Matrix Rc = random_symmetric(rng, n);
  const Matrix Z = Matrix::Zero(n, n);
  CHECK(verify_grf_equivalence(g, Z, Rc, Z, Z) < 1e-12);

  for (int t = 0; t < 200; ++t) {
    const int nn = 2 + t % 3;
    const Matrix gg = random_spd(rng, nn);
    const Matrix bb = random_antisymmetric(rng, nn);
    const Matrix RRc = random_symmetric(rng, nn);
    const oracle::Dense3 H = random_three_form_dense(rng, nn);
    const Matrix Hsq = oracle::hsq_dense(H, gg.inverse());
    const Matrix dstarH = random_antisymmetric(rng, nn);
    CHECK(verify_grf_equivalence(gg, bb, RRc, Hsq, dstarH) < 1e-10);
  }
}

TEST_CASE("flow equivalence on data produced by the bundle formulas") {
  std::mt19937_64 rng(2025);
  for (const int m : {2, 3}) {
    const InvariantPolyFields f = random_invariant_fields(rng, m);
    const InvariantSample s = f.sample(Vector::Zero(m));
    const int d = m + 1;

    // frame-block data assembled into full-space matrices, theta slot first
    Matrix g = Matrix::Zero(d, d);
    g(0, 0) = s.phi.value;
    g.block(1, 1, m, m) = s.base.h.mat();

    Matrix b = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
      b(i + 1, 0) = -s.eta.value(i);  // b(e_i, e_theta) = -eta_i
      b(0, i + 1) = s.eta.value(i);
      for (int j = 0; j < m; ++j) b(i + 1, j + 1) = s.mu.value(i, j);
    }

    const KKRicci ric = kk_ricci(s);
    Matrix Rc = Matrix::Zero(d, d);
    Rc(0, 0) = ric.rthth;
    for (int i = 0; i < m; ++i) {
      Rc(0, i + 1) = ric.ritheta[i];
      Rc(i + 1, 0) = ric.ritheta[i];
      for (int j = 0; j < m; ++j) Rc(i + 1, j + 1) = ric.rij(i, j);
    }

    const HSquared hsq = h_squared(s);
    Matrix Hsq = Matrix::Zero(d, d);
    Hsq(0, 0) = hsq.hthth;
    for (int i = 0; i < m; ++i) {
      Hsq(0, i + 1) = hsq.hitheta[i];
      Hsq(i + 1, 0) = hsq.hitheta[i];
      for (int j = 0; j < m; ++j) Hsq(i + 1, j + 1) = hsq.hij(i, j);
    }

    const CodiffH ds = codiff_H(s);
    Matrix dstarH = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
      dstarH(i + 1, 0) = ds.itheta[i];
      dstarH(0, i + 1) = -ds.itheta[i];
      for (int j = 0; j < m; ++j) dstarH(i + 1, j + 1) = ds.ij(i, j);
    }

    CHECK(verify_grf_equivalence(g, b, Rc, Hsq, dstarH) < 1e-10);
  }
}
