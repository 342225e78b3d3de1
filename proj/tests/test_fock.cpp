#include <doctest.h>

#include <cmath>
#include <complex>

#include "cvqelm/errors.hpp"
#include "cvqelm/fock.hpp"
#include "cvqelm/rng.hpp"
#include "cvqelm/substrate.hpp"

using namespace cvqelm;

TEST_CASE("ladder operators") {
  auto [a2, ad2] = ladder_ops(2);
  CHECK(a2(0, 1) == 1.0);
  CHECK(a2(0, 0) == 0.0);
  CHECK(a2(1, 0) == 0.0);
  CHECK(a2(1, 1) == 0.0);
  CHECK(ad2 == a2.transpose());

  auto [a4, ad4] = ladder_ops(4);
  CHECK(a4(2, 3) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  const Eigen::MatrixXd number = ad4 * a4;
  for (int n = 0; n < 4; ++n) CHECK(number(n, n) == doctest::Approx(double(n)).epsilon(1e-14));

  CHECK_THROWS_AS(ladder_ops(1), InvalidArgument);
}

TEST_CASE("displacement unitary") {
  CHECK(gate_unitary(GateDesc::displacement(0, 0.0, 0.0), 1, 8).isIdentity(1e-12));

  const int d = 30;
  const CMat u = gate_unitary(GateDesc::displacement(0, 1.0, 0.0), 1, d);
  CHECK((u.adjoint() * u - CMat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-9);
  // Coherent state |alpha = 1>: Poisson photon statistics.
  CVec vac = CVec::Zero(d);
  vac(0) = 1.0;
  const CVec coh = u * vac;
  CHECK(std::norm(coh(0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(std::norm(coh(2)) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("unitarity of generated gates") {
  for (int d : {8, 14}) {
    const int dim2 = d * d;
    for (const GateDesc& g : {GateDesc::squeeze(0, 0.4), GateDesc::displacement(1, 0.3, -0.5)}) {
      const CMat u = gate_unitary(g, 2, d);
      CHECK((u.adjoint() * u - CMat::Identity(dim2, dim2)).cwiseAbs().maxCoeff() < 1e-9);
    }
    for (const GateDesc& g :
         {GateDesc::beamsplitter(0, 1, 0.7, 0.3), GateDesc::cx(0, 1, 0.8), GateDesc::cx(1, 0, -1.2)}) {
      const CMat u = gate_unitary(g, 2, d);
      CHECK((u.adjoint() * u - CMat::Identity(dim2, dim2)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("apply_gate matches the dense unitary") {
  const int d = 10;
  RngStream rng(fnv1a("fock-apply"));
  FockState state = vacuum_fock(2, d);
  // Put some structure in first.
  apply_gate(state, GateDesc::displacement(0, 0.4, 0.1));
  apply_gate(state, GateDesc::displacement(1, -0.3, 0.2));

  for (const GateDesc& g : {GateDesc::cx(0, 1, 0.9), GateDesc::beamsplitter(0, 1, 0.5, 1.1),
                            GateDesc::squeeze(0, 0.3), GateDesc::displacement(1, 0.2, -0.1)}) {
    FockState via_apply = state;
    apply_gate(via_apply, g);
    const CVec via_dense = gate_unitary(g, 2, d) * state.amplitudes;
    CHECK((via_apply.amplitudes - via_dense).cwiseAbs().maxCoeff() < 1e-12);
    state = via_apply;
  }
}

TEST_CASE("operator-level cx decomposition identity") {
  // Direct generator route vs the beamsplitter/squeezer sequence, compared by
  // action on low-energy states. The vacuum column converges at cutoff 40;
  // excited inputs need cutoff 60 before squeeze truncation drops below 1e-8.
  auto decomposition_error = [](int d, int n1, int n2) {
    const double s = 1.0;
    const double r = std::asinh(-0.5 * s);
    const double theta = -0.5 * std::acos(-std::tanh(r));
    FockState direct = vacuum_fock(2, d);
    direct.amplitudes.setZero();
    direct.amplitudes(n1 * d + n2) = 1.0;
    FockState dec = direct;
    apply_gate(direct, GateDesc::cx(0, 1, s));
    apply_gate(dec, GateDesc::beamsplitter(0, 1, theta, 0.0));
    apply_gate(dec, GateDesc::squeeze(0, r));
    apply_gate(dec, GateDesc::squeeze(1, -r));
    apply_gate(dec, GateDesc::beamsplitter(0, 1, M_PI_2 + theta, 0.0));
    return (direct.amplitudes - dec.amplitudes).cwiseAbs().maxCoeff();
  };

  CHECK(decomposition_error(40, 0, 0) < 1e-8);
  CHECK(decomposition_error(60, 1, 0) < 1e-8);
  CHECK(decomposition_error(60, 0, 1) < 1e-8);
  CHECK(decomposition_error(60, 1, 1) < 1e-8);
  // Doubling the cutoff only tightens the agreement (truncation-converged).
  CHECK(decomposition_error(80, 0, 0) < decomposition_error(40, 0, 0));
}

TEST_CASE("simulate") {
  SubstrateConfig cfg;
  cfg.modes = 2;
  cfg.thetas = {0.0, 0.0};
  cfg.s_max = 1.0;
  cfg.encoding_scale = 1.0;

  Vec zero = Vec::Zero(2);
  const FockState vac = simulate(zero, cfg, 8);
  CHECK(std::abs(vac.amplitudes(0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac.tail_mass() < 1e-20);

  SubstrateConfig one_mode;
  one_mode.modes = 1;
  one_mode.thetas = {0.0};
  one_mode.encoding_scale = 1.0;
  Vec x1(1);
  x1 << 1.0;
  const FockState coherent = simulate(x1, one_mode, 30);
  CHECK(oracle_moments(coherent)[0].nbar == doctest::Approx(1.0).epsilon(1e-8));

  const SubstrateConfig random_cfg = draw_substrate(2, 1.0, 77, Scheme::Pnr, 1.0);
  Vec x(2);
  x << 0.6, -0.8;
  const FockState out = simulate(x, random_cfg, 40);
  CHECK(out.tail_mass() < 1e-10);

  // A displacement far too large for a tiny cutoff must be reported.
  SubstrateConfig hot = one_mode;
  Vec big(1);
  big << 3.5;
  CHECK_THROWS_AS(simulate(big, hot, 6), CutoffError);
}

TEST_CASE("three-mode substrate agrees with the covariance pipeline") {
  SubstrateConfig cfg = draw_substrate(3, 0.6, 314, Scheme::Pnr, 1.0);
  Vec x(3);
  x << 0.4, -0.3, 0.5;
  const FockState fock = simulate(x, cfg, 18);
  CHECK(fock.tail_mass() < 1e-10);
  const auto mm = oracle_moments(fock);
  const GaussianState state = forward(x, cfg);
  const FeatureVector pnr = pnr_features(state);
  const FeatureVector hom = homodyne_features(state);
  for (int m = 0; m < 3; ++m) {
    CHECK(std::abs(pnr.values(m) - mm[m].nbar) <= 1e-6);
    CHECK(std::abs(pnr.values(3 + m) - mm[m].var_n) <= 1e-6);
    CHECK(std::abs(hom.values(m) - mm[m].x) <= 1e-6);
    CHECK(std::abs(hom.values(3 + m) - mm[m].p) <= 1e-6);
    CHECK(std::abs(hom.values(6 + m) - mm[m].xx) <= 1e-6);
    CHECK(std::abs(hom.values(9 + m) - mm[m].pp) <= 1e-6);
    CHECK(std::abs(hom.values(12 + m) - mm[m].xp) <= 1e-6);
  }
  CHECK_THROWS_AS(simulate(Vec::Zero(4), draw_substrate(4, 0.5, 1), 8), InvalidArgument);
}

TEST_CASE("oracle moments of basis states") {
  const FockState vac = vacuum_fock(1, 12);
  const ModeMoments m0 = oracle_moments(vac)[0];
  CHECK(m0.nbar == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m0.var_n == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m0.xx == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m0.pp == doctest::Approx(0.5).epsilon(1e-14));

  FockState single = vacuum_fock(1, 12);
  single.amplitudes(0) = 0.0;
  single.amplitudes(1) = 1.0;
  const ModeMoments m1 = oracle_moments(single)[0];
  CHECK(m1.nbar == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m1.var_n == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m1.xx == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m1.x == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("squeezed vacuum moments match closed forms") {
  FockState state = vacuum_fock(1, 60);
  apply_gate(state, GateDesc::squeeze(0, 0.5));
  const ModeMoments m = oracle_moments(state)[0];
  CHECK(m.nbar == doctest::Approx(std::sinh(0.5) * std::sinh(0.5)).epsilon(1e-7));
  CHECK(m.var_n == doctest::Approx(0.5 * std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-7));
  CHECK(m.nbar == doctest::Approx(0.27154).epsilon(1e-4));
  CHECK(m.var_n == doctest::Approx(0.69055).epsilon(1e-4));
  CHECK(m.xx == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-7));
  CHECK(m.pp == doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-7));
}

TEST_CASE("beamsplitter first moments match the covariance pipeline") {
  // theta = pi/4, phi = 0 on a state with mode 0 displaced.
  FockState fock = vacuum_fock(2, 40);
  apply_gate(fock, GateDesc::displacement(0, 0.9, 0.0));
  apply_gate(fock, GateDesc::beamsplitter(0, 1, M_PI / 4.0, 0.0));
  const auto moments = oracle_moments(fock);

  GaussianState g = apply(vacuum_state(2), displacement_gate(2, 0, 0.9, 0.0));
  g = apply(g, beamsplitter_gate(2, 0, 1, M_PI / 4.0, 0.0));
  for (int m = 0; m < 2; ++m) {
    auto [mu, v] = mode_marginal(g, m);
    CHECK(moments[m].x == doctest::Approx(mu(0)).epsilon(1e-6));
    CHECK(moments[m].p == doctest::Approx(mu(1)).epsilon(1e-6));
  }
}
