#include "doctest.h"

#include <cmath>

#include "irssec/channel.hpp"

using namespace irssec;

namespace {

CRow random_row(int M, Rng& rng) {
  CRow r(M);
  for (int m = 0; m < M; ++m) r(m) = rng.cnormal();
  return r;
}

PhaseVector random_phases(int M, Rng& rng) {
  PhaseVector t(M);
  for (int m = 0; m < M; ++m) t(m) = rng.uniform(0, kTwoPi);
  return t;
}

}  // namespace

TEST_CASE("path loss from Alice to the surface") {
  CHECK(pathloss_alice_irs(1, 5, 5) == doctest::Approx(-25.9).epsilon(1e-12));
  CHECK(pathloss_alice_irs(50, 5, 5) == doctest::Approx(-63.28).epsilon(1e-4));
  CHECK(pathloss_alice_irs(10, 0, 0) == doctest::Approx(-57.9).epsilon(1e-12));
  CHECK_THROWS_AS(pathloss_alice_irs(0, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(pathloss_alice_irs(-3, 5, 5), std::invalid_argument);
}

TEST_CASE("path loss from the surface to a receiver") {
  CHECK(pathloss_irs_node(1, 5) == doctest::Approx(-28.05).epsilon(1e-12));
  CHECK(pathloss_irs_node(30, 5) == doctest::Approx(-72.36).epsilon(1e-4));
  CHECK(pathloss_irs_node(100, 0) == doctest::Approx(-93.05).epsilon(1e-12));
  CHECK_THROWS_AS(pathloss_irs_node(0, 5), std::invalid_argument);
}

TEST_CASE("noise power follows the density times bandwidth") {
  Scenario sc;
  CHECK(10 * std::log10(sc.noise_power()) + 30 == doctest::Approx(-114.0).epsilon(1e-12));
  CHECK(dbm_to_watt(20) == doctest::Approx(0.1));
  CHECK(db_to_linear(-30) == doctest::Approx(1e-3));
}

TEST_CASE("Alice-to-surface channel entries have the path-loss magnitude") {
  Scenario sc;
  sc.N = 4;
  sc.M = 6;
  Rng rng(7);
  const CMat G = gen_alice_irs_channel(sc, rng);
  const double scale = std::sqrt(db_to_linear(pathloss_alice_irs(distance(sc.geometry.alice, sc.geometry.irs), 5, 5)));
  REQUIRE(G.rows() == 6);
  REQUIRE(G.cols() == 4);
  for (Eigen::Index i = 0; i < G.size(); ++i) CHECK(std::abs(G(i)) == doctest::Approx(scale).epsilon(1e-12));

  sc.N = sc.M = 1;
  Rng r1(3);
  const CMat g = gen_alice_irs_channel(sc, r1);
  CHECK(g.size() == 1);
  CHECK(std::abs(g(0)) == doctest::Approx(scale).epsilon(1e-12));
}

TEST_CASE("generators are pure functions of scenario and seed") {
  Scenario sc;
  sc.N = 3;
  sc.M = 5;
  sc.K = 3;
  Rng a(99), b(99), c(100);
  const ChannelSet x = generate_channels(sc, a), y = generate_channels(sc, b), z = generate_channels(sc, c);
  CHECK(x.L_AR == y.L_AR);
  for (size_t i = 0; i < x.l_hat.size(); ++i) {
    CHECK(x.l_hat[i] == y.l_hat[i]);
    CHECK(x.R[i] == y.R[i]);
    CHECK(x.omega[i] == y.omega[i]);
  }
  CHECK(x.L_AR != z.L_AR);
}

TEST_CASE("spatial correlation is Hermitian PSD with a consistent square root") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int M = 1 + int(rng.uniform(0, 16));
    const CMat R = spatial_correlation(M, rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi));
    CHECK((R - R.adjoint()).norm() < 1e-14);
    for (int m = 0; m < M; ++m) CHECK(std::abs(R(m, m) - cd(1, 0)) < 1e-15);
    const CMat S = correlation_sqrt(R);
    CHECK((S * S.adjoint() - R).norm() < 1e-10 * std::max(1.0, R.norm()));
  }
  CHECK_THROWS_AS(correlation_sqrt(CMat(CMat::Identity(2, 2) * -1.0)), std::runtime_error);
}

TEST_CASE("reflected channel limits") {
  Rng rng(5);
  const int M = 8;
  const double pl = 1e-7;
  const CRow los = reflected_channel(pl, CMat::Identity(M, M), INFINITY, rng);
  for (int m = 0; m < M; ++m) CHECK(std::abs(los(m)) == doctest::Approx(std::sqrt(pl)).epsilon(1e-12));

  // Identity correlation leaves the fading vector unrotated: same draws, same vector.
  Rng r1(21), r2(21);
  const CRow a = reflected_channel(pl, CMat::Identity(M, M), 3.0, r1);
  const double wl = std::sqrt(3.0 / 4.0), wn = std::sqrt(1.0 / 4.0);
  CRow expect(M);
  for (int m = 0; m < M; ++m) {
    const cd l = std::polar(1.0, r2.uniform(0, kTwoPi));
    expect(m) = std::sqrt(pl) * (wl * l + wn * r2.cnormal());
  }
  CHECK((a - expect).norm() < 1e-12 * expect.norm());
}

TEST_CASE("reflected channel mean power") {
  Rng rng(8);
  const int M = 8;
  const double pl = 2.5e-6;
  const CMat R = spatial_correlation(M, 0.7, 0.4);
  double sum = 0;
  const int draws = 10000;
  for (int n = 0; n < draws; ++n) sum += reflected_channel(pl, R, 3.0, rng).squaredNorm();
  CHECK(sum / draws == doctest::Approx(pl * M).epsilon(0.05));
}

TEST_CASE("cascaded channel") {
  Rng rng(13);
  SUBCASE("identity phase with one element") {
    CMat L(1, 3);
    L << cd(1, 2), cd(-1, 0.5), cd(0, 3);
    CRow l(1);
    l << cd(1, 0);
    PhaseVector t(1);
    t << 0.0;
    CHECK((cascaded_channel(l, t, L) - L.row(0)).norm() < 1e-15);
  }
  SUBCASE("sum form and linearity") {
    for (int trial = 0; trial < 25; ++trial) {
      const int M = 1 + int(rng.uniform(0, 12)), N = 1 + int(rng.uniform(0, 6));
      CMat L(M, N);
      for (Eigen::Index i = 0; i < L.size(); ++i) L(i) = rng.cnormal();
      const CRow l = random_row(M, rng), l2 = random_row(M, rng);
      const PhaseVector t = random_phases(M, rng);
      CRow sum = CRow::Zero(N);
      for (int m = 0; m < M; ++m) sum += std::exp(cd(0, t(m))) * l(m) * L.row(m);
      const CRow h = cascaded_channel(l, t, L);
      CHECK((h - sum).norm() < 1e-12 * std::max(1.0, sum.norm()));

      const cd c = rng.cnormal();
      CHECK((cascaded_channel(CRow(c * l), t, L) - c * h).norm() < 1e-12 * std::max(1.0, h.norm()));
      CHECK((cascaded_channel(CRow(l + l2), t, L) - h - cascaded_channel(l2, t, L)).norm() < 1e-12 * (1 + h.norm()));

      CMat L2(M, N);
      for (Eigen::Index i = 0; i < L2.size(); ++i) L2(i) = rng.cnormal();
      const CRow lhs = cascaded_channel(l, t, CMat(L + L2));
      CHECK((lhs - h - cascaded_channel(l, t, L2)).norm() < 1e-12 * (1 + lhs.norm()));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(cascaded_channel(CRow::Ones(3), PhaseVector::Zero(2), CMat::Ones(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(cascaded_channel(CRow::Ones(3), PhaseVector::Zero(3), CMat::Ones(2, 2)), std::invalid_argument);
  }
}

TEST_CASE("reflection coefficients have unit modulus") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const PhaseVector t = random_phases(16, rng);
    const CVec v = unit_modulus(t);
    for (int m = 0; m < 16; ++m) CHECK(std::abs(std::abs(v(m)) - 1.0) <= 2e-16);
  }
  CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_phase(kTwoPi) == 0.0);
  CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - kTwoPi));
}

TEST_CASE("uncertainty radius") {
  CRow l(2);
  l << cd(3, 0), cd(0, 4);
  CHECK(uncertainty_radius(l, 0) == 0.0);
  CHECK(uncertainty_radius(l, 0.02) == doctest::Approx(0.1));
  CHECK(uncertainty_radius(CRow(2.5 * l), 0.02) == doctest::Approx(2.5 * 0.1));
  CHECK_THROWS_AS(uncertainty_radius(l, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(uncertainty_radius(l, -0.1), std::invalid_argument);

  Scenario sc;
  sc.N = 2;
  sc.M = 4;
  sc.K = 2;
  sc.delta_k = 0.0;
  sc.delta_e = 0.05;
  Rng rng(4);
  const ChannelSet ch = generate_channels(sc, rng);
  for (int k = 0; k < 2; ++k) CHECK(ch.omega[k] == 0.0);
  CHECK(ch.omega[2] == doctest::Approx(0.05 * ch.l_hat[2].norm()));
}

TEST_CASE("error-ball sampling") {
  Rng rng(23);
  CHECK(sample_error_ball(0.0, 5, rng).norm() == 0.0);
  const double omega = 0.37;
  double max_norm = 0;
  int near_boundary = 0;
  const int draws = 10000;
  for (int n = 0; n < draws; ++n) {
    const double r = sample_error_ball(omega, 6, rng).norm();
    CHECK(r <= omega + 1e-12);
    max_norm = std::max(max_norm, r);
    near_boundary += r > 0.99 * omega;
  }
  CHECK(max_norm >= 0.999 * omega);
  CHECK(near_boundary >= draws / 10);
}

TEST_CASE("node placement") {
  Scenario sc;
  sc.K = 6;
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pos = place_nodes(sc, rng);
    REQUIRE(pos.size() == 7);
    for (int k = 0; k < 6; ++k) CHECK(sc.geometry.users.contains(pos[k]));
    const Vec3& e = pos[6];
    CHECK(!sc.geometry.users.contains(e));
    CHECK(sc.geometry.eve.contains(e));
    for (int k = 0; k < 6; ++k) CHECK(distance(e, pos[k]) >= sc.geometry.eve_min_distance);
  }
}

TEST_CASE("default geometry") {
  const Geometry g;
  CHECK(g.alice.x == 15);
  CHECK(g.alice.y == 0);
  CHECK(g.alice.z == 15);
  CHECK(g.irs.x == 0);
  CHECK(g.irs.y == 25);
  CHECK(g.irs.z == 40);
  CHECK(g.users.x1 - g.users.x0 == 60);
  CHECK(g.users.y1 - g.users.y0 == 60);
  CHECK(g.eve.x1 - g.eve.x0 == 100);
  CHECK(g.eve.y1 - g.eve.y0 == 100);
}

TEST_CASE("scenario validation names the key") {
  Scenario sc;
  sc.delta_k = 1.5;
  try {
    sc.validate();
    FAIL("expected a validation error");
  } catch (const ScenarioError& e) {
    CHECK(e.key() == "csi.delta_k");
  }
  sc = Scenario{};
  sc.a_init = 40;
  CHECK_THROWS_AS(sc.validate(), ScenarioError);
  sc = Scenario{};
  sc.tau_e = 0.5;
  CHECK_THROWS_AS(sc.validate(), ScenarioError);
}
