#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "irssec/surrogate.hpp"
#include "oracles.hpp"

using namespace irssec;
using namespace oracle;

namespace {

double scale_of(int i) { return std::pow(10.0, -3.0 + 4.0 * (i % 9) / 8.0); }

}  // namespace

TEST_CASE("log-det bound") {
  Rng rng(101);
  CHECK(ineq_logdet_lb(CVec::Zero(3), 2.0, CVec::Zero(3), 2.0) == 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + int(rng.uniform(0, 4));
    const CVec lb = random_cvec(n, rng);
    const double Fb = rng.uniform(0.05, 5);
    const double truth_b = std::log1p(lb.squaredNorm() / Fb);
    CHECK(std::abs(ineq_logdet_lb(lb, Fb, lb, Fb) - truth_b) <= 1e-9 * std::max(1.0, truth_b));
    const double s = scale_of(trial);
    const CVec l = lb + random_cvec(n, rng, s);
    const double F = std::max(1e-3, Fb * std::exp(rng.uniform(-s, s)));
    CHECK(ineq_logdet_lb(l, F, lb, Fb) <= std::log1p(l.squaredNorm() / F) + 1e-9);
  }
  CHECK_THROWS_AS(ineq_logdet_lb(CVec::Ones(1), 0.0, CVec::Ones(1), 1.0), std::domain_error);
  CHECK_THROWS_AS(ineq_logdet_lb(CVec::Ones(1), 1.0, CVec::Ones(1), -1.0), std::domain_error);
}

TEST_CASE("log-sum and negative-log bounds") {
  Rng rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + int(rng.uniform(0, 4));
    const CVec zb = random_cvec(n, rng);
    const CVec z = zb + random_cvec(n, rng, scale_of(trial));
    CHECK(std::abs(ineq_log_sum_lb(zb, zb) - std::log1p(zb.squaredNorm())) <= 1e-9 * std::max(1.0, zb.squaredNorm()));
    CHECK(ineq_log_sum_lb(z, zb) <= std::log1p(z.squaredNorm()) + 1e-9);

    const double Ab = rng.uniform(-0.9, 10), A = std::max(-0.999, Ab + rng.uniform(-1, 1) * 5 * scale_of(trial));
    CHECK(std::abs(ineq_neglog_lb(Ab, Ab) + std::log1p(Ab)) <= 1e-12);
    CHECK(ineq_neglog_lb(A, Ab) <= -std::log1p(A) + 1e-9);
  }
  CHECK_THROWS_AS(ineq_neglog_lb(-1.0, 0.0), std::domain_error);
}

TEST_CASE("square-root and ratio bounds") {
  Rng rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    const double xb = rng.uniform(1e-4, 3), x = std::max(0.0, xb + rng.uniform(-1, 1) * 3 * scale_of(trial));
    CHECK(std::abs(ineq_sqrt_ub(xb, xb) - std::sqrt(xb)) <= 1e-12);
    CHECK(ineq_sqrt_ub(x, xb) >= std::sqrt(x) - 1e-9);

    const int n = 1 + int(rng.uniform(0, 3));
    const CVec Ab = random_cvec(n, rng), A = Ab + random_cvec(n, rng, scale_of(trial));
    const double sigma = rng.uniform(0.1, 2), Bb = rng.uniform(0, 4);
    const double B = std::max(0.0, Bb + rng.uniform(-1, 1) * 4 * scale_of(trial));
    CHECK(std::abs(ineq_ratio_lb(Ab, Bb, Ab, Bb, sigma) - Ab.squaredNorm() / (Bb + sigma)) <= 1e-9);
    CHECK(ineq_ratio_lb(A, B, Ab, Bb, sigma) <= A.squaredNorm() / (B + sigma) + 1e-9);
  }
  CHECK_THROWS_AS(ineq_sqrt_ub(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(ineq_ratio_lb(CVec::Ones(1), -2.0, CVec::Ones(1), 1.0, 1.0), std::domain_error);
}

TEST_CASE("beamforming surrogate is a tight minorant") {
  Rng rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 2 + int(rng.uniform(0, 3)), M = 2 + int(rng.uniform(0, 6)), K = 1 + int(rng.uniform(0, 3));
    const bool fbr = trial % 4 != 3;
    const double xk = fbr ? 0.61529 : 0.0, xe = xk;
    const Link link = random_link(N, M, K, rng);
    const DesignState s = random_state(link, rng);
    const WSurrogate ws = build_w_surrogate(link, s, xk, xe);
    CHECK(!ws.minorants.floor_applied);
    const auto h = cascade(link, s.theta);
    for (int k = 0; k < K; ++k) {
      const double truth = secrecy_raw(h, s.W, k, 1.0, xk, xe);
      CHECK(std::abs(ws.eval(k, s.W) - truth) <= 1e-6);
      for (int j = 0; j < K; ++j) {
        const CMat& P = ws.psi[k][j];
        CHECK((P - P.adjoint()).norm() <= 1e-12 * std::max(1.0, P.norm()));
        const double lo = Eigen::SelfAdjointEigenSolver<CMat>(P, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        CHECK(lo >= -1e-9 * std::max(1.0, P.norm()));
      }
    }
    for (int p = 0; p < 200; ++p) {
      std::vector<CVec> W = s.W;
      const double sc = scale_of(p);
      for (auto& w : W) w += random_cvec(N, rng, sc);
      if (p % 2) clamp_power(W, 1.0);
      for (int k = 0; k < K; ++k) CHECK(ws.eval(k, W) <= secrecy_raw(h, W, k, 1.0, xk, xe) + 1e-8);
    }
  }
}

TEST_CASE("beamforming surrogate flags vanishing dispersion") {
  Rng rng(105);
  const Link link = random_link(2, 3, 2, rng);
  DesignState s = random_state(link, rng);
  for (auto& w : s.W) w.setZero();
  CHECK(build_w_surrogate(link, s, 0.6, 0.6).minorants.floor_applied);
  CHECK(!build_w_surrogate(link, s, 0.0, 0.0).minorants.floor_applied);
}

TEST_CASE("phase surrogate is a tight minorant on the unit circle") {
  Rng rng(106);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 2 + int(rng.uniform(0, 3)), M = 1 + int(rng.uniform(0, 8)), K = 1 + int(rng.uniform(0, 3));
    const double xk = trial % 2 ? 0.61529 : 0.0, xe = xk;
    const Link link = random_link(N, M, K, rng);
    const DesignState s = random_state(link, rng);
    const ThetaSurrogateSet ts = build_theta_surrogate(link, s, xk, xe);
    REQUIRE(int(ts.users.size()) == K);
    for (int k = 0; k < K; ++k)
      CHECK(std::abs(ts.users[k].eval(s.theta) - secrecy_raw(link, s, k, xk, xe)) <= 1e-6);
    for (int p = 0; p < 200; ++p) {
      DesignState t = s;
      if (p % 2) {
        t.theta = random_phases(M, rng);
      } else {
        for (int m = 0; m < M; ++m) t.theta(m) = wrap_phase(s.theta(m) + rng.uniform(-1, 1) * scale_of(p));
      }
      for (int k = 0; k < K; ++k) CHECK(ts.users[k].eval(t.theta) <= secrecy_raw(link, t, k, xk, xe) + 1e-8);
    }
  }
}

TEST_CASE("single-element phase surrogate") {
  Rng rng(107);
  const Link link = random_link(2, 1, 1, rng);
  const DesignState s = random_state(link, rng);
  const ThetaSurrogate t = build_theta_surrogate(link, s, 0.6, 0.6).users[0];
  REQUIRE(t.y.size() == 1);
  const PhaseVector best = maximize_phases(t.y);
  CHECK(best(0) == doctest::Approx(wrap_phase(-std::arg(t.y(0)))));
  for (int i = 0; i < 360; ++i) {
    PhaseVector g(1);
    g << kTwoPi * i / 360.0;
    CHECK(t.eval(g) <= t.eval(best) + 1e-12);
  }
}

TEST_CASE("elementwise phase maximizer") {
  CVec y(3);
  y << cd(2.5, 0), std::polar(1.7, 0.9), cd(0, 0);
  const PhaseVector t = maximize_phases(y);
  CHECK(t(0) == 0.0);
  CHECK(t(1) == doctest::Approx(kTwoPi - 0.9));
  CHECK(t(2) == 0.0);
  for (int m = 0; m < 2; ++m) CHECK((y(m) * std::exp(cd(0, t(m)))).real() == doctest::Approx(std::abs(y(m))));
  Rng rng(108);
  for (int trial = 0; trial < 100; ++trial) {
    const PhaseVector p = maximize_phases(random_cvec(6, rng));
    for (int m = 0; m < 6; ++m) {
      CHECK(p(m) >= 0);
      CHECK(p(m) < kTwoPi);
    }
  }
}

TEST_CASE("closed-form phase update") {
  Rng rng(109);
  CHECK_THROWS_AS(closed_form_theta({}), std::invalid_argument);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 1 + int(rng.uniform(0, 4)), M = 2 + int(rng.uniform(0, 8));
    std::vector<ThetaSurrogate> s(K);
    for (auto& u : s) {
      u.x = rng.uniform(-1, 1);
      u.y = random_cvec(M, rng);
    }
    const PhaseVector inc = random_phases(M, rng);
    auto min_of = [&](const PhaseVector& t) {
      double v = 1e300;
      for (const auto& u : s) v = std::min(v, u.eval(t));
      return v;
    };
    const PhaseVector out = closed_form_theta(s, &inc);
    CHECK(min_of(out) >= min_of(inc) - 1e-9);
    for (int m = 0; m < M; ++m) {
      CHECK(out(m) >= 0);
      CHECK(out(m) < kTwoPi);
    }
    for (const auto& u : s) CHECK(min_of(out) >= min_of(maximize_phases(u.y)) - 1e-12);
    if (K == 1) {
      const PhaseVector only = closed_form_theta(s);
      CHECK((only - maximize_phases(s[0].y)).norm() == 0.0);
      CHECK(s[0].eval(only) >= s[0].eval(inc));
    }
    const PhaseVector sum = closed_form_theta_sum(s, &inc);
    double a = 0, b = 0;
    for (const auto& u : s) {
      a += u.eval(sum);
      b += u.eval(inc);
    }
    CHECK(a >= b - 1e-9);
  }
}
