#include "doctest.h"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "irssec/conic.hpp"
#include "irssec/rng.hpp"

using namespace irssec;

namespace {

// Vertex enumeration oracle for tiny LPs: maximize c.x s.t. A x <= b.
double lp_by_vertices(const RMat& A, const RVec& b, const RVec& c) {
  const int m = int(A.rows()), n = int(A.cols());
  double best = -1e300;
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      RMat As(n, n);
      RVec bs(n);
      for (int i = 0; i < n; ++i) {
        As.row(i) = A.row(idx[i]);
        bs(i) = b(idx[i]);
      }
      Eigen::FullPivLU<RMat> lu(As);
      if (lu.rank() < n) return;
      RVec x = lu.solve(bs);
      if (((A * x - b).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("lp matches vertex enumeration") {
  Rng rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2, m = 6;
    RMat A(m + 2 * n, n);
    RVec b(m + 2 * n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
      b(i) = rng.uniform(0.5, 2.0);
    }
    for (int j = 0; j < n; ++j) {
      A.row(m + 2 * j).setZero();
      A(m + 2 * j, j) = 1;
      A.row(m + 2 * j + 1).setZero();
      A(m + 2 * j + 1, j) = -1;
      b(m + 2 * j) = b(m + 2 * j + 1) = 3;
    }
    RVec c(n);
    for (int j = 0; j < n; ++j) c(j) = rng.normal();

    ConicProblem p;
    for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j));
    Affine obj;
    for (int j = 0; j < n; ++j) obj += Affine::var(j, c(j));
    p.set_objective(obj);
    for (int i = 0; i < A.rows(); ++i) {
      Affine row(b(i));
      for (int j = 0; j < n; ++j) row -= Affine::var(j, A(i, j));
      p.nonneg(row);
    }
    auto sol = solve(p);
    REQUIRE(sol.optimal());
    CHECK(sol.objective == doctest::Approx(lp_by_vertices(A, b, c)).epsilon(1e-6));
    CHECK(verify(p, sol.x, 1e-7).pass);
  }
}

TEST_CASE("soc: maximize linear over a ball") {
  Rng rng(3, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4;
    RVec c(n), ctr(n);
    for (int j = 0; j < n; ++j) {
      c(j) = rng.normal();
      ctr(j) = rng.normal();
    }
    const double r = rng.uniform(0.5, 2);
    ConicProblem p;
    for (int j = 0; j < n; ++j) p.add_variable("x");
    Affine obj;
    for (int j = 0; j < n; ++j) obj += Affine::var(j, c(j));
    p.set_objective(obj);
    std::vector<Affine> e{Affine(r)};
    for (int j = 0; j < n; ++j) e.push_back(Affine::var(j) - Affine(ctr(j)));
    p.add(vector_block(ConeKind::SOC, e, "ball"));
    auto sol = solve(p);
    INFO(to_string(sol.status), " ", sol.message, " it=", sol.iterations, " pr=", sol.primal_residual, " dr=", sol.dual_residual, " gap=", sol.gap);
    REQUIRE(sol.optimal());
    CHECK(sol.objective == doctest::Approx(c.dot(ctr) + r * c.norm()).epsilon(1e-7));
  }
}

TEST_CASE("psd: minimum t with t I - A psd is the top eigenvalue") {
  Rng rng(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4;
    CMat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.cnormal();
    A = (A + A.adjoint()).eval();
    ConicProblem p;
    int t = p.add_variable("t");
    p.set_objective(Affine::var(t, -1));
    AffineHermitianBlock H(n, "lmi");
    H.constant = -A;
    H.add_term(t, CMat::Identity(n, n));
    p.add(H);
    auto sol = solve(p);
    REQUIRE(sol.optimal());
    double top = Eigen::SelfAdjointEigenSolver<CMat>(A).eigenvalues().maxCoeff();
    CHECK(sol.x(t) == doctest::Approx(top).epsilon(1e-7));
  }
}

TEST_CASE("psd: 2x2 with off-diagonal one") {
  ConicProblem p;
  int x = p.add_variable("x");
  p.set_objective(Affine::var(x, -1));
  AffineHermitianBlock H(2);
  H.add(0, 0, Affine::var(x));
  H.add(1, 1, Affine::var(x));
  H.add_constant(0, 1, 1.0);
  p.add(H);
  auto sol = solve(p);
  REQUIRE(sol.optimal());
  CHECK(sol.x(x) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("infeasible problem is reported") {
  ConicProblem p;
  int x = p.add_variable("x");
  p.set_objective(Affine::var(x));
  p.nonneg(Affine::var(x) - Affine(2.0));
  p.nonneg(Affine(1.0) - Affine::var(x));
  CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded problem is reported") {
  ConicProblem p;
  int x = p.add_variable("x");
  p.set_objective(Affine::var(x));
  p.nonneg(Affine::var(x));
  CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("dump round trip") {
  ConicProblem p;
  int x = p.add_variable("x"), y = p.add_variable("y");
  p.set_objective(Affine::var(x) + Affine::var(y, 2));
  p.add(vector_block(ConeKind::SOC, {Affine(1.0), Affine::var(x), Affine::var(y)}, "unit"));
  AffineHermitianBlock H(2, "h");
  H.add(0, 0, Affine(2.0) - Affine::var(x));
  H.add(1, 1, Affine(2.0));
  H.add(0, 1, Affine::var(y), cd(0, 1));
  p.add(H);
  std::stringstream ss;
  write_problem(ss, p);
  ConicProblem q = read_problem(ss);
  CHECK(q.n == 2);
  CHECK(q.blocks.size() == 2);
  CHECK(solve(q).objective == doctest::Approx(solve(p).objective).epsilon(1e-9));
}

TEST_CASE("check rejects malformed problems") {
  ConicProblem p;
  p.add_variable("x");
  p.add_variable("unused");
  p.set_objective(Affine::var(0));
  p.nonneg(Affine::var(0));
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
  AffineHermitianBlock H(2);
  H.constant(0, 1) = 1.0;
  CHECK_THROWS_AS(H.check_hermitian(), std::invalid_argument);
}
