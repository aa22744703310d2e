// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "irssec/algorithms.hpp"
#include "irssec/surrogate.hpp"
#include "oracles.hpp"

using namespace irssec;
using namespace oracle;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Scenario sized(int N, int M, int K) {
  Scenario sc;
  sc.N = N;
  sc.M = M;
  sc.K = K;
  return sc;
}

Link link_for(const Scenario& sc, std::uint64_t seed) {
  Rng rng(seed, 0);
  return make_link(generate_channels(sc, rng), sc.noise_power(), sc.P);
}

RunResult run(const Link& link, const Scenario& sc, bool fbr, bool robust, Objective obj, std::uint64_t seed,
              InitMode init = InitMode::Random) {
  RunConfig cfg;
  cfg.fbr = fbr;
  cfg.robust = robust;
  cfg.objective = obj;
  cfg.seed = seed;
  cfg.init = init;
  cfg.params = AlgoParams::from(sc);
  return run_algorithm(link, sc, cfg);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_drop(const std::vector<double>& series) {
  double worst = 0;
  for (size_t i = 1; i < series.size(); ++i) worst = std::max(worst, series[i - 1] - series[i]);
  return worst;
}

// Shared between criteria 1, 3, 5 and 9.
struct SmallSuite {
  Scenario sc = sized(4, 8, 2);
  std::vector<Link> links;
  std::vector<RunResult> fbr, lbr, robust;
};

SmallSuite& small_suite() {
  static SmallSuite s = [] {
    SmallSuite out;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      out.links.push_back(link_for(out.sc, seed));
      out.fbr.push_back(run(out.links.back(), out.sc, true, false, Objective::MaxMin, seed));
      out.lbr.push_back(run(out.links.back(), out.sc, false, false, Objective::MaxMin, seed));
      out.robust.push_back(run(out.links.back(), out.sc, false, true, Objective::MaxMin, seed));
    }
    return out;
  }();
  return s;
}

Outcome monotone_ao() {
  SmallSuite& s = small_suite();
  Outcome o;
  int bad_mono = 0, bad_conv = 0, max_it = 0;
  double worst = 0;
  for (const auto* group : {&s.fbr, &s.lbr, &s.robust})
    for (const RunResult& r : *group) {
      const double d = max_drop(r.trace.objective_series());
      worst = std::max(worst, d);
      if (d > 1e-6) ++bad_mono;
      if (r.trace.status != RunStatus::Converged || r.trace.iterations > 50) ++bad_conv;
      max_it = std::max(max_it, r.trace.iterations);
    }
  o.pass = !bad_mono && !bad_conv;
  o.detail = fmt("60 runs (perfect FBR, perfect LBR, robust LBR); largest drop %.2e, non-monotone %d, "
                 "unconverged %d, max iterations %d",
                 worst, bad_mono, bad_conv, max_it);
  return o;
}

Outcome surrogates() {
  Rng rng(2024);
  double tight = 0, viol = 0;
  const double scales[] = {1e-3, 1e-2, 1e-1, 1, 3};
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 1 + inst % 3;
    const CVec lb = random_cvec(n, rng), zb = random_cvec(n, rng), Ab = random_cvec(n, rng);
    const double Fb = rng.uniform(0.1, 3), Nb = rng.uniform(-0.5, 4), xb = rng.uniform(1e-3, 3), Bb = rng.uniform(0, 3);
    const double sigma = rng.uniform(0.2, 2);
    tight = std::max({tight, std::abs(ineq_logdet_lb(lb, Fb, lb, Fb) - std::log1p(lb.squaredNorm() / Fb)),
                      std::abs(ineq_log_sum_lb(zb, zb) - std::log1p(zb.squaredNorm())),
                      std::abs(ineq_neglog_lb(Nb, Nb) + std::log1p(Nb)),
                      std::abs(ineq_sqrt_ub(xb, xb) - std::sqrt(xb)),
                      std::abs(ineq_ratio_lb(Ab, Bb, Ab, Bb, sigma) - Ab.squaredNorm() / (Bb + sigma))});
    for (int p = 0; p < 200; ++p) {
      const double s = scales[p % 5];
      const CVec l = lb + random_cvec(n, rng, s), z = zb + random_cvec(n, rng, s), A = Ab + random_cvec(n, rng, s);
      const double F = std::max(1e-3, Fb * std::exp(rng.uniform(-s, s)));
      const double N = std::max(-0.999, Nb + rng.uniform(-s, s));
      const double x = std::max(0.0, xb + rng.uniform(-s, s)), B = std::max(0.0, Bb + rng.uniform(-s, s));
      viol = std::max({viol, ineq_logdet_lb(l, F, lb, Fb) - std::log1p(l.squaredNorm() / F),
                       ineq_log_sum_lb(z, zb) - std::log1p(z.squaredNorm()), ineq_neglog_lb(N, Nb) + std::log1p(N),
                       std::sqrt(x) - ineq_sqrt_ub(x, xb), ineq_ratio_lb(A, B, Ab, Bb, sigma) - A.squaredNorm() / (B + sigma)});
    }
  }
  double wt = 0, wv = 0, tt = 0, tv = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const int N = 2 + inst % 3, M = 2 + inst % 7, K = 1 + inst % 3;
    const double xi = inst % 4 == 3 ? 0.0 : 0.61529;
    const Link link = random_link(N, M, K, rng);
    const DesignState s = random_state(link, rng);
    const WSurrogate ws = build_w_surrogate(link, s, xi, xi);
    const ThetaSurrogateSet ts = build_theta_surrogate(link, s, xi, xi);
    const auto h = cascade(link, s.theta);
    for (int k = 0; k < K; ++k) {
      const double truth = secrecy_raw(h, s.W, k, 1.0, xi, xi);
      wt = std::max(wt, std::abs(ws.eval(k, s.W) - truth));
      tt = std::max(tt, std::abs(ts.users[k].eval(s.theta) - truth));
    }
    for (int p = 0; p < 200; ++p) {
      const double sc = scales[p % 5];
      std::vector<CVec> W = s.W;
      for (auto& w : W) w += random_cvec(N, rng, sc);
      DesignState t = s;
      for (int m = 0; m < M; ++m) t.theta(m) = wrap_phase(s.theta(m) + rng.uniform(-1, 1) * sc);
      const auto ht = cascade(link, t.theta);
      for (int k = 0; k < K; ++k) {
        wv = std::max(wv, ws.eval(k, W) - secrecy_raw(h, W, k, 1.0, xi, xi));
        tv = std::max(tv, ts.users[k].eval(t.theta) - secrecy_raw(ht, s.W, k, 1.0, xi, xi));
      }
    }
  }
  Outcome o;
  o.pass = std::max({tight, wt, tt}) <= 1e-6 && std::max({viol, wv, tv}) <= 1e-8;
  o.detail = fmt("inequalities: tightness %.1e, violation %.1e; beam surrogate %.1e / %.1e; phase surrogate %.1e / %.1e",
                 tight, std::max(viol, 0.0), wt, std::max(wv, 0.0), tt, std::max(tv, 0.0));
  return o;
}

Outcome robust_soundness() {
  SmallSuite& s = small_suite();
  Outcome o;
  double margin = 1e300;
  int checked = 0, failed = 0;
  for (size_t i = 0; i < s.robust.size(); ++i) {
    const RunResult& r = s.robust[i];
    if (r.certified_users.empty()) continue;
    const SoundnessReport rep = sample_worst_rates(s.links[i], r.state, 0, 0, 1000, 7000 + i);
    ++checked;
    bool ok = rep.worst_min >= r.certified - 1e-4;
    margin = std::min(margin, rep.worst_min - r.certified);
    for (size_t k = 0; k < rep.worst.size(); ++k) {
      ok = ok && rep.worst[k] >= r.certified_users[k] - 1e-4;
      margin = std::min(margin, rep.worst[k] - r.certified_users[k]);
    }
    if (!ok) ++failed;
  }
  o.pass = checked == int(s.robust.size()) && !failed;
  o.detail = fmt("%d robust designs x 1000 samples per node at delta=0.02; failures %d; worst margin %.3e nats", checked,
                 failed, margin);
  return o;
}

double jain_or(const SecrecyReport& r, bool fbr, double if_undefined) {
  const double j = r.jain(fbr);
  return std::isnan(j) ? if_undefined : j;
}

Outcome fairness(std::vector<std::pair<double, double>>* pairs) {
  const Scenario sc = sized(10, 16, 5);
  std::vector<double> mm[2], ss[2];
  int undefined[2] = {0, 0};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Link link = link_for(sc, seed);
    for (int fbr = 0; fbr < 2; ++fbr) {
      const RunResult a = run(link, sc, fbr, false, Objective::MaxMin, seed);
      const RunResult b = run(link, sc, fbr, false, Objective::Sum, seed);
      // An all-zero rate vector has no Jain index; count it against the claim being tested.
      if (std::isnan(a.report.jain(fbr))) ++undefined[fbr];
      mm[fbr].push_back(jain_or(a.report, fbr, 0.0));
      ss[fbr].push_back(jain_or(b.report, fbr, 1.0));
      if (fbr) {
        const RunResult la = run(link, sc, false, false, Objective::MaxMin, seed);
        pairs->push_back({a.report.min_sr(true), la.report.min_sr(false)});
      }
    }
  }
  const double mf = median(mm[1]), ml = median(mm[0]), sf = median(ss[1]), sl = median(ss[0]);
  Outcome o;
  o.pass = mf >= 0.9 && ml >= 0.9 && sf <= mf - 0.2 && sl <= ml - 0.2;
  o.detail = fmt("median Jain max-min FBR %.3f (%d/10 all-zero), max-min LBR %.3f, SSR FBR %.3f, SSR LBR %.3f", mf,
                 undefined[1], ml, sf, sl);
  return o;
}

Outcome ordering(const std::vector<std::pair<double, double>>& extra) {
  SmallSuite& s = small_suite();
  int pairs = 0, violations = 0;
  auto check = [&](double f, double l) {
    ++pairs;
    if (f > l + 1e-9) ++violations;
  };
  for (size_t i = 0; i < s.fbr.size(); ++i) check(s.fbr[i].report.min_sr(true), s.lbr[i].report.min_sr(false));
  for (const auto& [f, l] : extra) check(f, l);

  Scenario big = s.sc;
  big.t_t = 1e7 / big.bandwidth;
  double worst = 0;
  for (size_t i = 0; i < s.links.size(); ++i) {
    const RunResult f = run(s.links[i], big, true, false, Objective::MaxMin, i + 1);
    const double l = s.lbr[i].report.min_sr(false), fv = f.report.min_sr(true);
    check(fv, l);
    worst = std::max(worst, std::abs(fv - l) / std::max(l, 1e-12));
  }
  Outcome o;
  o.pass = !violations && worst <= 0.01;
  o.detail = fmt("%d paired runs, FBR above LBR in %d; N_t=1e7 worst relative gap %.4f over 20 seeds", pairs,
                 violations, worst);
  return o;
}

Outcome degradation_in_k() {
  Outcome o;
  std::string detail;
  for (int fbr = 0; fbr < 2; ++fbr) {
    std::vector<double> med;
    for (int K : {2, 4, 6}) {
      const Scenario sc = sized(10, 16, K);
      std::vector<double> v;
      for (std::uint64_t seed = 1; seed <= 10; ++seed)
        v.push_back(nats_to_bits(run(link_for(sc, seed), sc, fbr, false, Objective::MaxMin, seed).report.min_sr(fbr)));
      med.push_back(median(v));
    }
    int inversions = 0;
    bool large = false;
    for (size_t i = 1; i < med.size(); ++i)
      if (med[i] > med[i - 1]) {
        ++inversions;
        large = large || med[i] > med[i - 1] * 1.05;
      }
    o.pass = o.pass && inversions <= 1 && !large;
    detail += fmt("%s medians (K=2,4,6) %.4f %.4f %.4f bps/Hz; ", fbr ? "FBR" : "LBR", med[0], med[1], med[2]);
  }
  o.detail = detail.substr(0, detail.size() - 2);
  return o;
}

double q_inverse_bisect(double tau) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome xi_oracle() {
  const double xi = penalty_xi(1e-5, 100), ref = q_inverse_bisect(1e-5) / (std::log(2.0) * 10.0);
  Outcome o;
  o.pass = std::abs(xi - 0.61529) <= 1e-4 && std::abs(xi - ref) <= 1e-4;
  o.detail = fmt("penalty_xi(1e-5, 100) = %.6f, bisection oracle %.6f", xi, ref);
  return o;
}

Outcome brute_force() {
  const Scenario sc = sized(2, 2, 1);
  Outcome o;
  double worst = 1e300;
  int zero = 0, runs = 0;
  for (int fbr = 0; fbr < 2; ++fbr)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Link link = link_for(sc, seed);
      const auto [xk, xe] = xi_pair(sc, fbr);
      const double alg = run(link, sc, fbr, false, Objective::MaxMin, seed).report.min_sr(fbr);
      double best = 0;
      DesignState g;
      g.theta = PhaseVector(2);
      for (int i = 0; i < 360; ++i)
        for (int j = 0; j < 360; ++j) {
          g.theta << kTwoPi * i / 360.0, kTwoPi * j / 360.0;
          const CRow h = cascade(link, g.theta)[0];
          g.W = {CVec(h.adjoint() * (std::sqrt(link.power) / h.norm()))};
          best = std::max(best, evaluate(link, g, xk, xe).min_sr(fbr));
        }
      ++runs;
      if (best == 0) ++zero;
      if (alg < 0.95 * best) o.pass = false;
      if (best > 0) worst = std::min(worst, alg / best);
    }
  o.detail = fmt("%d instances (FBR and LBR); worst algorithm/grid ratio %.4f; %d instances with zero grid optimum", runs,
                 worst, zero);
  return o;
}

Outcome pccp_contract() {
  SmallSuite& s = small_suite();
  int calls = 0, bad = 0;
  double worst_t = 0, worst_mod = 0, worst_proj = 0;
  for (const RunResult& r : s.robust)
    for (const PccpRecord& p : r.trace.pccp) {
      ++calls;
      const double proj = std::abs(p.projected_objective - p.relaxed_objective) / std::max(std::abs(p.relaxed_objective), 1e-12);
      worst_t = std::max(worst_t, p.penalty);
      worst_mod = std::max(worst_mod, p.modulus_dev);
      worst_proj = std::max(worst_proj, proj);
      if (p.penalty > 1e-3 || p.modulus_dev > 0.05 || proj > 0.02) ++bad;
    }
  Outcome o;
  o.pass = calls > 0 && !bad;
  o.detail = fmt("%d PCCP calls; worst penalty %.2e, modulus deviation %.3f, projection change %.4f; violations %d", calls,
                 worst_t, worst_mod, worst_proj, bad);
  return o;
}

double min_eig(const RMat& S) { return Eigen::SelfAdjointEigenSolver<RMat>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff(); }

// Residuals recomputed here with a dense eigensolver, compared with verify().
double replay_gap(const ConicProblem& p, const RVec& x) {
  const VerifyReport rep = verify(p, x, 1e-7);
  double gap = 0;
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const ConeBlock& blk = p.blocks[b];
    const RVec v = blk.value(x);
    double mine;
    if (blk.kind == ConeKind::Nonneg)
      mine = v.minCoeff();
    else if (blk.kind == ConeKind::SOC)
      mine = v(0) - v.tail(v.size() - 1).norm();
    else
      mine = min_eig(Eigen::Map<const RMat>(v.data(), blk.dim, blk.dim));
    gap = std::max(gap, std::abs(mine - rep.residual[b]));
  }
  return gap;
}

Outcome conic_examples() {
  Outcome o;
  double gap = 0;

  ConicProblem a;
  const int lam = a.add_variable("lambda");
  a.set_objective(Affine::var(lam, -1));
  AffineHermitianBlock H(2, "lmi");
  H.constant = -CMat(RVec((RVec(2) << 1, 2).finished()).cast<cd>().asDiagonal());
  H.add_term(lam, CMat::Identity(2, 2));
  a.add(H);
  const ConicSolution sa = solve(a);
  const double e1 = std::abs(sa.x(lam) - 2);
  gap = std::max(gap, replay_gap(a, sa.x));

  ConicProblem b;
  const int x = b.add_variable("x");
  b.set_objective(Affine::var(x, -1));
  AffineHermitianBlock D(2, "det");
  D.add(0, 0, Affine::var(x));
  D.add(1, 1, Affine::var(x));
  D.add_constant(0, 1, 1.0);
  b.add(D);
  const ConicSolution sb = solve(b);
  const double e2 = std::abs(sb.x(x) - 1);
  gap = std::max(gap, replay_gap(b, sb.x));
  RVec bad = sb.x;
  bad(x) -= 1e-2;
  const bool negative = !verify(b, bad, 1e-8).pass;

  Rng rng(17, 0);
  double e3 = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3, m = 6;
    RMat A(m + 2 * n, n);
    RVec rhs(m + 2 * n), c(n);
    A.setZero();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
      rhs(i) = rng.uniform(0.5, 2.0);
    }
    for (int j = 0; j < n; ++j) {
      A(m + 2 * j, j) = 1;
      A(m + 2 * j + 1, j) = -1;
      rhs(m + 2 * j) = rhs(m + 2 * j + 1) = 3;
      c(j) = rng.normal();
    }
    ConicProblem lp;
    Affine obj;
    for (int j = 0; j < n; ++j) obj += Affine::var(lp.add_variable("x"), c(j));
    lp.set_objective(obj);
    for (int i = 0; i < A.rows(); ++i) {
      Affine row(rhs(i));
      for (int j = 0; j < n; ++j) row -= Affine::var(j, A(i, j));
      lp.nonneg(row);
    }
    const ConicSolution s = solve(lp);
    // Vertex enumeration over every choice of n active rows.
    double best = -1e300;
    const int rows = int(A.rows());
    for (int i = 0; i < rows; ++i)
      for (int j = i + 1; j < rows; ++j)
        for (int k = j + 1; k < rows; ++k) {
          RMat As(3, 3);
          As << A.row(i), A.row(j), A.row(k);
          Eigen::FullPivLU<RMat> lu(As);
          if (lu.rank() < 3) continue;
          const RVec v = lu.solve(RVec((RVec(3) << rhs(i), rhs(j), rhs(k)).finished()));
          if (((A * v - rhs).array() <= 1e-9).all()) best = std::max(best, c.dot(v));
        }
    e3 = std::max(e3, std::abs(s.objective - best));
    gap = std::max(gap, replay_gap(lp, s.x));
    o.pass = o.pass && s.optimal() && verify(lp, s.x, 1e-7).pass;
  }
  o.pass = o.pass && sa.optimal() && sb.optimal() && std::max({e1, e2, e3}) <= 1e-6 && gap <= 1e-10 && negative;
  o.detail = fmt("lambda_max error %.1e, determinant boundary error %.1e, LP vs vertices %.1e; residual replay gap %.1e; "
                 "perturbed point rejected: %s",
                 e1, e2, e3, gap, negative ? "yes" : "no");
  return o;
}

Outcome complexity() {
  std::vector<double> lx, ly;
  std::string detail;
  for (int M : {8, 16, 32}) {
    const Scenario sc = sized(4, M, 2);
    const Link link = link_for(sc, 1);
    AlgoParams prm = AlgoParams::from(sc);
    const auto [xk, xe] = xi_pair(sc, false);
    RunConfig cfg;
    cfg.fbr = false;
    cfg.params = prm;
    const DesignState s = run_perfect(link, sc, cfg).state;
    const Certificate cert = certify(link, s, xk, xe, Objective::MaxMin, prm);
    prm.n_max = 1;
    std::vector<double> t;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      run_pccp_pre(link, s, cert.expansion, xk, xe, Objective::MaxMin, prm);
      t.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    lx.push_back(std::log(double(M)));
    ly.push_back(std::log(median(t)));
    detail += fmt("M=%d %.3fs ", M, median(t));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
  double num = 0, den = 0;
  for (int i = 0; i < 3; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = num / den;
  Outcome o;
  o.pass = slope <= 4.7;
  o.detail = fmt("reflection-step iteration time %slog-log slope %.2f", detail.c_str(), slope);
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<double, double>> paired;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"monotone AO", monotone_ao},
      {"surrogate correctness", surrogates},
      {"robust certificate soundness", robust_soundness},
      {"fairness trend", [&] { return fairness(&paired); }},
      {"FBR/LBR ordering and limit", [&] { return ordering(paired); }},
      {"degradation in K", degradation_in_k},
      {"dispersion multiplier oracle", xi_oracle},
      {"brute-force equivalence", brute_force},
      {"PCCP exit contract", pccp_contract},
      {"conic solver examples", conic_examples},
      {"empirical complexity", complexity},
  };
  int failed = 0, idx = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%2d] %s  %-30s %s (%.1fs)\n", ++idx, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), sec);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed;
}
