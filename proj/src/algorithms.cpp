#include "irssec/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "irssec/surrogate.hpp"

namespace irssec {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIter: return "MaxIter";
    case RunStatus::Safeguarded: return "Safeguarded";
  }
  return "?";
}

AlgoParams AlgoParams::from(const Scenario& sc) {
  AlgoParams p;
  p.eps = sc.eps_t;
  p.eps_t1 = sc.eps_t1;
  p.eps_t2 = sc.eps_t2;
  p.ao_max = sc.ao_max;
  p.n_max = sc.n_max;
  p.a_init = sc.a_init;
  p.a_max = sc.a_max;
  p.nu = sc.nu;
  return p;
}

std::vector<double> RunTrace::objective_series() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.step == "init" || r.step == "iter") out.push_back(r.objective);
  return out;
}

std::pair<double, double> xi_pair(const Scenario& sc, bool fbr) {
  if (!fbr) return {0.0, 0.0};
  return {penalty_xi(sc.tau_k, sc.blocklength()), penalty_xi(sc.tau_e, sc.blocklength())};
}

DesignState init_state(const Link& link, Rng& rng) {
  const int K = link.users();
  DesignState s;
  s.theta = PhaseVector(link.M());
  for (int m = 0; m < link.M(); ++m) s.theta(m) = rng.uniform(0.0, kTwoPi);
  const auto h = cascade_all(link, s.theta);
  const double per_user = std::sqrt(link.power / K);
  for (int k = 0; k < K; ++k) {
    CVec w = h[k].adjoint();
    const double n = w.norm();
    if (n > 0) w *= per_user / n;
    else w = CVec::Constant(link.N(), per_user / std::sqrt(double(link.N())));
    s.W.push_back(w);
  }
  return s;
}

DesignState init_state(const Link& link, const Scenario& sc, const RunConfig& cfg) {
  Rng rng(cfg.seed, 0x1417);
  DesignState s = init_state(link, rng);
  if (cfg.init == InitMode::LbrWarm) {
    RunConfig warm = cfg;
    warm.fbr = false;
    warm.init = InitMode::Random;
    s = run_algorithm(link, sc, warm, &s).state;
  }
  return s;
}

double true_objective(const SecrecyReport& r, bool fbr, Objective obj) {
  return obj == Objective::MaxMin ? r.min_sr_raw(fbr) : r.ssr_raw(fbr);
}

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int beam_var(int N, int j, int n) { return 2 * (j * N + n); }

// Interior-point iterates may sit a hair outside the power ball; pull them back.
std::vector<CVec> read_beams(const RVec& x, int first, int N, int K, double power) {
  std::vector<CVec> W;
  double total = 0;
  for (int j = 0; j < K; ++j) {
    CVec w(N);
    for (int n = 0; n < N; ++n) w(n) = cd(x(first + beam_var(N, j, n)), x(first + beam_var(N, j, n) + 1));
    total += w.squaredNorm();
    W.push_back(w);
  }
  if (total > power)
    for (auto& w : W) w *= std::sqrt(power / total);
  return W;
}

void add_power(ConicProblem& p, int first, int N, int K, double power) {
  std::vector<Affine> e{Affine(std::sqrt(power))};
  for (int i = 0; i < 2 * N * K; ++i) e.push_back(Affine::var(first + i));
  p.add(vector_block(ConeKind::SOC, e, "power"));
}

int add_beam_vars(ConicProblem& p, int N, int K) {
  int first = p.n;
  for (int j = 0; j < K; ++j)
    for (int n = 0; n < N; ++n) {
      p.add_variable("w" + std::to_string(j) + "." + std::to_string(n) + ".re");
      p.add_variable("w" + std::to_string(j) + "." + std::to_string(n) + ".im");
    }
  return first;
}

// Relative change used by every stopping rule.
double rel_change(double now, double before) { return std::abs(now - before) / std::max(std::abs(before), 1e-3); }

TraceRow make_row(int it, const std::string& step, const SecrecyReport& r, bool fbr, double objective) {
  TraceRow row;
  row.iter = it;
  row.step = step;
  row.min_sr = r.min_sr(fbr);
  row.min_sr_raw = r.min_sr_raw(fbr);
  row.ssr = r.ssr(fbr);
  row.objective = objective;
  return row;
}

void check_monotone(RunTrace& tr, double slack) {
  const auto s = tr.objective_series();
  for (size_t i = 1; i < s.size(); ++i)
    if (s[i] < s[i - 1] - slack) {
      std::ostringstream os;
      os << "objective decreased at iteration " << i << ": " << s[i - 1] << " -> " << s[i];
      tr.diagnostic = os.str();
      tr.status = RunStatus::Safeguarded;
      return;
    }
}

}  // namespace

std::vector<CVec> beamforming_step_perfect(const Link& link, const DesignState& s, double xi_k, double xi_e,
                                           Objective obj, StepInfo* info, double tol) {
  const int K = int(s.W.size()), N = link.N();
  WSurrogate ws = build_w_surrogate(link, s, xi_k, xi_e);
  ConicProblem p;
  const int first = add_beam_vars(p, N, K);
  add_power(p, first, N, K, link.power);
  std::vector<int> D;
  if (obj == Objective::MaxMin) D.push_back(p.add_variable("D"));
  else
    for (int k = 0; k < K; ++k) D.push_back(p.add_variable("D" + std::to_string(k)));
  for (int k = 0; k < K; ++k) {
    const AmpMinorant& m = ws.minorants.users[k];
    Affine t(ws.x[k]);
    t -= Affine::var(D[obj == Objective::MaxMin ? 0 : k]);
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n) {
        const cd y = ws.y[k][j](n);
        t += Affine::var(first + beam_var(N, j, n), 2.0 * y.real());
        t += Affine::var(first + beam_var(N, j, n) + 1, 2.0 * y.imag());
      }
    std::vector<Affine> u;
    for (int i = 0; i <= K; ++i)
      for (int j = 0; j < K; ++j) {
        if (m.quad(i, j) <= 0) continue;
        const double sq = std::sqrt(m.quad(i, j));
        Affine re, im;
        for (int n = 0; n < N; ++n) {
          const cd h = ws.h[i](n);
          const int vr = first + beam_var(N, j, n);
          re += Affine::var(vr, sq * h.real()) + Affine::var(vr + 1, -sq * h.imag());
          im += Affine::var(vr, sq * h.imag()) + Affine::var(vr + 1, sq * h.real());
        }
        u.push_back(re);
        u.push_back(im);
      }
    add_rotated_soc(p, u, t, "user" + std::to_string(k));
  }
  Affine objective;
  for (int d : D) objective += Affine::var(d);
  p.set_objective(objective);
  ConicSolution sol = solve(p, tol);
  if (info) {
    info->solver = sol.status;
    info->solver_iters = sol.iterations;
    info->accepted = sol.usable();
    info->surrogate = sol.objective;
  }
  if (!sol.usable()) return s.W;
  return read_beams(sol.x, first, N, K, link.power);
}

PhaseVector pre_step_perfect(const Link& link, const DesignState& s, double xi_k, double xi_e, Objective obj) {
  ThetaSurrogateSet ts = build_theta_surrogate(link, s, xi_k, xi_e);
  return obj == Objective::MaxMin ? closed_form_theta(ts.users, &s.theta) : closed_form_theta_sum(ts.users, &s.theta);
}

namespace {

// Walks further along an improving phase move (doubling the step) while the
// true objective keeps increasing.
void extrapolate_phases(const Link& link, const PhaseVector& from, DesignState& cand, SecrecyReport& rep, double& fc,
                        double xi_k, double xi_e, const RunConfig& cfg) {
  PhaseVector step(from.size());
  for (Eigen::Index m = 0; m < from.size(); ++m) step(m) = std::remainder(cand.theta(m) - from(m), kTwoPi);
  DesignState trial = cand;
  for (double scale = 2; scale <= 64; scale *= 2) {
    for (Eigen::Index m = 0; m < from.size(); ++m) trial.theta(m) = wrap_phase(from(m) + scale * step(m));
    SecrecyReport r = evaluate(link, trial, xi_k, xi_e);
    const double v = true_objective(r, cfg.fbr, cfg.objective);
    if (!(v > fc)) break;
    cand = trial;
    rep = std::move(r);
    fc = v;
  }
}

// Same idea for the beams; trial points are pulled back onto the power ball.
void extrapolate_beams(const Link& link, const std::vector<CVec>& from, DesignState& cand, SecrecyReport& rep,
                       double& fc, double xi_k, double xi_e, const RunConfig& cfg) {
  DesignState trial = cand;
  for (double scale = 2; scale <= 64; scale *= 2) {
    double total = 0;
    for (size_t j = 0; j < from.size(); ++j) {
      trial.W[j] = from[j] + scale * (cand.W[j] - from[j]);
      total += trial.W[j].squaredNorm();
    }
    if (total > link.power)
      for (auto& w : trial.W) w *= std::sqrt(link.power / total);
    SecrecyReport r = evaluate(link, trial, xi_k, xi_e);
    const double v = true_objective(r, cfg.fbr, cfg.objective);
    if (!(v > fc)) break;
    cand.W = trial.W;
    rep = std::move(r);
    fc = v;
  }
}

}  // namespace

RunResult run_perfect(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start) {
  const auto t0 = Clock::now();
  const auto [xi_k, xi_e] = xi_pair(sc, cfg.fbr);
  const AlgoParams& prm = cfg.params;
  RunResult res;
  res.state = start ? *start : init_state(link, sc, cfg);
  res.report = evaluate(link, res.state, xi_k, xi_e);
  double f = true_objective(res.report, cfg.fbr, cfg.objective);
  res.trace.rows.push_back(make_row(0, "init", res.report, cfg.fbr, f));
  res.trace.status = RunStatus::MaxIter;
  for (int it = 1; it <= prm.ao_max; ++it) {
    const double f_prev = f;

    DesignState cand = res.state;
    for (int inner = 0; inner < prm.inner_steps; ++inner) {
      StepInfo info;
      cand.W = beamforming_step_perfect(link, res.state, xi_k, xi_e, cfg.objective, &info, prm.solver_tol);
      SecrecyReport rep = evaluate(link, cand, xi_k, xi_e);
      double fc = true_objective(rep, cfg.fbr, cfg.objective);
      if (info.accepted && fc > f) extrapolate_beams(link, res.state.W, cand, rep, fc, xi_k, xi_e, cfg);
      TraceRow wrow = make_row(it, "beam", rep, cfg.fbr, fc);
      wrow.solver_iters = info.solver_iters;
      wrow.solver_status = to_string(info.solver);
      wrow.accepted = info.accepted && fc >= f;
      res.trace.rows.push_back(wrow);
      if (!wrow.accepted) break;
      const bool stalled = rel_change(fc, f) <= 0.1 * prm.eps;
      res.state = cand;
      res.report = rep;
      f = fc;
      if (stalled) break;
    }

    for (int inner = 0; inner < prm.inner_steps; ++inner) {
      cand = res.state;
      cand.theta = pre_step_perfect(link, cand, xi_k, xi_e, cfg.objective);
      SecrecyReport rep = evaluate(link, cand, xi_k, xi_e);
      double fc = true_objective(rep, cfg.fbr, cfg.objective);
      if (fc > f) extrapolate_phases(link, res.state.theta, cand, rep, fc, xi_k, xi_e, cfg);
      TraceRow trow = make_row(it, "phase", rep, cfg.fbr, fc);
      trow.accepted = fc >= f;
      res.trace.rows.push_back(trow);
      if (!trow.accepted) break;
      const bool stalled = rel_change(fc, f) <= 0.1 * prm.eps;
      res.state = cand;
      res.report = rep;
      f = fc;
      if (stalled) break;
    }

    res.trace.rows.push_back(make_row(it, "iter", res.report, cfg.fbr, f));
    res.trace.iterations = it;
    if (rel_change(f, f_prev) <= prm.eps) {
      res.trace.status = RunStatus::Converged;
      break;
    }
  }
  check_monotone(res.trace, prm.monotone_slack);
  res.certified = f;
  res.trace.seconds = secs_since(t0);
  return res;
}

RunResult run_maxmin_perfect(const Link& link, const Scenario& sc, bool fbr, InitMode init, std::uint64_t seed) {
  RunConfig cfg;
  cfg.fbr = fbr;
  cfg.init = init;
  cfg.seed = seed;
  cfg.params = AlgoParams::from(sc);
  return run_perfect(link, sc, cfg);
}

AffineCMat beam_design_map(const Link& link, const PhaseVector& theta, int K, int first_var) {
  const int M = link.M(), N = link.N();
  const CMat G = unit_modulus(theta).asDiagonal() * link.L_AR;
  AffineCMat Y(M, K);
  for (int j = 0; j < K; ++j)
    for (int n = 0; n < N; ++n) {
      CMat re = CMat::Zero(M, K), im = CMat::Zero(M, K);
      re.col(j) = G.col(n);
      im.col(j) = cd(0, 1) * G.col(n);
      Y.terms.push_back({first_var + beam_var(N, j, n), re});
      Y.terms.push_back({first_var + beam_var(N, j, n) + 1, im});
    }
  return Y;
}

AffineCMat phase_design_map(const Link& link, const std::vector<CVec>& W, int first_var) {
  const int M = link.M(), K = int(W.size());
  CMat g(M, K);
  for (int j = 0; j < K; ++j) g.col(j) = link.L_AR * W[j];
  AffineCMat Y(M, K);
  for (int m = 0; m < M; ++m) {
    CMat re = CMat::Zero(M, K);
    re.row(m) = g.row(m);
    Y.terms.push_back({first_var + 2 * m, re});
    Y.terms.push_back({first_var + 2 * m + 1, CMat(cd(0, 1) * re)});
  }
  return Y;
}

namespace {

CMat signal_images(const Link& link, const DesignState& s) {
  const int K = int(s.W.size());
  CMat Y(link.M(), K);
  const CVec v = unit_modulus(s.theta);
  for (int j = 0; j < K; ++j) Y.col(j) = v.cwiseProduct(link.L_AR * s.W[j]);
  return Y;
}

RobustObjective robust_kind(Objective o) { return o == Objective::MaxMin ? RobustObjective::MaxMin : RobustObjective::Sum; }

}  // namespace

Certificate certify(const Link& link, const DesignState& s, double xi_k, double xi_e, Objective obj,
                    const AlgoParams& prm, const RobustExpansion* start) {
  const int K = int(s.W.size());
  AffineCMat Y(link.M(), K);
  Y.constant = signal_images(link, s);
  RobustExpansion ex = start ? *start : nominal_expansion(link, Y.constant);
  ex.Y = Y.constant;
  Certificate cert;
  double prev = -std::numeric_limits<double>::infinity();
  int retries = 0;
  for (int round = 0; round < prm.sca_rounds; ++round) {
    ConicProblem p;
    RobustVars vars = build_robust_constraints(p, link, Y, ex, xi_k, xi_e, robust_kind(obj));
    p.set_objective(vars.objective);
    ConicSolution sol = solve(p, prm.solver_tol);
    if (!sol.usable()) {
      if (cert.rounds == 0 && retries < 4) {
        ++retries;
        ex.ratio_gain *= 4.0;
        --round;
        continue;
      }
      break;
    }
    const double value = vars.objective.eval(sol.x);
    ++cert.rounds;
    if (value >= cert.value) {
      cert.value = value;
      cert.user_values.clear();
      for (const auto& u : vars.user_value) cert.user_values.push_back(u.eval(sol.x));
      cert.status = sol.status;
      cert.expansion = read_expansion(vars, sol.x, Y, ex.ratio_gain);
    }
    ex = read_expansion(vars, sol.x, Y, ex.ratio_gain);
    if (value - prev <= 1e-7 * std::max(1.0, std::abs(value))) break;
    prev = value;
  }
  return cert;
}

PccpResult run_pccp_pre(const Link& link, const DesignState& s, const RobustExpansion& ex0, double xi_k, double xi_e,
                        Objective obj, const AlgoParams& prm) {
  const int M = link.M();
  PccpResult out;
  out.expansion = ex0;
  CVec v_bar = unit_modulus(s.theta);
  double a = prm.a_init;
  double prev_objective = 0;
  RobustExpansion ex = ex0;
  out.record.status = RunStatus::MaxIter;
  for (int n = 1; n <= prm.n_max; ++n) {
    ConicProblem p;
    for (int m = 0; m < M; ++m) {
      p.add_variable("v" + std::to_string(m) + ".re");
      p.add_variable("v" + std::to_string(m) + ".im");
    }
    const AffineCMat Y = phase_design_map(link, s.W, 0);
    Affine penalty;
    for (int m = 0; m < M; ++m) {
      const int t = p.add_variable("t" + std::to_string(m));
      const int th = p.add_variable("that" + std::to_string(m));
      p.nonneg(Affine::var(t), "t>=0");
      p.nonneg(Affine::var(th), "that>=0");
      add_rotated_soc(p, {Affine::var(2 * m), Affine::var(2 * m + 1)}, Affine(1.0) + Affine::var(t), "modulus.ub");
      Affine lin = Affine(-std::norm(v_bar(m)) - 1.0) + Affine::var(th);
      lin += Affine::var(2 * m, 2.0 * v_bar(m).real());
      lin += Affine::var(2 * m + 1, 2.0 * v_bar(m).imag());
      p.nonneg(lin, "modulus.lb");
      penalty += Affine::var(t) + Affine::var(th);
    }
    ex.Y = Y.value([&] {
      RVec x = RVec::Zero(2 * M);
      for (int m = 0; m < M; ++m) {
        x(2 * m) = v_bar(m).real();
        x(2 * m + 1) = v_bar(m).imag();
      }
      return x;
    }());
    RobustVars vars = build_robust_constraints(p, link, Y, ex, xi_k, xi_e, robust_kind(obj));
    p.set_objective(vars.objective - a * penalty);
    ConicSolution sol = solve(p, prm.solver_tol);
    out.record.a_seq.push_back(a);
    TraceRow row;
    row.iter = n;
    row.step = "pccp";
    row.a = a;
    row.solver_iters = sol.iterations;
    row.solver_status = to_string(sol.status);
    if (!sol.usable()) {
      row.accepted = false;
      out.rows.push_back(row);
      a = std::min(prm.nu * a, prm.a_max);
      continue;
    }
    CVec v(M);
    for (int m = 0; m < M; ++m) v(m) = cd(sol.x(2 * m), sol.x(2 * m + 1));
    const double T = penalty.eval(sol.x);
    const double dv = (v - v_bar).cwiseAbs().sum();
    row.penalty = T;
    row.objective = vars.objective.eval(sol.x);
    out.rows.push_back(row);
    out.record.iterations = n;
    out.record.penalty = T;
    out.record.relaxed_objective = row.objective;
    ex = read_expansion(vars, sol.x, Y, ex.ratio_gain);
    out.expansion = ex;
    v_bar = v;
    const bool stalled = n > 1 && rel_change(row.objective, prev_objective) <= prm.pccp_stall;
    prev_objective = row.objective;
    if (T <= prm.eps_t1 && (dv <= prm.eps_t2 || stalled)) {
      out.record.status = RunStatus::Converged;
      break;
    }
    a = std::min(prm.nu * a, prm.a_max);
  }
  out.v_relaxed = v_bar;
  out.record.modulus_dev = (v_bar.cwiseAbs().array() - 1.0).abs().maxCoeff();
  out.theta = PhaseVector(M);
  for (int m = 0; m < M; ++m) out.theta(m) = wrap_phase(std::arg(v_bar(m)));
  return out;
}

RunResult run_robust(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start) {
  const auto t0 = Clock::now();
  const auto [xi_k, xi_e] = xi_pair(sc, cfg.fbr);
  const AlgoParams& prm = cfg.params;
  const int K = link.users(), N = link.N();
  RunResult res;
  res.robust = true;
  res.state = start ? *start : init_state(link, sc, cfg);
  Certificate cert;
  if (!start && prm.nominal_warm) {
    RunConfig nominal = cfg;
    nominal.robust = false;
    const DesignState cold = res.state;
    res.state = run_perfect(link, sc, nominal, &res.state).state;
    const double floor = 1e-6 * link.power, pw = res.state.power();
    if (pw < floor) {
      // Lift a vanishing design to a level the certificate can resolve.
      for (size_t j = 0; j < res.state.W.size(); ++j)
        res.state.W[j] = pw > 0 ? CVec(res.state.W[j] * std::sqrt(floor / pw)) : CVec(cold.W[j] * std::sqrt(floor));
    }
    cert = certify(link, res.state, xi_k, xi_e, cfg.objective, prm);
    if (!cert.ok()) res.state = cold;  // degenerate nominal optimum (e.g. near-zero power)
  }
  if (!cert.ok()) cert = certify(link, res.state, xi_k, xi_e, cfg.objective, prm);
  if (!cert.ok()) {
    res.trace.status = RunStatus::Safeguarded;
    res.trace.diagnostic = "initial certification failed";
    res.report = evaluate(link, res.state, xi_k, xi_e);
    res.certified = -std::numeric_limits<double>::infinity();
    res.trace.seconds = secs_since(t0);
    return res;
  }
  double Z = cert.value;
  std::vector<double> Z_users = cert.user_values;
  RobustExpansion ex = cert.expansion;
  res.report = evaluate(link, res.state, xi_k, xi_e);
  res.trace.rows.push_back(make_row(0, "init", res.report, cfg.fbr, Z));
  res.trace.status = RunStatus::MaxIter;

  for (int it = 1; it <= prm.ao_max; ++it) {
    const double Z_prev = Z;

    // Beamforming step.
    {
      ConicProblem p;
      const int first = add_beam_vars(p, N, K);
      add_power(p, first, N, K, link.power);
      const AffineCMat Y = beam_design_map(link, res.state.theta, K, first);
      RobustExpansion e = ex;
      e.Y = signal_images(link, res.state);
      RobustVars vars = build_robust_constraints(p, link, Y, e, xi_k, xi_e, robust_kind(cfg.objective));
      p.set_objective(vars.objective);
      ConicSolution sol = solve(p, prm.solver_tol);
      TraceRow row;
      row.iter = it;
      row.step = "beam";
      row.solver_iters = sol.iterations;
      row.solver_status = to_string(sol.status);
      row.accepted = false;
      if (sol.usable()) {
        const double value = vars.objective.eval(sol.x);
        DesignState cand = res.state;
        cand.W = read_beams(sol.x, first, N, K, link.power);
        SecrecyReport rep = evaluate(link, cand, xi_k, xi_e);
        row = make_row(it, "beam", rep, cfg.fbr, value);
        row.solver_iters = sol.iterations;
        row.solver_status = to_string(sol.status);
        row.accepted = value >= Z;
        if (row.accepted) {
          res.state = cand;
          res.report = rep;
          Z = value;
          Z_users.clear();
          for (const auto& u : vars.user_value) Z_users.push_back(u.eval(sol.x));
          ex = read_expansion(vars, sol.x, Y, e.ratio_gain);
        }
      }
      res.trace.rows.push_back(row);
    }

    // Reflection step.
    {
      PccpResult pc = run_pccp_pre(link, res.state, ex, xi_k, xi_e, cfg.objective, prm);
      for (auto& r : pc.rows) {
        r.iter = it;
        res.trace.rows.push_back(r);
      }
      DesignState cand = res.state;
      cand.theta = pc.theta;
      Certificate c2 = certify(link, cand, xi_k, xi_e, cfg.objective, prm, &pc.expansion);
      pc.record.projected_objective = c2.value;
      SecrecyReport rep = evaluate(link, cand, xi_k, xi_e);
      TraceRow row = make_row(it, "phase", rep, cfg.fbr, c2.value);
      row.penalty = pc.record.penalty;
      row.a = pc.record.a_seq.empty() ? 0 : pc.record.a_seq.back();
      row.accepted = c2.ok() && c2.value >= Z;
      if (row.accepted) {
        res.state = cand;
        res.report = rep;
        Z = c2.value;
        Z_users = c2.user_values;
        ex = c2.expansion;
      }
      res.trace.rows.push_back(row);
      res.trace.pccp.push_back(pc.record);
    }

    res.trace.rows.push_back(make_row(it, "iter", res.report, cfg.fbr, Z));
    res.trace.iterations = it;
    if (rel_change(Z, Z_prev) <= prm.eps) {
      res.trace.status = RunStatus::Converged;
      break;
    }
  }
  check_monotone(res.trace, prm.monotone_slack);
  res.certified = Z;
  res.certified_users = Z_users;
  res.trace.seconds = secs_since(t0);
  return res;
}

RunResult run_maxmin_robust(const Link& link, const Scenario& sc, InitMode init, std::uint64_t seed) {
  RunConfig cfg;
  cfg.robust = true;
  cfg.init = init;
  cfg.seed = seed;
  cfg.params = AlgoParams::from(sc);
  return run_robust(link, sc, cfg);
}

RunResult run_ssr(const Link& link, const Scenario& sc, bool robust, bool fbr, InitMode init, std::uint64_t seed,
                  const DesignState* start) {
  RunConfig cfg;
  cfg.robust = robust;
  cfg.fbr = fbr;
  cfg.objective = Objective::Sum;
  cfg.init = init;
  cfg.seed = seed;
  cfg.params = AlgoParams::from(sc);
  return run_algorithm(link, sc, cfg, start);
}

RunResult run_algorithm(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start) {
  return cfg.robust ? run_robust(link, sc, cfg, start) : run_perfect(link, sc, cfg, start);
}

}  // namespace irssec
