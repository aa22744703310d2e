#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irssec/channel.hpp"
#include "irssec/conic.hpp"
#include "irssec/metrics.hpp"
#include "irssec/robust.hpp"

namespace irssec {

enum class Objective { MaxMin, Sum };
enum class InitMode { Random, LbrWarm };
enum class RunStatus { Converged, MaxIter, Safeguarded };
const char* to_string(RunStatus s);

struct AlgoParams {
  double eps = 1e-3;         // relative AO stopping tolerance
  int ao_max = 50;
  int n_max = 100;           // PCCP iterations per call
  double a_init = 10, a_max = 30, nu = 2;
  double eps_t1 = 1e-3, eps_t2 = 1e-3;
  double modulus_tol = 0.05;
  double solver_tol = 1e-8;
  int sca_rounds = 30;       // certification rounds at a fixed design
  double monotone_slack = 1e-6;
  int inner_steps = 10;      // surrogate refreshes per block step
  double pccp_stall = 1e-3;  // PCCP also stops once the relative objective gain per step falls below this
  bool nominal_warm = true;  // robust runs start from the perfect-CSI solution

  static AlgoParams from(const Scenario& sc);
};

struct TraceRow {
  int iter = 0;
  std::string step;
  double min_sr = 0, min_sr_raw = 0, ssr = 0, objective = 0;
  double penalty = 0, a = 0;
  int solver_iters = 0;
  std::string solver_status;
  bool accepted = true;
};

struct PccpRecord {
  int iterations = 0;
  double penalty = 0;            // final sum of slacks
  double modulus_dev = 0;        // max | |v_m| - 1 | before projection
  double relaxed_objective = 0;  // certified objective with the relaxed reflection vector
  double projected_objective = 0;
  std::vector<double> a_seq;
  RunStatus status = RunStatus::Converged;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::vector<PccpRecord> pccp;
  RunStatus status = RunStatus::MaxIter;
  int iterations = 0;
  double seconds = 0;
  std::string diagnostic;

  // The monitored objective after every AO iteration (index 0 = initial point).
  std::vector<double> objective_series() const;
};

struct RunResult {
  DesignState state;
  RunTrace trace;
  SecrecyReport report;   // nominal channels
  double certified = 0;   // robust runs: certified objective; perfect runs: surrogate-free true objective
  std::vector<double> certified_users;  // robust runs: certified rate per user
  bool robust = false;
};

struct RunConfig {
  bool fbr = true;
  Objective objective = Objective::MaxMin;
  bool robust = false;
  InitMode init = InitMode::Random;
  AlgoParams params;
  std::uint64_t seed = 1;
};

// Per-link dispersion multipliers (zero when fbr is false).
std::pair<double, double> xi_pair(const Scenario& sc, bool fbr);

DesignState init_state(const Link& link, Rng& rng);
DesignState init_state(const Link& link, const Scenario& sc, const RunConfig& cfg);

// Objective monitored by the drivers: min or sum of the unclipped per-user rates.
double true_objective(const SecrecyReport& r, bool fbr, Objective obj);

struct StepInfo {
  bool accepted = false;
  SolveStatus solver = SolveStatus::Optimal;
  int solver_iters = 0;
  double surrogate = 0;
};

std::vector<CVec> beamforming_step_perfect(const Link& link, const DesignState& s, double xi_k, double xi_e,
                                           Objective obj, StepInfo* info = nullptr, double tol = 1e-8);
PhaseVector pre_step_perfect(const Link& link, const DesignState& s, double xi_k, double xi_e, Objective obj);

RunResult run_perfect(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start = nullptr);
RunResult run_maxmin_perfect(const Link& link, const Scenario& sc, bool fbr, InitMode init = InitMode::Random,
                             std::uint64_t seed = 1);

// Robust evaluation of a fixed design: successive rounds over the auxiliary
// variables, starting from the nominal expansion.
struct Certificate {
  double value = -1e300;
  std::vector<double> user_values;
  RobustExpansion expansion;
  SolveStatus status = SolveStatus::NumericalFailure;
  int rounds = 0;
  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::MaxIter; }
};

Certificate certify(const Link& link, const DesignState& s, double xi_k, double xi_e, Objective obj,
                    const AlgoParams& prm, const RobustExpansion* start = nullptr);

struct PccpResult {
  PhaseVector theta;
  CVec v_relaxed;
  PccpRecord record;
  RobustExpansion expansion;  // last accepted solution
  std::vector<TraceRow> rows;
};

PccpResult run_pccp_pre(const Link& link, const DesignState& s, const RobustExpansion& ex, double xi_k, double xi_e,
                        Objective obj, const AlgoParams& prm);

RunResult run_robust(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start = nullptr);
RunResult run_maxmin_robust(const Link& link, const Scenario& sc, InitMode init = InitMode::Random,
                            std::uint64_t seed = 1);
RunResult run_ssr(const Link& link, const Scenario& sc, bool robust, bool fbr, InitMode init = InitMode::Random,
                  std::uint64_t seed = 1, const DesignState* start = nullptr);

// Dispatches on cfg.robust.
RunResult run_algorithm(const Link& link, const Scenario& sc, const RunConfig& cfg, const DesignState* start = nullptr);

// Affine design maps used by the robust steps.
AffineCMat beam_design_map(const Link& link, const PhaseVector& theta, int K, int first_var);
AffineCMat phase_design_map(const Link& link, const std::vector<CVec>& W, int first_var);

}  // namespace irssec
