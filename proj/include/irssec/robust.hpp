#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "irssec/conic.hpp"
#include "irssec/metrics.hpp"
#include "irssec/types.hpp"

namespace irssec {

// Complex matrix affine in real variables: Y(x) = constant + sum_v x_v * terms_v.
struct AffineCMat {
  CMat constant;
  std::vector<std::pair<int, CMat>> terms;

  AffineCMat() = default;
  AffineCMat(Eigen::Index rows, Eigen::Index cols) : constant(CMat::Zero(rows, cols)) {}
  Eigen::Index rows() const { return constant.rows(); }
  Eigen::Index cols() const { return constant.cols(); }
  void add_term(int var, const CMat& coefficient);
  CMat value(const RVec& x) const;
  AffineCMat columns(const std::vector<int>& idx) const;
  AffineCMat left_multiply(const CMat& L) const;  // L * Y(x)
};

// Quadratic lower bound sum_j |l y_j|^2 >= l A l^H, tight at Y = Y_bar:
//   A = sum_j (y_j y_bar_j^H + y_bar_j y_j^H - y_bar_j y_bar_j^H).
CMat quad_lb_matrix(const CMat& Y, const CMat& Y_bar);
AffineHermitianBlock quad_lb_matrix(const AffineCMat& Y, const CMat& Y_bar);

// Single-beam form with y = Diag(e^{j theta}) L_AR w.
CMat lemma1_quad_lb(const CVec& w, const CVec& w_bar, const PhaseVector& theta, const PhaseVector& theta_bar,
                    const CMat& L_AR);

// f0(x) >= 0 on {f1(x) >= 0} is implied by F0 - n F1 >= 0, n >= 0, where
// F_i = [[U_i, u_i], [u_i^H, t_i]] and f_i(x) = x^H U_i x + 2 Re(u_i^H x) + t_i.
AffineHermitianBlock s_procedure_embed(const AffineHermitianBlock& F0, const CMat& F1, int multiplier);

// [[Z, Y^H], [Y, I]]
AffineHermitianBlock schur_embed(const AffineHermitianBlock& Z, const AffineCMat& Y);

// [[A - a C^H C, -t B^H], [-t B, a I]]: sufficient for A >= B^H X C + C^H X^H B
// whenever ||X|| <= t.
AffineHermitianBlock nemirovski_embed(const AffineHermitianBlock& A, const AffineCMat& B, const CMat& C, double t,
                                      int slack);

// u0 v + (u - u0) v0: the first-order expansion of u v at (u0, v0).
Affine sca_bilinear_ub(const Affine& u, const Affine& v, double u0, double v0);
// ((b - b0) a0 ln(base) + a) base^b0: the first-order expansion of a base^b.
Affine sca_bilinear_ub_exp(const Affine& b, const Affine& a, double b0, double a0, double base = 2.0);

// Robust bound on sum_{j in J} |l y_j|^2 + sigma for every l = l_hat + d with ||d|| <= omega.
// lower: value >= T (uses the quadratic lower bound around Y_bar and the S-procedure);
// upper: value <= T (Schur complement plus Nemirovski's lemma).
void robust_quad_lower(ConicProblem& p, const AffineCMat& Y, const CMat& Y_bar, const std::vector<int>& J,
                       const CRow& l_hat, double omega, double sigma, const Affine& T, const std::string& tag);
void robust_quad_upper(ConicProblem& p, const AffineCMat& Y, const std::vector<int>& J, const CRow& l_hat,
                       double omega, double sigma, const Affine& T, const std::string& tag);

// Expansion point of every successive-approximation term. All quantities are in
// the normalized link units; names follow the role each plays:
//   ups_lb  <= users' total received power     (lower)
//   int_ub  >= users' interference-plus-noise   (upper)
//   int_lb  <= users' interference-plus-noise   (lower, dispersion)
//   ups_ub  >= users' total received power      (upper, dispersion)
//   ratio   <= int_lb / ups_ub                   (dispersion ratio at the user)
//   eve_int <= Eve's interference-plus-noise for stream k
//   eve_ratio <= eve_int / eve_ups
//   eve_ups >= Eve's total received power
struct RobustExpansion {
  CMat Y;  // M x K signal images at the expansion point
  std::vector<double> ups_lb, int_ub, int_lb, ups_ub, ratio, eve_int, eve_ratio;
  double eve_ups = 0;
  double ratio_gain = 1.0;  // multiplies the AM-GM weight; raised when a round is infeasible
};

// Nominal values at a design (no error).
RobustExpansion nominal_expansion(const Link& link, const CMat& Y);

struct RobustVars {
  int Z = -1;
  std::vector<int> ups_lb, int_ub, int_lb, ups_ub, ratio, inv_ups, eve_int, eve_inv, eve_ratio;
  int eve_ups = -1;
  std::vector<int> slacks;
  std::vector<Affine> user_value;  // certified unclipped secrecy rate per user (nats)
  Affine objective;
};

enum class RobustObjective { MaxMin, Sum };

// Adds every robust constraint for the design map Y to p and returns the
// variable registry. For MaxMin a variable Z with Z <= user_value[k] is added.
RobustVars build_robust_constraints(ConicProblem& p, const Link& link, const AffineCMat& Y, const RobustExpansion& ex,
                                    double xi_k, double xi_e, RobustObjective obj);

RobustExpansion read_expansion(const RobustVars& v, const RVec& x, const AffineCMat& Y, double ratio_gain);

// One line per block: index, kind, order, tag, smallest cone residual at x.
void dump_blocks(std::ostream& os, const ConicProblem& p, const RVec& x);

// Samples error vectors in every node's ball and returns the smallest true
// unclipped secrecy rate seen per user (nats).
struct SoundnessReport {
  std::vector<double> worst;  // per user
  std::vector<int> worst_sample;  // sample index attaining worst[k]
  double worst_min = 0;
  int samples = 0;
};
SoundnessReport sample_worst_rates(const Link& link, const DesignState& s, double xi_k, double xi_e, int samples,
                                   std::uint64_t seed);

}  // namespace irssec
