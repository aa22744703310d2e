#pragma once

#include <vector>

#include "irssec/metrics.hpp"
#include "irssec/types.hpp"

namespace irssec {

constexpr double kDispersionFloor = 1e-8;

// ln(1 + |lam|^2 / F) >= value, with equality at (lam, F) = (lam_bar, F_bar).
double ineq_logdet_lb(const CVec& lam, double F, const CVec& lam_bar, double F_bar);
// ln(1 + |z|^2) >= value
double ineq_log_sum_lb(const CVec& z, const CVec& z_bar);
// -ln(1 + A) >= value
double ineq_neglog_lb(double A, double A_bar);
// sqrt(x) <= value
double ineq_sqrt_ub(double x, double x_bar);
// |A|^2 / (B + sigma) >= value
double ineq_ratio_lb(const CVec& A, double B, const CVec& A_bar, double B_bar, double sigma);

// Concave minorant of one user's unclipped secrecy rate written over the
// amplitudes a(i, j) = h_i w_j:
//   constant + sum_ij 2 Re(conj(lin(i,j)) a(i,j)) - quad(i,j) |a(i,j)|^2
struct AmpMinorant {
  double constant = 0;
  CMat lin;
  RMat quad;

  double eval(const CMat& amp) const;
};

struct MinorantSet {
  std::vector<AmpMinorant> users;
  bool floor_applied = false;
};

MinorantSet build_minorants(const CMat& amp_bar, double sigma, double xi_k, double xi_e,
                            double v_floor = kDispersionFloor);

// Beamforming surrogate: per user k and beam j,
//   S_k(W) = x_k + sum_j 2 Re(y_kj^H w_j) - w_j^H psi_kj w_j.
// Every user's rate depends on all beams, so coefficients are kept per beam.
struct WSurrogate {
  std::vector<double> x;
  std::vector<std::vector<CVec>> y;
  std::vector<std::vector<CMat>> psi;
  MinorantSet minorants;
  std::vector<CRow> h;  // cascaded channels at the expansion point

  int users() const { return int(x.size()); }
  double eval(int k, const std::vector<CVec>& W) const;
};

WSurrogate build_w_surrogate(const Link& link, const DesignState& s, double xi_k, double xi_e);

// Phase surrogate: S_k(theta) = x_k + 2 sum_m Re(y_k(m) e^{j theta_m}).
struct ThetaSurrogate {
  double x = 0;
  CVec y;

  double eval(const PhaseVector& theta) const;
};

struct ThetaSurrogateSet {
  std::vector<ThetaSurrogate> users;
  bool floor_applied = false;
};

ThetaSurrogateSet build_theta_surrogate(const Link& link, const DesignState& s, double xi_k, double xi_e);

// Elementwise maximizer of one surrogate: theta_m = -arg(y(m)) wrapped to [0, 2pi).
PhaseVector maximize_phases(const CVec& y);

// Picks, among one candidate per surrogate plus the optional incumbent, the
// phases with the largest min_k surrogate value.
PhaseVector closed_form_theta(const std::vector<ThetaSurrogate>& surrogates, const PhaseVector* incumbent = nullptr);

// Same selection for a sum objective.
PhaseVector closed_form_theta_sum(const std::vector<ThetaSurrogate>& surrogates, const PhaseVector* incumbent = nullptr);

}  // namespace irssec
