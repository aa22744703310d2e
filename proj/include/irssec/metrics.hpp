#pragma once

#include <vector>

#include "irssec/channel.hpp"
#include "irssec/types.hpp"

namespace irssec {

struct DesignState {
  std::vector<CVec> W;  // one beamformer per user
  PhaseVector theta;

  double power() const;
};

// Channels as seen by the optimizer. make_link rescales so that every receiver
// has unit noise and Alice has unit power; SINRs are unchanged and beamformers
// map back through a factor sqrt(P).
struct Link {
  CMat L_AR;
  std::vector<CRow> l;          // K users, then Eve
  std::vector<double> omega;    // uncertainty radius per node, same scale as l
  double sigma = 1.0;
  double power = 1.0;
  double w_scale = 1.0;         // physical beamformer = w_scale * optimizer beamformer

  int users() const { return int(l.size()) - 1; }
  int eve() const { return users(); }
  int M() const { return int(L_AR.rows()); }
  int N() const { return int(L_AR.cols()); }
};

Link make_link(const ChannelSet& ch, double noise_w, double power_w);
Link raw_link(const ChannelSet& ch, double noise_w, double power_w);

std::vector<CRow> cascade_all(const Link& link, const PhaseVector& theta);

// a(i, j) = h_i w_j for nodes i = 0..K (Eve last) and beams j = 0..K-1.
CMat amplitudes(const std::vector<CRow>& h, const std::vector<CVec>& W);
CMat amplitudes(const Link& link, const DesignState& s);

double sinr(const CRow& h, const std::vector<CVec>& W, int k, double sigma);
double rate(double gamma);
double dispersion(double gamma);

double q_inverse(double tau);
double penalty_xi(double tau, double N_t);

double fbr_secrecy_rate(double C_k, double C_e, double V_k, double V_e, double xi_k, double xi_e);
double lbr_secrecy_rate(double C_k, double C_e);

// Throws std::domain_error when every value is zero.
double jain_index(const std::vector<double>& v);

inline double nats_to_bits(double nats) { return nats * kLog2e; }
inline double bits_to_nats(double bits) { return bits / kLog2e; }

struct SecrecyReport {
  std::vector<double> gamma_k, gamma_e, C_k, C_e, V_k, V_e;
  std::vector<double> SF, SL;          // clipped
  std::vector<double> SF_raw, SL_raw;  // before clipping
  double xi_k = 0, xi_e = 0;

  const std::vector<double>& secrecy(bool fbr) const { return fbr ? SF : SL; }
  const std::vector<double>& secrecy_raw(bool fbr) const { return fbr ? SF_raw : SL_raw; }
  double min_sr(bool fbr) const;
  double min_sr_raw(bool fbr) const;
  double ssr(bool fbr) const;
  double ssr_raw(bool fbr) const;
  double jain(bool fbr) const;  // NaN when every rate is zero
};

SecrecyReport evaluate(const CMat& amp, double sigma, double xi_k, double xi_e);
SecrecyReport evaluate(const Link& link, const DesignState& s, double xi_k, double xi_e);

}  // namespace irssec
