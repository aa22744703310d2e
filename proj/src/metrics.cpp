#include "irssec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace irssec {

double DesignState::power() const {
  double p = 0;
  for (const auto& w : W) p += w.squaredNorm();
  return p;
}

Link raw_link(const ChannelSet& ch, double noise_w, double power_w) {
  Link link;
  link.L_AR = ch.L_AR;
  link.l = ch.l_hat;
  link.omega = ch.omega;
  link.sigma = noise_w;
  link.power = power_w;
  link.w_scale = 1.0;
  return link;
}

Link make_link(const ChannelSet& ch, double noise_w, double power_w) {
  Link link = raw_link(ch, noise_w, power_w);
  const int M = int(ch.L_AR.rows());
  double lmax = 0;
  for (const auto& l : ch.l_hat) lmax = std::max(lmax, l.norm());
  const double kappa = lmax > 0 ? std::sqrt(double(M)) / lmax : 1.0;
  for (auto& l : link.l) l *= kappa;
  for (auto& o : link.omega) o *= kappa;
  link.L_AR *= std::sqrt(power_w / noise_w) / kappa;
  link.sigma = 1.0;
  link.power = 1.0;
  link.w_scale = std::sqrt(power_w);
  return link;
}

std::vector<CRow> cascade_all(const Link& link, const PhaseVector& theta) {
  std::vector<CRow> h;
  for (const auto& l : link.l) h.push_back(cascaded_channel(l, theta, link.L_AR));
  return h;
}

CMat amplitudes(const std::vector<CRow>& h, const std::vector<CVec>& W) {
  CMat a(h.size(), W.size());
  for (size_t i = 0; i < h.size(); ++i)
    for (size_t j = 0; j < W.size(); ++j) a(i, j) = (h[i] * W[j]).value();
  return a;
}

CMat amplitudes(const Link& link, const DesignState& s) { return amplitudes(cascade_all(link, s.theta), s.W); }

double sinr(const CRow& h, const std::vector<CVec>& W, int k, double sigma) {
  double interference = 0;
  for (size_t j = 0; j < W.size(); ++j)
    if (int(j) != k) interference += std::norm((h * W[j]).value());
  return std::norm((h * W[k]).value()) / (interference + sigma);
}

double rate(double gamma) { return std::log1p(gamma); }

double dispersion(double gamma) { return 2.0 * gamma / (1.0 + gamma); }

namespace {

double upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double lo = 0.02425;
  if (p < lo) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - lo) return -normal_quantile_seed(1.0 - p);
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_inverse(double tau) {
  if (!(tau > 0 && tau < 1)) throw std::invalid_argument("q_inverse: tau must lie in (0, 1)");
  double x = -normal_quantile_seed(tau);
  for (int it = 0; it < 2; ++it) {
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    x += (upper_tail(x) - tau) / pdf;
  }
  return x;
}

double penalty_xi(double tau, double N_t) {
  if (!(tau > 0 && tau < 0.5)) throw std::invalid_argument("penalty_xi: tau must lie in (0, 0.5)");
  if (!(N_t >= 1)) throw std::invalid_argument("penalty_xi: blocklength must be >= 1");
  return q_inverse(tau) / (std::log(2.0) * std::sqrt(N_t));
}

double fbr_secrecy_rate(double C_k, double C_e, double V_k, double V_e, double xi_k, double xi_e) {
  return std::max(0.0, C_k - C_e - xi_k * std::sqrt(V_k) - xi_e * std::sqrt(V_e));
}

double lbr_secrecy_rate(double C_k, double C_e) { return std::max(0.0, C_k - C_e); }

double jain_index(const std::vector<double>& v) {
  double s = 0, s2 = 0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  if (v.empty() || s2 == 0) throw std::domain_error("jain_index: no secrecy (all rates zero)");
  return s * s / (double(v.size()) * s2);
}

double SecrecyReport::min_sr(bool fbr) const {
  const auto& v = secrecy(fbr);
  return *std::min_element(v.begin(), v.end());
}

double SecrecyReport::min_sr_raw(bool fbr) const {
  const auto& v = secrecy_raw(fbr);
  return *std::min_element(v.begin(), v.end());
}

double SecrecyReport::ssr(bool fbr) const {
  const auto& v = secrecy(fbr);
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double SecrecyReport::ssr_raw(bool fbr) const {
  const auto& v = secrecy_raw(fbr);
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double SecrecyReport::jain(bool fbr) const {
  try {
    return jain_index(secrecy(fbr));
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

SecrecyReport evaluate(const CMat& amp, double sigma, double xi_k, double xi_e) {
  const int K = int(amp.cols());
  const int e = int(amp.rows()) - 1;
  SecrecyReport r;
  r.xi_k = xi_k;
  r.xi_e = xi_e;
  const double eve_total = amp.row(e).squaredNorm();
  for (int k = 0; k < K; ++k) {
    const double sig = std::norm(amp(k, k));
    const double gk = sig / (amp.row(k).squaredNorm() - sig + sigma);
    const double sig_e = std::norm(amp(e, k));
    const double ge = sig_e / (eve_total - sig_e + sigma);
    r.gamma_k.push_back(gk);
    r.gamma_e.push_back(ge);
    r.C_k.push_back(rate(gk));
    r.C_e.push_back(rate(ge));
    r.V_k.push_back(dispersion(gk));
    r.V_e.push_back(dispersion(ge));
    const double lbr = r.C_k.back() - r.C_e.back();
    const double fbr = lbr - xi_k * std::sqrt(r.V_k.back()) - xi_e * std::sqrt(r.V_e.back());
    r.SL_raw.push_back(lbr);
    r.SF_raw.push_back(fbr);
    r.SL.push_back(std::max(0.0, lbr));
    r.SF.push_back(std::max(0.0, fbr));
  }
  return r;
}

SecrecyReport evaluate(const Link& link, const DesignState& s, double xi_k, double xi_e) {
  return evaluate(amplitudes(link, s), link.sigma, xi_k, xi_e);
}

}  // namespace irssec
