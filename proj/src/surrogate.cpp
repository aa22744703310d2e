#include "irssec/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace irssec {

double ineq_logdet_lb(const CVec& lam, double F, const CVec& lam_bar, double F_bar) {
  if (!(F > 0 && F_bar > 0)) throw std::domain_error("ineq_logdet_lb: F must be positive");
  const double nb = lam_bar.squaredNorm();
  return std::log1p(nb / F_bar) - nb / F_bar + 2.0 * lam_bar.dot(lam).real() / F_bar -
         (1.0 / F_bar - 1.0 / (F_bar + nb)) * (lam.squaredNorm() + F);
}

double ineq_log_sum_lb(const CVec& z, const CVec& z_bar) {
  const double sb = z_bar.squaredNorm();
  return std::log1p(sb) - sb + 2.0 * z_bar.dot(z).real() - sb * (1.0 + z.squaredNorm()) / (1.0 + sb);
}

double ineq_neglog_lb(double A, double A_bar) {
  if (!(A > -1 && A_bar > -1)) throw std::domain_error("ineq_neglog_lb: arguments must exceed -1");
  return -std::log1p(A_bar) - (1.0 + A) / (1.0 + A_bar) + 1.0;
}

double ineq_sqrt_ub(double x, double x_bar) {
  if (!(x >= 0 && x_bar > 0)) throw std::domain_error("ineq_sqrt_ub: need x >= 0 and x_bar > 0");
  return 0.5 * std::sqrt(x_bar) * (1.0 + x / x_bar);
}

double ineq_ratio_lb(const CVec& A, double B, const CVec& A_bar, double B_bar, double sigma) {
  if (!(B + sigma > 0 && B_bar + sigma > 0)) throw std::domain_error("ineq_ratio_lb: denominators must be positive");
  const double d = B_bar + sigma;
  return 2.0 * A_bar.dot(A).real() / d - A_bar.squaredNorm() * (B + sigma) / (d * d);
}

double AmpMinorant::eval(const CMat& amp) const {
  double v = constant;
  for (Eigen::Index i = 0; i < amp.rows(); ++i)
    for (Eigen::Index j = 0; j < amp.cols(); ++j)
      v += 2.0 * (std::conj(lin(i, j)) * amp(i, j)).real() - quad(i, j) * std::norm(amp(i, j));
  return v;
}

namespace {

// -xi sqrt(V) for the stream `sig` at node `i`, with V = 2 |a_sig|^2 / upsilon.
void add_dispersion(AmpMinorant& m, const CMat& a, int i, int sig, double sigma, double xi, double v_floor,
                    bool& floored) {
  if (xi == 0) return;
  const int K = int(a.cols());
  const double ups = a.row(i).squaredNorm() + sigma;
  const double rho = ups - std::norm(a(i, sig));
  double V = 2.0 * (1.0 - rho / ups);
  if (V < v_floor) {
    V = v_floor;
    floored = true;
  }
  const double c = xi / std::sqrt(V);
  m.constant += -0.5 * xi * std::sqrt(V) - c + c * (2.0 * sigma / ups - rho * sigma / (ups * ups));
  for (int j = 0; j < K; ++j) {
    if (j != sig) m.lin(i, j) += c * a(i, j) / ups;
    m.quad(i, j) += c * rho / (ups * ups);
  }
}

}  // namespace

MinorantSet build_minorants(const CMat& a, double sigma, double xi_k, double xi_e, double v_floor) {
  const int K = int(a.cols());
  const int e = int(a.rows()) - 1;
  MinorantSet set;
  for (int k = 0; k < K; ++k) {
    AmpMinorant m;
    m.lin = CMat::Zero(a.rows(), K);
    m.quad = RMat::Zero(a.rows(), K);

    // Legitimate rate.
    const double ups = a.row(k).squaredNorm() + sigma;
    const double rho = ups - std::norm(a(k, k));
    const double g = std::norm(a(k, k)) / rho;
    const double z1 = 1.0 / rho - 1.0 / ups;
    m.constant += std::log1p(g) - g - z1 * sigma;
    m.lin(k, k) += a(k, k) / rho;
    for (int j = 0; j < K; ++j) m.quad(k, j) += z1;

    // Eavesdropping rate, -ln(1 + gamma_e) = ln(rho_e) - ln(ups_e).
    const double ups_e = a.row(e).squaredNorm() + sigma;
    const double rho_e = ups_e - std::norm(a(e, k));
    const double S = (rho_e - sigma) / sigma;
    m.constant += std::log(sigma) + std::log1p(S) - S - S / (1.0 + S);
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      m.lin(e, j) += a(e, j) / sigma;
      m.quad(e, j) += S / ((1.0 + S) * sigma);
    }
    m.constant += -std::log(ups_e) + 1.0 - sigma / ups_e;
    for (int j = 0; j < K; ++j) m.quad(e, j) += 1.0 / ups_e;

    add_dispersion(m, a, k, k, sigma, xi_k, v_floor, set.floor_applied);
    add_dispersion(m, a, e, k, sigma, xi_e, v_floor, set.floor_applied);
    set.users.push_back(std::move(m));
  }
  return set;
}

double WSurrogate::eval(int k, const std::vector<CVec>& W) const {
  double v = x[k];
  for (size_t j = 0; j < W.size(); ++j)
    v += 2.0 * y[k][j].dot(W[j]).real() - W[j].dot(psi[k][j] * W[j]).real();
  return v;
}

WSurrogate build_w_surrogate(const Link& link, const DesignState& s, double xi_k, double xi_e) {
  WSurrogate ws;
  ws.h = cascade_all(link, s.theta);
  const CMat a = amplitudes(ws.h, s.W);
  ws.minorants = build_minorants(a, link.sigma, xi_k, xi_e);
  const int K = int(s.W.size());
  const int N = link.N();
  for (int k = 0; k < K; ++k) {
    const AmpMinorant& m = ws.minorants.users[k];
    ws.x.push_back(m.constant);
    std::vector<CVec> yk;
    std::vector<CMat> pk;
    for (int j = 0; j < K; ++j) {
      CVec y = CVec::Zero(N);
      CMat p = CMat::Zero(N, N);
      for (int i = 0; i <= K; ++i) {
        y += m.lin(i, j) * ws.h[i].adjoint();
        if (m.quad(i, j) != 0) p += m.quad(i, j) * ws.h[i].adjoint() * ws.h[i];
      }
      yk.push_back(y);
      pk.push_back(p);
    }
    ws.y.push_back(std::move(yk));
    ws.psi.push_back(std::move(pk));
  }
  return ws;
}

double ThetaSurrogate::eval(const PhaseVector& theta) const {
  double v = x;
  for (Eigen::Index m = 0; m < y.size(); ++m) v += 2.0 * (y(m) * std::polar(1.0, theta(m))).real();
  return v;
}

ThetaSurrogateSet build_theta_surrogate(const Link& link, const DesignState& s, double xi_k, double xi_e) {
  const int K = int(s.W.size());
  const int M = link.M();
  const CMat a = amplitudes(link, s);
  MinorantSet ms = build_minorants(a, link.sigma, xi_k, xi_e);
  const CVec v = unit_modulus(s.theta);

  // b(i, j) = l_i o (L_AR w_j)^T, so that a(i, j) = b(i, j) v.
  std::vector<std::vector<CRow>> b(K + 1, std::vector<CRow>(K));
  for (int j = 0; j < K; ++j) {
    CVec g = link.L_AR * s.W[j];
    for (int i = 0; i <= K; ++i) b[i][j] = link.l[i].cwiseProduct(g.transpose());
  }

  ThetaSurrogateSet out;
  out.floor_applied = ms.floor_applied;
  for (int k = 0; k < K; ++k) {
    const AmpMinorant& m = ms.users[k];
    CVec g = CVec::Zero(M);
    CMat Phi = CMat::Zero(M, M);
    for (int i = 0; i <= K; ++i)
      for (int j = 0; j < K; ++j) {
        g += m.lin(i, j) * b[i][j].adjoint();
        if (m.quad(i, j) != 0) Phi += m.quad(i, j) * b[i][j].adjoint() * b[i][j];
      }
    Phi = 0.5 * (Phi + Phi.adjoint()).eval();
    const double lam = std::max(0.0, Eigen::SelfAdjointEigenSolver<CMat>(Phi, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
    const CVec G = g + lam * v - Phi * v;
    ThetaSurrogate ts;
    ts.x = m.constant - 2.0 * lam * M + v.dot(Phi * v).real();
    ts.y = G.conjugate();
    out.users.push_back(std::move(ts));
  }
  return out;
}

PhaseVector maximize_phases(const CVec& y) {
  PhaseVector t(y.size());
  for (Eigen::Index m = 0; m < y.size(); ++m) t(m) = y(m) == cd(0) ? 0.0 : wrap_phase(kTwoPi - std::arg(y(m)));
  return t;
}

namespace {

double min_value(const std::vector<ThetaSurrogate>& s, const PhaseVector& t) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& u : s) v = std::min(v, u.eval(t));
  return v;
}

double sum_value(const std::vector<ThetaSurrogate>& s, const PhaseVector& t) {
  double v = 0;
  for (const auto& u : s) v += u.eval(t);
  return v;
}

}  // namespace

PhaseVector closed_form_theta(const std::vector<ThetaSurrogate>& surrogates, const PhaseVector* incumbent) {
  if (surrogates.empty()) throw std::invalid_argument("closed_form_theta: no surrogates");
  PhaseVector best;
  double best_v = -std::numeric_limits<double>::infinity();
  if (incumbent) {
    best = *incumbent;
    best_v = min_value(surrogates, best);
  }
  auto consider = [&](const PhaseVector& t) {
    double v = min_value(surrogates, t);
    if (v > best_v) {
      best_v = v;
      best = t;
    }
  };
  for (const auto& s : surrogates) consider(maximize_phases(s.y));
  if (surrogates.size() == 1) return best;

  // Weighted candidates: mirror descent on the simplex for the weights whose
  // maximizer balances the users. The user values at the weighted maximizer
  // are a subgradient of the dual function.
  const size_t K = surrogates.size();
  std::vector<double> lam(K, 1.0 / double(K)), val(K);
  for (int it = 0; it < 200; ++it) {
    CVec y = CVec::Zero(surrogates.front().y.size());
    for (size_t k = 0; k < K; ++k) y += lam[k] * surrogates[k].y;
    PhaseVector t = maximize_phases(y);
    consider(t);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t k = 0; k < K; ++k) {
      val[k] = surrogates[k].eval(t);
      lo = std::min(lo, val[k]);
      hi = std::max(hi, val[k]);
    }
    if (!(hi - lo > 1e-12)) break;
    const double step = 2.0 / ((hi - lo) * std::sqrt(double(it + 1)));
    double z = 0;
    for (size_t k = 0; k < K; ++k) z += lam[k] *= std::exp(-step * (val[k] - lo));
    for (auto& l : lam) l = std::max(l / z, 1e-12);
  }
  return best;
}

PhaseVector closed_form_theta_sum(const std::vector<ThetaSurrogate>& surrogates, const PhaseVector* incumbent) {
  if (surrogates.empty()) throw std::invalid_argument("closed_form_theta_sum: no surrogates");
  CVec y = CVec::Zero(surrogates.front().y.size());
  for (const auto& s : surrogates) y += s.y;
  PhaseVector t = maximize_phases(y);
  if (incumbent && sum_value(surrogates, *incumbent) >= sum_value(surrogates, t)) return *incumbent;
  return t;
}

}  // namespace irssec
