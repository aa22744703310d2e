#include "irssec/robust.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "irssec/channel.hpp"
#include "irssec/rng.hpp"
#include "irssec/surrogate.hpp"

namespace irssec {

void AffineCMat::add_term(int var, const CMat& coefficient) {
  for (auto& t : terms)
    if (t.first == var) {
      t.second += coefficient;
      return;
    }
  terms.push_back({var, coefficient});
}

CMat AffineCMat::value(const RVec& x) const {
  CMat Y = constant;
  for (const auto& t : terms) Y += x(t.first) * t.second;
  return Y;
}

AffineCMat AffineCMat::columns(const std::vector<int>& idx) const {
  AffineCMat out(rows(), Eigen::Index(idx.size()));
  for (size_t c = 0; c < idx.size(); ++c) out.constant.col(c) = constant.col(idx[c]);
  for (const auto& t : terms) {
    CMat m(rows(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c) m.col(c) = t.second.col(idx[c]);
    if (m.cwiseAbs().maxCoeff() > 0) out.terms.push_back({t.first, m});
  }
  return out;
}

AffineCMat AffineCMat::left_multiply(const CMat& L) const {
  AffineCMat out;
  out.constant = L * constant;
  for (const auto& t : terms) out.terms.push_back({t.first, L * t.second});
  return out;
}

CMat quad_lb_matrix(const CMat& Y, const CMat& Y_bar) {
  if (Y.rows() != Y_bar.rows() || Y.cols() != Y_bar.cols()) throw std::invalid_argument("quad_lb_matrix: shape mismatch");
  CMat A = Y * Y_bar.adjoint() + Y_bar * Y.adjoint() - Y_bar * Y_bar.adjoint();
  return 0.5 * (A + A.adjoint());
}

AffineHermitianBlock quad_lb_matrix(const AffineCMat& Y, const CMat& Y_bar) {
  if (Y.rows() != Y_bar.rows() || Y.cols() != Y_bar.cols()) throw std::invalid_argument("quad_lb_matrix: shape mismatch");
  AffineHermitianBlock A(int(Y.rows()));
  A.constant = quad_lb_matrix(Y.constant, Y_bar);
  for (const auto& t : Y.terms) {
    CMat c = t.second * Y_bar.adjoint();
    A.add_term(t.first, CMat(c + c.adjoint()));
  }
  return A;
}

CMat lemma1_quad_lb(const CVec& w, const CVec& w_bar, const PhaseVector& theta, const PhaseVector& theta_bar,
                    const CMat& L_AR) {
  if (w.size() != L_AR.cols() || w_bar.size() != L_AR.cols() || theta.size() != L_AR.rows() ||
      theta_bar.size() != L_AR.rows())
    throw std::invalid_argument("lemma1_quad_lb: dimension mismatch");
  const CVec y = unit_modulus(theta).cwiseProduct(L_AR * w);
  const CVec y_bar = unit_modulus(theta_bar).cwiseProduct(L_AR * w_bar);
  return quad_lb_matrix(CMat(y), CMat(y_bar));
}

AffineHermitianBlock s_procedure_embed(const AffineHermitianBlock& F0, const CMat& F1, int multiplier) {
  F0.check_hermitian();
  if (F1.rows() != F0.order || F1.cols() != F0.order) throw std::invalid_argument("s_procedure_embed: order mismatch");
  if ((F1 - F1.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, F1.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("s_procedure_embed: F1 is not Hermitian");
  AffineHermitianBlock out = F0;
  out.add_term(multiplier, CMat(-F1));
  return out;
}

AffineHermitianBlock schur_embed(const AffineHermitianBlock& Z, const AffineCMat& Y) {
  if (Y.cols() != Z.order) throw std::invalid_argument("schur_embed: Y must have as many columns as Z");
  const int p = Z.order, q = int(Y.rows()), n = p + q;
  AffineHermitianBlock out(n, Z.tag);
  out.partition = {p, q};
  out.constant.topLeftCorner(p, p) = Z.constant;
  out.constant.bottomLeftCorner(q, p) = Y.constant;
  out.constant.topRightCorner(p, q) = Y.constant.adjoint();
  out.constant.bottomRightCorner(q, q) = CMat::Identity(q, q);
  for (const auto& t : Z.terms) {
    CMat m = CMat::Zero(n, n);
    m.topLeftCorner(p, p) = t.second;
    out.add_term(t.first, m);
  }
  for (const auto& t : Y.terms) {
    CMat m = CMat::Zero(n, n);
    m.bottomLeftCorner(q, p) = t.second;
    m.topRightCorner(p, q) = t.second.adjoint();
    out.add_term(t.first, m);
  }
  return out;
}

AffineHermitianBlock nemirovski_embed(const AffineHermitianBlock& A, const AffineCMat& B, const CMat& C, double t,
                                      int slack) {
  if (t < 0) throw std::invalid_argument("nemirovski_embed: radius must be nonnegative");
  if (B.cols() != A.order || C.cols() != A.order) throw std::invalid_argument("nemirovski_embed: shape mismatch");
  const int p = A.order, q = int(B.rows()), n = p + q;
  AffineHermitianBlock out(n, A.tag);
  out.partition = {p, q};
  out.constant.topLeftCorner(p, p) = A.constant;
  out.constant.bottomLeftCorner(q, p) = -t * B.constant;
  out.constant.topRightCorner(p, q) = -t * B.constant.adjoint();
  for (const auto& term : A.terms) {
    CMat m = CMat::Zero(n, n);
    m.topLeftCorner(p, p) = term.second;
    out.add_term(term.first, m);
  }
  for (const auto& term : B.terms) {
    CMat m = CMat::Zero(n, n);
    m.bottomLeftCorner(q, p) = -t * term.second;
    m.topRightCorner(p, q) = -t * term.second.adjoint();
    out.add_term(term.first, m);
  }
  CMat s = CMat::Zero(n, n);
  s.topLeftCorner(p, p) = -C.adjoint() * C;
  s.bottomRightCorner(q, q) = CMat::Identity(q, q);
  out.add_term(slack, s);
  return out;
}

Affine sca_bilinear_ub(const Affine& u, const Affine& v, double u0, double v0) {
  return u0 * v + v0 * (u - Affine(u0));
}

Affine sca_bilinear_ub_exp(const Affine& b, const Affine& a, double b0, double a0, double base) {
  const double g = std::pow(base, b0);
  return g * (a0 * std::log(base) * (b - Affine(b0)) + a);
}

namespace {

std::vector<int> all_but(int K, int k) {
  std::vector<int> J;
  for (int j = 0; j < K; ++j)
    if (j != k) J.push_back(j);
  return J;
}

std::vector<int> all_of(int K) { return all_but(K, -1); }

int slack_var(ConicProblem& p, const std::string& name) {
  int v = p.add_variable(name);
  p.nonneg(Affine::var(v), name + ">=0");
  return v;
}

// Real and imaginary parts of the affine complex scalar (Y(x))(r, c) premultiplied by row l.
std::pair<Affine, Affine> row_times(const AffineCMat& Y, const CRow& l, int col) {
  std::pair<Affine, Affine> out;
  cd c0 = (l * Y.constant.col(col)).value();
  out.first.c0 = c0.real();
  out.second.c0 = c0.imag();
  for (const auto& t : Y.terms) {
    cd v = (l * t.second.col(col)).value();
    if (v.real() != 0) out.first.terms.push_back({t.first, v.real()});
    if (v.imag() != 0) out.second.terms.push_back({t.first, v.imag()});
  }
  return out;
}

}  // namespace

void robust_quad_lower(ConicProblem& p, const AffineCMat& Y, const CMat& Y_bar, const std::vector<int>& J,
                       const CRow& l_hat, double omega, double sigma, const Affine& T, const std::string& tag) {
  if (J.empty()) {
    p.nonneg(Affine(sigma) - T, tag);
    return;
  }
  CMat Yb(Y_bar.rows(), J.size());
  for (size_t c = 0; c < J.size(); ++c) Yb.col(c) = Y_bar.col(J[c]);
  AffineHermitianBlock A = quad_lb_matrix(Y.columns(J), Yb);
  const int M = A.order;
  if (omega == 0) {
    Affine s = Affine(sigma) - T;
    s.c0 += (l_hat * A.constant * l_hat.adjoint()).value().real();
    for (const auto& t : A.terms) s.terms.push_back({t.first, (l_hat * t.second * l_hat.adjoint()).value().real()});
    p.nonneg(s, tag);
    return;
  }
  // [I; l_hat] A [I, l_hat^H] plus the scalar corner sigma - T.
  CMat S(M + 1, M);
  S.topRows(M) = CMat::Identity(M, M);
  S.row(M) = l_hat;
  AffineHermitianBlock F0(M + 1, tag);
  F0.partition = {M, 1};
  F0.constant = S * A.constant * S.adjoint();
  for (const auto& t : A.terms) F0.add_term(t.first, CMat(S * t.second * S.adjoint()));
  F0.add(M, M, Affine(sigma) - T);
  CMat F1 = CMat::Zero(M + 1, M + 1);
  F1.topLeftCorner(M, M) = -CMat::Identity(M, M);
  F1(M, M) = omega * omega;
  int eta = slack_var(p, tag + ".eta");
  p.add(s_procedure_embed(F0, F1, eta));
}

void robust_quad_upper(ConicProblem& p, const AffineCMat& Y, const std::vector<int>& J, const CRow& l_hat,
                       double omega, double sigma, const Affine& T, const std::string& tag) {
  if (J.empty()) {
    p.nonneg(T - Affine(sigma), tag);
    return;
  }
  AffineCMat YJ = Y.columns(J);
  if (omega == 0) {
    std::vector<Affine> parts;
    for (int c = 0; c < int(J.size()); ++c) {
      auto [re, im] = row_times(YJ, l_hat, c);
      parts.push_back(re);
      parts.push_back(im);
    }
    add_rotated_soc(p, parts, T - Affine(sigma), tag);
    return;
  }
  const int q = int(J.size()), M = int(Y.rows());
  // Nominal Schur block [[T - sigma, l_hat Y_J], [(l_hat Y_J)^H, I]].
  AffineHermitianBlock Fh(1 + q, tag);
  Fh.partition = {1, q};
  Fh.add(0, 0, T - Affine(sigma));
  CRow r0 = l_hat * YJ.constant;
  for (int c = 0; c < q; ++c) Fh.add_constant(0, 1 + c, r0(c));
  for (int c = 0; c < q; ++c) Fh.add_constant(1 + c, 1 + c, 1.0);
  for (const auto& t : YJ.terms) {
    CMat m = CMat::Zero(1 + q, 1 + q);
    CRow r = l_hat * t.second;
    m.block(0, 1, 1, q) = r;
    m.block(1, 0, q, 1) = r.adjoint();
    Fh.add_term(t.first, m);
  }
  AffineCMat B(M, 1 + q);
  B.constant.rightCols(q) = YJ.constant;
  for (const auto& t : YJ.terms) {
    CMat m = CMat::Zero(M, 1 + q);
    m.rightCols(q) = t.second;
    B.terms.push_back({t.first, m});
  }
  CMat C = CMat::Zero(1, 1 + q);
  C(0, 0) = 1.0;
  int kappa = slack_var(p, tag + ".kappa");
  AffineHermitianBlock out = nemirovski_embed(Fh, B, C, omega, kappa);
  out.partition = {1, q, M};
  p.add(out);
}

RobustExpansion nominal_expansion(const Link& link, const CMat& Y) {
  const int K = int(Y.cols());
  RobustExpansion ex;
  ex.Y = Y;
  const double s = link.sigma;
  const int e = link.eve();
  CRow ae = link.l[e] * Y;
  ex.eve_ups = ae.squaredNorm() + s;
  for (int k = 0; k < K; ++k) {
    CRow a = link.l[k] * Y;
    const double ups = a.squaredNorm() + s;
    const double rho = ups - std::norm(a(k));
    ex.ups_lb.push_back(ups);
    ex.ups_ub.push_back(ups);
    ex.int_ub.push_back(rho);
    ex.int_lb.push_back(rho);
    ex.ratio.push_back(rho / ups);
    const double rho_e = ex.eve_ups - std::norm(ae(k));
    ex.eve_int.push_back(rho_e);
    ex.eve_ratio.push_back(rho_e / ex.eve_ups);
  }
  return ex;
}

namespace {

// xi sqrt(1 - ...) dispersion bound: ratio <= r / u enforced through
// r >= (c/2) ratio^2 + u^2 / (2c); returns xi (sqrt(Vb)/2 + (1 - ratio)/sqrt(Vb)).
Affine dispersion_bound(ConicProblem& p, int ratio, const Affine& r, const Affine& u, double ratio_bar, double u_bar,
                        double xi, double gain, const std::string& tag) {
  const double Vb = std::max(2.0 * (1.0 - ratio_bar), kDispersionFloor);
  const double c = gain * u_bar / std::max(ratio_bar, 1e-6);
  add_rotated_soc(p, {std::sqrt(c) * Affine::var(ratio), (1.0 / std::sqrt(c)) * u}, 2.0 * r, tag);
  const double sv = std::sqrt(Vb);
  return xi * (Affine(sv / 2.0 + 1.0 / sv) - (1.0 / sv) * Affine::var(ratio));
}

}  // namespace

RobustVars build_robust_constraints(ConicProblem& p, const Link& link, const AffineCMat& Y, const RobustExpansion& ex,
                                    double xi_k, double xi_e, RobustObjective obj) {
  const int K = int(Y.cols());
  const int e = link.eve();
  const double s = link.sigma;
  if (int(ex.ups_lb.size()) != K || int(ex.eve_int.size()) != K || ex.Y.rows() != Y.rows() || ex.Y.cols() != K)
    throw std::invalid_argument("build_robust_constraints: expansion point does not match the design");
  if (link.users() != K) throw std::invalid_argument("build_robust_constraints: user count mismatch");
  auto positive = [](double v) { return std::isfinite(v) && v > 0; };
  for (int k = 0; k < K; ++k)
    if (!positive(ex.ups_lb[k]) || !positive(ex.int_ub[k]) || !positive(ex.eve_int[k]) || !positive(ex.ups_ub[k]))
      throw std::invalid_argument("build_robust_constraints: expansion values must be positive");
  if (!positive(ex.eve_ups)) throw std::invalid_argument("build_robust_constraints: expansion values must be positive");

  RobustVars v;
  const std::vector<int> all = all_of(K);
  const double om_e = link.omega[e];

  v.eve_ups = p.add_variable("eve_ups");
  robust_quad_upper(p, Y, all, link.l[e], om_e, s, Affine::var(v.eve_ups), "eve.ups");

  for (int k = 0; k < K; ++k) {
    const std::string u = "user" + std::to_string(k);
    const std::vector<int> others = all_but(K, k);
    const double om = link.omega[k];

    // Legitimate rate: ln(ups) - ln(int) >= ln(pb) + 1 - g - ln(qb) + 1 - q/qb with g p >= pb.
    int pv = p.add_variable(u + ".ups_lb");
    int qv = p.add_variable(u + ".int_ub");
    int gv = p.add_variable(u + ".inv_ups");
    robust_quad_lower(p, Y, ex.Y, all, link.l[k], om, s, Affine::var(pv), u + ".ups_lb");
    robust_quad_upper(p, Y, others, link.l[k], om, s, Affine::var(qv), u + ".int_ub");
    p.add(vector_block(ConeKind::SOC,
                       {Affine::var(gv) + Affine::var(pv), Affine(2.0 * std::sqrt(ex.ups_lb[k])),
                        Affine::var(gv) - Affine::var(pv)},
                       u + ".hyp"));
    Affine rate_k = Affine(std::log(ex.ups_lb[k]) + 2.0 - std::log(ex.int_ub[k])) - Affine::var(gv) -
                    (1.0 / ex.int_ub[k]) * Affine::var(qv);

    // Eavesdropped rate: ln(eve_ups) - ln(eve_int) <= ln(Pb) + (P - Pb)/Pb - ln(qb) - 1 + t with t q >= qb.
    int qe = p.add_variable(u + ".eve_int");
    int te = p.add_variable(u + ".eve_inv");
    robust_quad_lower(p, Y, ex.Y, others, link.l[e], om_e, s, Affine::var(qe), u + ".eve_int");
    p.add(vector_block(ConeKind::SOC,
                       {Affine::var(te) + Affine::var(qe), Affine(2.0 * std::sqrt(ex.eve_int[k])),
                        Affine::var(te) - Affine::var(qe)},
                       u + ".eve_hyp"));
    Affine rate_e = Affine(std::log(ex.eve_ups) - 1.0 - 1.0 - std::log(ex.eve_int[k])) +
                    (1.0 / ex.eve_ups) * Affine::var(v.eve_ups) + Affine::var(te);

    Affine value = rate_k - rate_e;
    v.ups_lb.push_back(pv);
    v.int_ub.push_back(qv);
    v.inv_ups.push_back(gv);
    v.eve_int.push_back(qe);
    v.eve_inv.push_back(te);

    if (xi_k > 0) {
      int rv = p.add_variable(u + ".int_lb");
      int uv = p.add_variable(u + ".ups_ub");
      int Lv = p.add_variable(u + ".ratio");
      robust_quad_lower(p, Y, ex.Y, others, link.l[k], om, s, Affine::var(rv), u + ".int_lb");
      robust_quad_upper(p, Y, all, link.l[k], om, s, Affine::var(uv), u + ".ups_ub");
      value -= dispersion_bound(p, Lv, Affine::var(rv), Affine::var(uv), ex.ratio[k], ex.ups_ub[k], xi_k,
                                ex.ratio_gain, u + ".disp");
      v.int_lb.push_back(rv);
      v.ups_ub.push_back(uv);
      v.ratio.push_back(Lv);
    }
    if (xi_e > 0) {
      int Lv = p.add_variable(u + ".eve_ratio");
      value -= dispersion_bound(p, Lv, Affine::var(qe), Affine::var(v.eve_ups), ex.eve_ratio[k], ex.eve_ups, xi_e,
                                ex.ratio_gain, u + ".eve_disp");
      v.eve_ratio.push_back(Lv);
    }
    v.user_value.push_back(value);
  }

  if (obj == RobustObjective::MaxMin) {
    v.Z = p.add_variable("Z");
    for (int k = 0; k < K; ++k) p.nonneg(v.user_value[k] - Affine::var(v.Z), "epigraph" + std::to_string(k));
    v.objective = Affine::var(v.Z);
  } else {
    for (const auto& a : v.user_value) v.objective += a;
  }
  for (int i = 0; i < p.n; ++i) {
    const std::string& nm = p.names[i];
    if (nm.size() > 4 && (nm.ends_with(".eta") || nm.ends_with(".kappa"))) v.slacks.push_back(i);
  }
  return v;
}

RobustExpansion read_expansion(const RobustVars& v, const RVec& x, const AffineCMat& Y, double ratio_gain) {
  RobustExpansion ex;
  ex.Y = Y.value(x);
  ex.ratio_gain = ratio_gain;
  ex.eve_ups = x(v.eve_ups);
  const int K = int(v.ups_lb.size());
  for (int k = 0; k < K; ++k) {
    ex.ups_lb.push_back(x(v.ups_lb[k]));
    ex.int_ub.push_back(x(v.int_ub[k]));
    ex.eve_int.push_back(x(v.eve_int[k]));
    ex.int_lb.push_back(v.int_lb.empty() ? ex.int_ub.back() : x(v.int_lb[k]));
    ex.ups_ub.push_back(v.ups_ub.empty() ? ex.ups_lb.back() : x(v.ups_ub[k]));
    ex.ratio.push_back(v.ratio.empty() ? ex.int_lb.back() / ex.ups_ub.back() : x(v.ratio[k]));
    ex.eve_ratio.push_back(v.eve_ratio.empty() ? ex.eve_int.back() / ex.eve_ups : x(v.eve_ratio[k]));
  }
  return ex;
}

void dump_blocks(std::ostream& os, const ConicProblem& p, const RVec& x) {
  os << std::setprecision(6);
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const ConeBlock& blk = p.blocks[b];
    const char* kind = blk.kind == ConeKind::Nonneg ? "nonneg" : blk.kind == ConeKind::SOC ? "soc" : "psd";
    os << b << ' ' << kind << ' ' << blk.dim << ' ' << (blk.tag.empty() ? "-" : blk.tag) << ' '
       << cone_residual(blk.kind, blk.dim, blk.value(x)) << '\n';
  }
}

SoundnessReport sample_worst_rates(const Link& link, const DesignState& s, double xi_k, double xi_e, int samples,
                                   std::uint64_t seed) {
  const int K = link.users();
  SoundnessReport rep;
  rep.samples = samples;
  rep.worst.assign(K, std::numeric_limits<double>::infinity());
  rep.worst_sample.assign(K, 0);
  Rng rng(seed, 0x5eed);
  Link pert = link;
  for (int n = 0; n < std::max(1, samples); ++n) {
    for (size_t i = 0; i < link.l.size(); ++i)
      pert.l[i] = link.l[i] + (samples > 0 ? sample_error_ball(link.omega[i], link.M(), rng) : CRow::Zero(link.M()));
    SecrecyReport r = evaluate(pert, s, xi_k, xi_e);
    for (int k = 0; k < K; ++k)
      if (r.SF_raw[k] < rep.worst[k]) {
        rep.worst[k] = r.SF_raw[k];
        rep.worst_sample[k] = n;
      }
  }
  rep.worst_min = *std::min_element(rep.worst.begin(), rep.worst.end());
  return rep;
}

}  // namespace irssec
