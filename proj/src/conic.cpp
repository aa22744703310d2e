#include "irssec/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace irssec {

Affine Affine::var(int i, double coef) {
  Affine a;
  a.terms.push_back({i, coef});
  return a;
}

Affine& Affine::operator+=(const Affine& o) {
  c0 += o.c0;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  c0 -= o.c0;
  for (const auto& t : o.terms) terms.push_back({t.first, -t.second});
  return *this;
}

Affine& Affine::operator*=(double s) {
  c0 *= s;
  for (auto& t : terms) t.second *= s;
  return *this;
}

double Affine::eval(const RVec& x) const {
  double v = c0;
  for (const auto& t : terms) v += t.second * x(t.first);
  return v;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator*(double s, Affine a) { return a *= s; }
Affine operator-(Affine a) { return a *= -1.0; }

RVec ConeBlock::value(const RVec& x) const {
  RVec s = constant;
  for (size_t k = 0; k < vars.size(); ++k) s += coef.col(k) * x(vars[k]);
  return s;
}

ConeBlock vector_block(ConeKind kind, const std::vector<Affine>& entries, const std::string& tag) {
  ConeBlock b;
  b.kind = kind;
  b.dim = int(entries.size());
  b.tag = tag;
  b.constant = RVec::Zero(b.dim);
  std::map<int, int> col;
  for (const auto& e : entries)
    for (const auto& t : e.terms)
      if (!col.count(t.first)) col[t.first] = 0;
  for (auto& [v, k] : col) {
    k = int(b.vars.size());
    b.vars.push_back(v);
  }
  b.coef = RMat::Zero(b.dim, b.vars.size());
  for (int r = 0; r < b.dim; ++r) {
    b.constant(r) = entries[r].c0;
    for (const auto& t : entries[r].terms) b.coef(r, col[t.first]) += t.second;
  }
  return b;
}

AffineHermitianBlock::AffineHermitianBlock(int n, std::string t)
    : order(n), tag(std::move(t)), partition{n}, constant(CMat::Zero(n, n)) {}

void AffineHermitianBlock::add_constant(int r, int c, cd v) {
  constant(r, c) += v;
  if (r != c) constant(c, r) += std::conj(v);
}

void AffineHermitianBlock::add_term(int var, int r, int c, cd v) {
  CMat* target = nullptr;
  for (auto& t : terms)
    if (t.first == var) target = &t.second;
  if (!target) {
    terms.push_back({var, CMat::Zero(order, order)});
    target = &terms.back().second;
  }
  (*target)(r, c) += v;
  if (r != c) (*target)(c, r) += std::conj(v);
}

void AffineHermitianBlock::add_term(int var, const CMat& coefficient) {
  for (auto& t : terms)
    if (t.first == var) {
      t.second += coefficient;
      return;
    }
  terms.push_back({var, coefficient});
}

void AffineHermitianBlock::add(int r, int c, const Affine& a, cd scale) {
  add_constant(r, c, scale * a.c0);
  for (const auto& t : a.terms) add_term(t.first, r, c, scale * t.second);
}

CMat AffineHermitianBlock::value(const RVec& x) const {
  CMat H = constant;
  for (const auto& t : terms) H += x(t.first) * t.second;
  return H;
}

void AffineHermitianBlock::check_hermitian(double tol) const {
  auto bad = [&](const CMat& A) {
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    return (A - A.adjoint()).cwiseAbs().maxCoeff() > tol * scale;
  };
  int total = 0;
  for (int p : partition) total += p;
  if (total != order) throw std::invalid_argument("block " + tag + ": partition sizes do not sum to the order");
  if (bad(constant)) throw std::invalid_argument("block " + tag + ": constant is not Hermitian");
  for (const auto& t : terms)
    if (bad(t.second)) throw std::invalid_argument("block " + tag + ": coefficient is not Hermitian");
}

RMat realify(const CMat& H) {
  const Eigen::Index n = H.rows();
  RMat R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = H.real();
  R.topRightCorner(n, n) = -H.imag();
  R.bottomLeftCorner(n, n) = H.imag();
  R.bottomRightCorner(n, n) = H.real();
  return R;
}

ConeBlock realify(const AffineHermitianBlock& H) {
  H.check_hermitian();
  ConeBlock b;
  b.kind = ConeKind::PSD;
  b.dim = 2 * H.order;
  b.tag = H.tag;
  RMat c = realify(H.constant);
  b.constant = Eigen::Map<RVec>(c.data(), c.size());
  std::vector<std::pair<int, CMat>> terms = H.terms;
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  b.coef = RMat(b.dim * b.dim, terms.size());
  for (size_t k = 0; k < terms.size(); ++k) {
    b.vars.push_back(terms[k].first);
    RMat t = realify(terms[k].second);
    b.coef.col(k) = Eigen::Map<RVec>(t.data(), t.size());
  }
  return b;
}

int ConicProblem::add_variable(const std::string& name) {
  names.push_back(name);
  RVec nc = RVec::Zero(n + 1);
  if (n > 0) nc.head(n) = c;
  c = nc;
  return n++;
}

int ConicProblem::find(const std::string& name) const {
  for (int i = 0; i < n; ++i)
    if (names[i] == name) return i;
  return -1;
}

void ConicProblem::add(ConeBlock b) { blocks.push_back(std::move(b)); }

void ConicProblem::add(const AffineHermitianBlock& h) { blocks.push_back(realify(h)); }

void ConicProblem::nonneg(const Affine& a, const std::string& tag) {
  blocks.push_back(vector_block(ConeKind::Nonneg, {a}, tag));
}

void ConicProblem::set_objective(const Affine& a) {
  c = RVec::Zero(n);
  for (const auto& t : a.terms) c(t.first) += t.second;
}

void ConicProblem::check() const {
  if (c.size() != n) throw std::invalid_argument("conic problem: objective length differs from variable count");
  std::vector<bool> used(n, false);
  for (const auto& b : blocks) {
    if (b.constant.size() != b.rows() || b.coef.rows() != b.rows() || b.coef.cols() != Eigen::Index(b.vars.size()))
      throw std::invalid_argument("conic problem: block " + b.tag + " has inconsistent dimensions");
    if (b.kind == ConeKind::SOC && b.dim < 1) throw std::invalid_argument("conic problem: empty SOC block");
    for (size_t k = 0; k < b.vars.size(); ++k) {
      if (b.vars[k] < 0 || b.vars[k] >= n) throw std::invalid_argument("conic problem: variable index out of range");
      if (b.coef.col(k).cwiseAbs().maxCoeff() > 0) used[b.vars[k]] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!used[i]) throw std::invalid_argument("conic problem: variable " + names[i] + " appears in no constraint");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

bool ConicSolution::usable(double loose) const {
  if (status == SolveStatus::Optimal) return true;
  if (status == SolveStatus::Infeasible || x.size() == 0) return false;
  return primal_residual <= loose && dual_residual <= loose && gap <= loose * std::max(1.0, std::abs(objective));
}

double cone_residual(ConeKind kind, int dim, const RVec& s) {
  switch (kind) {
    case ConeKind::Nonneg: return dim ? s.minCoeff() : 0.0;
    case ConeKind::SOC: return s(0) - s.tail(dim - 1).norm();
    case ConeKind::PSD: {
      RMat S = Eigen::Map<const RMat>(s.data(), dim, dim);
      S = 0.5 * (S + S.transpose()).eval();
      return Eigen::SelfAdjointEigenSolver<RMat>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    }
  }
  return 0;
}

VerifyReport verify(const ConicProblem& p, const RVec& x, double tol) {
  VerifyReport r;
  r.worst = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const ConeBlock& blk = p.blocks[b];
    double v = cone_residual(blk.kind, blk.dim, blk.value(x));
    r.residual.push_back(v);
    if (v < r.worst) {
      r.worst = v;
      r.worst_block = int(b);
    }
  }
  r.pass = p.blocks.empty() || r.worst >= -tol;
  return r;
}

std::string VerifyReport::describe(const ConicProblem& p) const {
  std::ostringstream os;
  os << (pass ? "pass" : "FAIL") << " worst=" << worst;
  if (worst_block >= 0) os << " block=" << worst_block << " tag=" << p.blocks[worst_block].tag;
  return os.str();
}

// ---------------------------------------------------------------------------
// Interior point method: homogeneous self-dual embedding of
//   minimize q.x  s.t.  G x + s = h,  s in K      (q = -c, G = -coef, h = constant)
// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps.

namespace {

struct Scaling {
  ConeKind kind;
  int dim;
  RVec d;                    // nonneg
  double beta = 1;           // soc
  RVec wbar;                 // soc: reflection vector, W = beta (2 v v^T - J)
  RMat R, Rinv;              // psd
  RVec lambda;               // nonneg/soc: vector; psd: eigenvalues (diagonal)
};

RMat as_mat(const RVec& v, int n) { return Eigen::Map<const RMat>(v.data(), n, n); }
RVec as_vec(const RMat& m) { return Eigen::Map<const RVec>(m.data(), m.size()); }

RVec soc_J(RVec u) {
  u.tail(u.size() - 1) *= -1.0;
  return u;
}

bool compute_scaling(ConeKind kind, int dim, const RVec& s, const RVec& z, Scaling& sc) {
  sc.kind = kind;
  sc.dim = dim;
  if (kind == ConeKind::Nonneg) {
    if ((s.array() <= 0).any() || (z.array() <= 0).any()) return false;
    sc.d = (s.array() / z.array()).sqrt();
    sc.lambda = (s.array() * z.array()).sqrt();
    return true;
  }
  if (kind == ConeKind::SOC) {
    double s2 = s(0) * s(0) - s.tail(dim - 1).squaredNorm();
    double z2 = z(0) * z(0) - z.tail(dim - 1).squaredNorm();
    if (!(s(0) > 0 && z(0) > 0 && s2 > 0 && z2 > 0)) return false;
    double sn = std::sqrt(s2), zn = std::sqrt(z2);
    RVec sb = s / sn, zb = z / zn;
    double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    RVec w = (sb + soc_J(zb)) / (2.0 * gamma);
    sc.wbar = w;
    sc.wbar(0) += 1.0;
    sc.wbar /= std::sqrt(2.0 * (w(0) + 1.0));
    sc.beta = std::sqrt(sn / zn);
    sc.lambda = sc.beta * (2.0 * sc.wbar * sc.wbar.dot(z) - soc_J(z));
    return true;
  }
  RMat S = as_mat(s, dim), Z = as_mat(z, dim);
  Eigen::LLT<RMat> ls(0.5 * (S + S.transpose())), lz(0.5 * (Z + Z.transpose()));
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  RMat Ls = ls.matrixL(), Lz = lz.matrixL();
  // Singular pairs of Lz^T Ls from the eigensystem of its Gram matrix.
  const RMat C = Lz.transpose() * Ls;
  Eigen::SelfAdjointEigenSolver<RMat> es(C.transpose() * C);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0)) return false;
  RVec lam = es.eigenvalues().cwiseSqrt();
  const RMat& V = es.eigenvectors();
  const RMat U = C * V * lam.cwiseInverse().asDiagonal();
  RVec isq = lam.array().rsqrt();
  sc.R = Ls * V * isq.asDiagonal();
  sc.Rinv = isq.asDiagonal() * U.transpose() * Lz.transpose();
  sc.lambda = lam;
  return true;
}

// op: 0 = W, 1 = W^T, 2 = W^{-1}, 3 = W^{-T}
RVec apply(const Scaling& sc, int op, const RVec& u) {
  switch (sc.kind) {
    case ConeKind::Nonneg: return (op < 2) ? RVec(sc.d.cwiseProduct(u)) : RVec(u.cwiseQuotient(sc.d));
    case ConeKind::SOC: {
      if (op < 2) return sc.beta * (2.0 * sc.wbar * sc.wbar.dot(u) - soc_J(u));
      RVec jw = soc_J(sc.wbar);
      return (2.0 * jw * jw.dot(u) - soc_J(u)) / sc.beta;
    }
    case ConeKind::PSD: {
      RMat U = as_mat(u, sc.dim);
      switch (op) {
        case 0: return as_vec(sc.R.transpose() * U * sc.R);
        case 1: return as_vec(sc.R * U * sc.R.transpose());
        case 2: return as_vec(sc.Rinv.transpose() * U * sc.Rinv);
        default: return as_vec(sc.Rinv * U * sc.Rinv.transpose());
      }
    }
  }
  return u;
}

RVec identity(ConeKind kind, int dim) {
  if (kind == ConeKind::Nonneg) return RVec::Ones(dim);
  if (kind == ConeKind::SOC) {
    RVec e = RVec::Zero(dim);
    e(0) = 1;
    return e;
  }
  return as_vec(RMat::Identity(dim, dim));
}

RVec jordan(ConeKind kind, int dim, const RVec& x, const RVec& y) {
  if (kind == ConeKind::Nonneg) return x.cwiseProduct(y);
  if (kind == ConeKind::SOC) {
    RVec r(dim);
    r(0) = x.dot(y);
    r.tail(dim - 1) = x(0) * y.tail(dim - 1) + y(0) * x.tail(dim - 1);
    return r;
  }
  RMat X = as_mat(x, dim), Y = as_mat(y, dim);
  return as_vec(0.5 * (X * Y + Y * X));
}

RVec lambda_vec(const Scaling& sc) {
  if (sc.kind != ConeKind::PSD) return sc.lambda;
  return as_vec(RMat(sc.lambda.asDiagonal()));
}

// Solves lambda o u = r.
RVec lambda_solve(const Scaling& sc, const RVec& r) {
  if (sc.kind == ConeKind::Nonneg) return r.cwiseQuotient(sc.lambda);
  if (sc.kind == ConeKind::SOC) {
    const RVec& l = sc.lambda;
    const int n = sc.dim;
    double det = l(0) * l(0) - l.tail(n - 1).squaredNorm();
    RVec u(n);
    u(0) = (l(0) * r(0) - l.tail(n - 1).dot(r.tail(n - 1))) / det;
    u.tail(n - 1) = (r.tail(n - 1) - u(0) * l.tail(n - 1)) / l(0);
    return u;
  }
  RMat Rm = as_mat(r, sc.dim);
  RMat U(sc.dim, sc.dim);
  for (int i = 0; i < sc.dim; ++i)
    for (int j = 0; j < sc.dim; ++j) U(i, j) = 2.0 * Rm(i, j) / (sc.lambda(i) + sc.lambda(j));
  return as_vec(U);
}

// Largest alpha with lambda + alpha * d in the cone (infinity when unbounded).
double max_step(const Scaling& sc, const RVec& d) {
  const double inf = std::numeric_limits<double>::infinity();
  if (sc.kind == ConeKind::Nonneg) {
    double a = inf;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d(i) < 0) a = std::min(a, -sc.lambda(i) / d(i));
    return a;
  }
  if (sc.kind == ConeKind::SOC) {
    const RVec& l = sc.lambda;
    const int n = sc.dim;
    double A = d(0) * d(0) - d.tail(n - 1).squaredNorm();
    double B = 2.0 * (l(0) * d(0) - l.tail(n - 1).dot(d.tail(n - 1)));
    double C = l(0) * l(0) - l.tail(n - 1).squaredNorm();
    double best = inf;
    auto consider = [&](double r) {
      if (r > 0 && l(0) + r * d(0) >= -1e-300) best = std::min(best, r);
    };
    if (std::abs(A) < 1e-300) {
      if (B < 0) consider(-C / B);
    } else {
      double disc = B * B - 4.0 * A * C;
      if (disc >= 0) {
        double q = -0.5 * (B + (B >= 0 ? 1.0 : -1.0) * std::sqrt(disc));
        if (q != 0) {
          consider(q / A);
          consider(C / q);
        }
      }
    }
    // The first coordinate must stay positive as well.
    if (d(0) < 0) best = std::min(best, -l(0) / d(0));
    return best;
  }
  RVec isq = sc.lambda.array().rsqrt();
  RMat D = as_mat(d, sc.dim);
  RMat T = isq.asDiagonal() * (0.5 * (D + D.transpose())) * isq.asDiagonal();
  double mn = Eigen::SelfAdjointEigenSolver<RMat>(T, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return mn >= 0 ? inf : -1.0 / mn;
}

class Ipm {
 public:
  Ipm(const ConicProblem& p, const SolverOptions& opt) : p_(p), opt_(opt) {
    n_ = p.n;
    q_ = -p.c;
    for (const auto& b : p.blocks) {
      offset_.push_back(rows_);
      rows_ += b.rows();
      degree_ += b.degree();
    }
    h_ = RVec(rows_);
    for (size_t b = 0; b < p.blocks.size(); ++b) h_.segment(offset_[b], p.blocks[b].rows()) = p.blocks[b].constant;
  }

  ConicSolution run();

 private:
  RVec G_mul(const RVec& x) const {  // G x
    RVec r = RVec::Zero(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& blk = p_.blocks[b];
      RVec xs(blk.vars.size());
      for (size_t k = 0; k < blk.vars.size(); ++k) xs(k) = x(blk.vars[k]);
      r.segment(offset_[b], blk.rows()) = -(blk.coef * xs);
    }
    return r;
  }
  RVec GT_mul(const RVec& z) const {  // G^T z
    RVec r = RVec::Zero(n_);
    for (size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& blk = p_.blocks[b];
      RVec t = -(blk.coef.transpose() * z.segment(offset_[b], blk.rows()));
      for (size_t k = 0; k < blk.vars.size(); ++k) r(blk.vars[k]) += t(k);
    }
    return r;
  }
  RVec seg(const RVec& v, size_t b) const { return v.segment(offset_[b], p_.blocks[b].rows()); }
  RVec blockwise(int op, const RVec& u) const {
    RVec r(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b) r.segment(offset_[b], p_.blocks[b].rows()) = apply(sc_[b], op, seg(u, b));
    return r;
  }
  double cone_min(const RVec& u) const {
    double m = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& blk = p_.blocks[b];
      if (blk.kind == ConeKind::Nonneg && blk.dim == 0) continue;
      m = std::min(m, cone_residual(blk.kind, blk.dim, seg(u, b)));
    }
    return m;
  }
  RVec identity_all() const {
    RVec e(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b)
      e.segment(offset_[b], p_.blocks[b].rows()) = identity(p_.blocks[b].kind, p_.blocks[b].dim);
    return e;
  }
  void symmetrize(RVec& u) const {
    for (size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& blk = p_.blocks[b];
      if (blk.kind != ConeKind::PSD) continue;
      RMat U = as_mat(seg(u, b), blk.dim);
      u.segment(offset_[b], blk.rows()) = as_vec(0.5 * (U + U.transpose()));
    }
  }

  bool factor(bool identity_scaling);
  // Solves [0 G^T; G -W^T W][ux; uz] = [bx; bz]; returns ux and W uz.
  void kkt(const RVec& bx, const RVec& bz, RVec& ux, RVec& wuz) const;

  const ConicProblem& p_;
  SolverOptions opt_;
  int n_ = 0;
  int rows_ = 0;
  int degree_ = 0;
  RVec q_, h_;
  std::vector<int> offset_;
  std::vector<Scaling> sc_;
  std::vector<RMat> Gt_;  // W^{-T} G per block (block columns only)
  Eigen::LLT<RMat> chol_;
};

bool Ipm::factor(bool identity_scaling) {
  RMat H = RMat::Zero(n_, n_);
  Gt_.assign(p_.blocks.size(), RMat());
  for (size_t b = 0; b < p_.blocks.size(); ++b) {
    const auto& blk = p_.blocks[b];
    RMat g = -blk.coef;
    if (!identity_scaling)
      for (Eigen::Index k = 0; k < g.cols(); ++k) g.col(k) = apply(sc_[b], 3, g.col(k));
    RMat hb = g.transpose() * g;
    for (size_t i = 0; i < blk.vars.size(); ++i)
      for (size_t j = 0; j < blk.vars.size(); ++j) H(blk.vars[i], blk.vars[j]) += hb(i, j);
    Gt_[b] = std::move(g);
  }
  double scale = std::max(1e-300, H.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 6; ++attempt) {
    RMat Hr = H;
    if (attempt > 0) Hr.diagonal().array() += scale * std::pow(10.0, -14 + 2 * attempt);
    chol_.compute(Hr);
    if (chol_.info() == Eigen::Success) return true;
  }
  return false;
}

void Ipm::kkt(const RVec& bx, const RVec& bz, RVec& ux, RVec& wuz) const {
  RVec t(rows_);
  for (size_t b = 0; b < p_.blocks.size(); ++b)
    t.segment(offset_[b], p_.blocks[b].rows()) = sc_.empty() ? seg(bz, b) : apply(sc_[b], 3, seg(bz, b));
  RVec rhs = bx;
  for (size_t b = 0; b < p_.blocks.size(); ++b) {
    RVec tb = Gt_[b].transpose() * seg(t, b);
    for (size_t k = 0; k < p_.blocks[b].vars.size(); ++k) rhs(p_.blocks[b].vars[k]) += tb(k);
  }
  ux = chol_.solve(rhs);
  // One step of iterative refinement on the normal equations.
  RVec hx = RVec::Zero(n_);
  for (size_t b = 0; b < p_.blocks.size(); ++b) {
    const auto& blk = p_.blocks[b];
    RVec xs(blk.vars.size());
    for (size_t k = 0; k < blk.vars.size(); ++k) xs(k) = ux(blk.vars[k]);
    RVec hb = Gt_[b].transpose() * (Gt_[b] * xs);
    for (size_t k = 0; k < blk.vars.size(); ++k) hx(blk.vars[k]) += hb(k);
  }
  ux += chol_.solve(rhs - hx);
  wuz = RVec(rows_);
  for (size_t b = 0; b < p_.blocks.size(); ++b) {
    const auto& blk = p_.blocks[b];
    RVec xs(blk.vars.size());
    for (size_t k = 0; k < blk.vars.size(); ++k) xs(k) = ux(blk.vars[k]);
    wuz.segment(offset_[b], blk.rows()) = Gt_[b] * xs - seg(t, b);
  }
}

ConicSolution Ipm::run() {
  auto t0 = std::chrono::steady_clock::now();
  ConicSolution sol;
  auto finish = [&](SolveStatus st, const RVec& x, double tau, const std::string& msg) {
    sol.status = st;
    sol.x = tau > 0 ? RVec(x / tau) : x;
    sol.objective = p_.c.dot(sol.x);
    sol.message = msg;
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };
  if (p_.blocks.empty()) return finish(SolveStatus::NumericalFailure, RVec::Zero(n_), 1.0, "no constraints");

  // Starting point from the identity-scaled least-squares problems.
  if (!factor(true)) return finish(SolveStatus::NumericalFailure, RVec::Zero(n_), 1.0, "rank-deficient constraint map");
  RVec x, s, z, wv;
  kkt(RVec::Zero(n_), h_, x, wv);  // x = argmin |h - Gx|; wv = Gx - h
  s = -wv;
  RVec xz;
  kkt(-q_, RVec::Zero(rows_), xz, z);  // z = G xz with G^T z = -q
  const RVec e = identity_all();
  double ts = -cone_min(s), tz = -cone_min(z);
  if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
  if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  double tau = 1.0, kappa = 1.0;

  const double resx0 = std::max(1.0, q_.norm()), resz0 = std::max(1.0, h_.norm());
  sc_.assign(p_.blocks.size(), Scaling{});
  for (int it = 0; it <= opt_.max_iter; ++it) {
    sol.iterations = it;
    const RVec rx = GT_mul(z) + tau * q_;
    const RVec rz = s + G_mul(x) - tau * h_;
    const double rt = kappa + q_.dot(x) + h_.dot(z);
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (degree_ + 1);
    const double pcost = q_.dot(x) / tau, dcost = -h_.dot(z) / tau;
    sol.primal_residual = rz.norm() / tau / resz0;
    sol.dual_residual = rx.norm() / tau / resx0;
    sol.gap = sz / (tau * tau);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0) relgap = sol.gap / -pcost;
    else if (dcost > 0) relgap = sol.gap / dcost;
    if (sol.primal_residual <= opt_.tol && sol.dual_residual <= opt_.tol && (sol.gap <= opt_.tol || relgap <= opt_.tol))
      return finish(SolveStatus::Optimal, x, tau, "optimal");
    const double hz = h_.dot(z), qx = q_.dot(x);
    if (hz < 0 && GT_mul(z).norm() / resx0 / (-hz) <= opt_.tol) {
      sol.primal_residual = sol.dual_residual = std::numeric_limits<double>::infinity();
      return finish(SolveStatus::Infeasible, x, 0.0, "primal infeasible");
    }
    if (qx < 0 && (G_mul(x) + s).norm() / resz0 / (-qx) <= opt_.tol) {
      sol.primal_residual = sol.dual_residual = std::numeric_limits<double>::infinity();
      return finish(SolveStatus::Infeasible, x, 0.0, "dual infeasible (unbounded objective)");
    }
    if (it == opt_.max_iter) break;

    for (size_t b = 0; b < p_.blocks.size(); ++b)
      if (!compute_scaling(p_.blocks[b].kind, p_.blocks[b].dim, seg(s, b), seg(z, b), sc_[b]))
        return finish(SolveStatus::NumericalFailure, x, tau, "lost interiority");
    if (!factor(false)) return finish(SolveStatus::NumericalFailure, x, tau, "singular normal equations");

    RVec lam(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b) lam.segment(offset_[b], p_.blocks[b].rows()) = lambda_vec(sc_[b]);
    RVec lam_sq(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b)
      lam_sq.segment(offset_[b], p_.blocks[b].rows()) = jordan(p_.blocks[b].kind, p_.blocks[b].dim, seg(lam, b), seg(lam, b));

    RVec vx, wvz;
    kkt(-q_, h_, vx, wvz);
    const RVec vz = blockwise(2, wvz);

    struct Dir {
      RVec dx, dz, ds, wdz, wds;
      double dtau, dkappa;
    };
    auto direction = [&](double sigma, const RVec& corr, double corr_t) {
      RVec target = -lam_sq + sigma * mu * e - corr;
      RVec qv(rows_);
      for (size_t b = 0; b < p_.blocks.size(); ++b) qv.segment(offset_[b], p_.blocks[b].rows()) = lambda_solve(sc_[b], seg(target, b));
      const double rk = -tau * kappa + sigma * mu - corr_t;
      RVec ux, wuz;
      kkt(-(1.0 - sigma) * rx, -(1.0 - sigma) * rz - blockwise(1, qv), ux, wuz);
      const RVec uz = blockwise(2, wuz);
      Dir d;
      d.dtau = (-(1.0 - sigma) * rt - rk / tau - q_.dot(ux) - h_.dot(uz)) / (q_.dot(vx) + h_.dot(vz) - kappa / tau);
      d.dx = ux + d.dtau * vx;
      d.dz = uz + d.dtau * vz;
      d.wdz = wuz + d.dtau * wvz;
      d.wds = qv - d.wdz;
      d.ds = blockwise(1, d.wds);
      d.dkappa = (rk - kappa * d.dtau) / tau;
      return d;
    };
    auto step_to_boundary = [&](const Dir& d) {
      double a = std::numeric_limits<double>::infinity();
      for (size_t b = 0; b < p_.blocks.size(); ++b) {
        a = std::min(a, max_step(sc_[b], seg(d.wds, b)));
        a = std::min(a, max_step(sc_[b], seg(d.wdz, b)));
      }
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    Dir aff = direction(0.0, RVec::Zero(rows_), 0.0);
    const double a_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::pow(1.0 - a_aff, 3);
    RVec corr(rows_);
    for (size_t b = 0; b < p_.blocks.size(); ++b)
      corr.segment(offset_[b], p_.blocks[b].rows()) = jordan(p_.blocks[b].kind, p_.blocks[b].dim, seg(aff.wds, b), seg(aff.wdz, b));
    Dir d = direction(sigma, corr, aff.dtau * aff.dkappa);
    const double alpha = std::min(1.0, 0.99 * step_to_boundary(d));
    if (!(alpha > 1e-14)) return finish(SolveStatus::NumericalFailure, x, tau, "step length collapsed");
    x += alpha * d.dx;
    s += alpha * d.ds;
    z += alpha * d.dz;
    symmetrize(s);
    symmetrize(z);
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }
  return finish(SolveStatus::MaxIter, x, tau, "iteration limit");
}

}  // namespace

ConicSolution InteriorPointSolver::solve(const ConicProblem& p, const SolverOptions& opt) const {
  p.check();
  return Ipm(p, opt).run();
}

const ConicSolver& default_solver() {
  static const InteriorPointSolver solver;
  return solver;
}

ConicSolution solve(const ConicProblem& p, double tol) {
  SolverOptions opt;
  opt.tol = tol;
  return default_solver().solve(p, opt);
}

void add_rotated_soc(ConicProblem& p, const std::vector<Affine>& a, const Affine& t, const std::string& tag) {
  std::vector<Affine> e{t + Affine(1.0)};
  for (const auto& x : a) e.push_back(2.0 * x);
  e.push_back(t - Affine(1.0));
  p.add(vector_block(ConeKind::SOC, e, tag));
}

void write_problem(std::ostream& os, const ConicProblem& p) {
  os << std::setprecision(17);
  os << "conic 1\n";
  os << "vars " << p.n << "\n";
  for (int i = 0; i < p.n; ++i) os << "name " << i << " " << (p.names[i].empty() ? "_" : p.names[i]) << "\n";
  int nnz = 0;
  for (int i = 0; i < p.n; ++i) nnz += p.c(i) != 0;
  os << "objective " << nnz << "\n";
  for (int i = 0; i < p.n; ++i)
    if (p.c(i) != 0) os << i << " " << p.c(i) << "\n";
  for (const auto& b : p.blocks) {
    const char* kind = b.kind == ConeKind::Nonneg ? "nonneg" : b.kind == ConeKind::SOC ? "soc" : "psd";
    os << "block " << kind << " " << b.dim << " " << (b.tag.empty() ? "_" : b.tag) << "\n";
    auto dump = [&](const RVec& v) {
      int cnt = 0;
      for (Eigen::Index r = 0; r < v.size(); ++r) cnt += v(r) != 0;
      os << cnt << "\n";
      for (Eigen::Index r = 0; r < v.size(); ++r)
        if (v(r) != 0) os << r << " " << v(r) << "\n";
    };
    os << "const ";
    dump(b.constant);
    for (size_t k = 0; k < b.vars.size(); ++k) {
      os << "coef " << b.vars[k] << " ";
      dump(b.coef.col(k));
    }
    os << "end\n";
  }
}

ConicProblem read_problem(std::istream& is) {
  auto fail = [](const std::string& what) { throw std::runtime_error("read_problem: " + what); };
  ConicProblem p;
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "conic") fail("missing header");
  int n = 0;
  if (!(is >> word >> n) || word != "vars") fail("missing variable count");
  for (int i = 0; i < n; ++i) {
    int idx;
    std::string name;
    if (!(is >> word >> idx >> name) || word != "name") fail("bad name line");
    p.add_variable(name == "_" ? "" : name);
  }
  int nnz = 0;
  if (!(is >> word >> nnz) || word != "objective") fail("missing objective");
  for (int k = 0; k < nnz; ++k) {
    int i;
    double v;
    if (!(is >> i >> v)) fail("bad objective entry");
    p.c(i) = v;
  }
  while (is >> word) {
    if (word != "block") fail("expected block");
    std::string kind, tag;
    ConeBlock b;
    if (!(is >> kind >> b.dim >> tag)) fail("bad block header");
    b.kind = kind == "nonneg" ? ConeKind::Nonneg : kind == "soc" ? ConeKind::SOC : ConeKind::PSD;
    if (kind != "nonneg" && kind != "soc" && kind != "psd") fail("unknown cone " + kind);
    b.tag = tag == "_" ? "" : tag;
    auto load = [&](RVec& v) {
      int cnt;
      if (!(is >> cnt)) fail("bad entry count");
      v = RVec::Zero(b.rows());
      for (int k = 0; k < cnt; ++k) {
        int r;
        double x;
        if (!(is >> r >> x)) fail("bad entry");
        v(r) = x;
      }
    };
    if (!(is >> word) || word != "const") fail("missing const");
    load(b.constant);
    std::vector<RVec> cols;
    while (is >> word && word != "end") {
      if (word != "coef") fail("expected coef");
      int var;
      is >> var;
      b.vars.push_back(var);
      cols.emplace_back();
      load(cols.back());
    }
    b.coef = RMat(b.rows(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) b.coef.col(k) = cols[k];
    p.add(std::move(b));
  }
  return p;
}

}  // namespace irssec
