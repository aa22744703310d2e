#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irssec/types.hpp"

namespace irssec {

// Scalar affine expression over real decision variables.
struct Affine {
  double c0 = 0;
  std::vector<std::pair<int, double>> terms;

  Affine() = default;
  Affine(double c) : c0(c) {}
  static Affine var(int i, double coef = 1.0);

  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
  Affine& operator*=(double s);
  double eval(const RVec& x) const;
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator*(double s, Affine a);
Affine operator-(Affine a);

enum class ConeKind { Nonneg, SOC, PSD };

// s(x) = constant + coef * x[vars] must lie in the cone. PSD blocks store the
// full order x order matrix column-major.
struct ConeBlock {
  ConeKind kind = ConeKind::Nonneg;
  int dim = 0;
  std::string tag;
  RVec constant;
  std::vector<int> vars;
  RMat coef;

  int rows() const { return kind == ConeKind::PSD ? dim * dim : dim; }
  int degree() const { return kind == ConeKind::SOC ? 1 : dim; }
  RVec value(const RVec& x) const;
};

ConeBlock vector_block(ConeKind kind, const std::vector<Affine>& entries, const std::string& tag = "");

// Hermitian-valued affine map H(x) = constant + sum_i x_i * terms_i.
struct AffineHermitianBlock {
  int order = 0;
  std::string tag;
  std::vector<int> partition;
  CMat constant;
  std::vector<std::pair<int, CMat>> terms;

  explicit AffineHermitianBlock(int n = 0, std::string tag = "");
  void add_constant(int r, int c, cd v);            // also sets the mirrored entry
  void add_term(int var, int r, int c, cd v);       // also sets the mirrored entry
  void add_term(int var, const CMat& coefficient);
  void add(int r, int c, const Affine& a, cd scale = 1.0);
  CMat value(const RVec& x) const;
  void check_hermitian(double tol = 1e-12) const;
};

// [[Re, -Im], [Im, Re]] embedding into a real symmetric PSD block.
RMat realify(const CMat& H);
ConeBlock realify(const AffineHermitianBlock& H);

struct ConicProblem {
  int n = 0;
  RVec c;  // maximize c . x
  std::vector<ConeBlock> blocks;
  std::vector<std::string> names;

  int add_variable(const std::string& name);
  int find(const std::string& name) const;  // -1 if absent
  void add(ConeBlock b);
  void add(const AffineHermitianBlock& h);
  void nonneg(const Affine& a, const std::string& tag = "");
  void set_objective(const Affine& a);
  void check() const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };
const char* to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 100;
};

struct ConicSolution {
  RVec x;
  double objective = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  double primal_residual = 0, dual_residual = 0, gap = 0;
  int iterations = 0;
  double seconds = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
  // Accepts near-optimal points that stalled short of the tight tolerance.
  bool usable(double loose = 1e-6) const;
};

class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual ConicSolution solve(const ConicProblem& p, const SolverOptions& opt) const = 0;
};

class InteriorPointSolver : public ConicSolver {
 public:
  ConicSolution solve(const ConicProblem& p, const SolverOptions& opt) const override;
};

const ConicSolver& default_solver();
ConicSolution solve(const ConicProblem& p, double tol = 1e-8);

struct VerifyReport {
  std::vector<double> residual;  // per block: min entry / norm slack / min eigenvalue
  double worst = 0;
  int worst_block = -1;
  bool pass = true;
  std::string describe(const ConicProblem& p) const;
};

VerifyReport verify(const ConicProblem& p, const RVec& x, double tol);
double cone_residual(ConeKind kind, int dim, const RVec& s);

// |a|^2 <= t as the cone ||(2a, t - 1)|| <= t + 1.
void add_rotated_soc(ConicProblem& p, const std::vector<Affine>& a, const Affine& t, const std::string& tag = "");

// Plain-text sparse dump; see README for the format.
void write_problem(std::ostream& os, const ConicProblem& p);
ConicProblem read_problem(std::istream& is);

}  // namespace irssec
