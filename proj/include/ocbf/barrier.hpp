#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ocbf/hermitian.hpp"

namespace ocbf::barrier {

/// A Hermitian PSD block stored in hparam layout at v[offset, offset + dim^2).
struct PsdBlock {
  int offset = 0;
  int dim = 0;
};

/// Convex scalar row g(v) <= 0 over a sparse support:
///   g = constant + lin^T x + sum_k coef_k * f_k(a_k^T x + shift_k),
/// where x = v[support] and f_k is exp or softplus (coef_k >= 0 keeps g convex).
struct Row {
  enum class Kind { Exp, Softplus };
  struct Term {
    Kind kind = Kind::Exp;
    RVector a;  // over the support
    double shift = 0.0;
    double coef = 1.0;
  };

  std::string name;
  std::vector<int> support;
  RVector lin;
  double constant = 0.0;
  std::vector<Term> terms;

  double value(const RVector& v) const;
  /// Gradient and Hessian with respect to the support variables.
  void derivatives(const RVector& v, RVector& grad, RMatrix& hess) const;
  bool linear() const { return terms.empty(); }
};

/// Stable log(1 + e^u).
double softplus(double u);
double sigmoid(double u);

/// minimize c^T v  s.t.  rows[j](v) <= 0,  W_b(v) PSD for each block.
struct Program {
  int n = 0;
  RVector c;
  std::vector<PsdBlock> blocks;
  std::vector<Row> rows;

  /// Number of scalar rows plus dim of every PSD block (barrier parameter).
  int m_total() const;
  /// Largest row value and whether every block is positive definite.
  double max_row_value(const RVector& v) const;
  bool strictly_feasible(const RVector& v, double margin = 0.0) const;
};

enum class Status { Optimal, MaxIter, NumericalFailure };
const char* status_name(Status s);

struct Options {
  double mu = 10.0;
  double gap_tol = 1e-8;
  double floor_gap_tol = 1e-6;  // accepted when centering stalls at the precision floor
  double newton_tol = 1e-12;   // lambda^2 / 2
  double centered_tol = 1e-6;  // lambda^2 / 2 still accepted when the line search stalls
  double armijo = 0.01;
  double shrink = 0.5;
  int max_newton_total = 3000;
  int max_stall = 50;
  int max_centering = 50;   // Newton steps per centering before the floor is declared
  double t0 = -1.0;  // <= 0: chosen from the start point
  std::ostream* trace = nullptr;
};

struct Result {
  RVector v;
  double objective = 0.0;  // c^T v
  double t = 0.0;
  int newton_steps = 0;
  int outer_iterations = 0;
  double kkt_residual = 0.0;
  double max_row_value = 0.0;
  Status status = Status::NumericalFailure;
};

/// Barrier path following from a strictly feasible start: Newton centering on
/// t c^T v - sum log(-g_j) - sum log det W_b, then t <- mu t, until m_total / t <= gap_tol.
Result solve(const Program& prog, const RVector& start, const Options& opt = {});

/// Newton decrement of the centering problem at (v, t), divided by t, plus
/// the duality-gap bound m_total / t.
double kkt_residual(const Program& prog, const RVector& v, double t);

/// Barrier merit pieces, exposed for tests.
struct Merit {
  double barrier = 0.0;  // -sum log(-g) - sum log det
  RVector grad;          // of t c^T v + barrier
  RMatrix hess;
  bool feasible = false;
};
Merit evaluate(const Program& prog, const RVector& v, double t, bool need_hess);

}  // namespace ocbf::barrier
