#pragma once

#include <string>
#include <vector>

#include "ocbf/barrier.hpp"
#include "ocbf/outage.hpp"

namespace ocbf {

/// Linearization point of one outer iteration: log received powers, log SINR
/// targets and the arithmetic-geometric mean weights derived from them.
struct Anchor {
  std::vector<std::vector<double>> x_bar;  // x_bar[k][i] = log(w_k^H Q_ki w_k)
  std::vector<double> y_bar;               // log(2^R - 1)
  std::vector<double> theta1;              // e^y / (e^y + 1)
  std::vector<double> theta2;              // 1 / (e^y + 1)
  std::vector<double> big_theta;           // theta1^theta1 * theta2^theta2
};

/// Fills the theta fields from x_bar and y_bar.
Anchor make_anchor(std::vector<std::vector<double>> x_bar, std::vector<double> y_bar);

/// Offsets of the subproblem variables inside the solver vector: one Hermitian
/// block W_i per user, then R, y, z (K each), then x[k][i] (K^2).
struct VariableLayout {
  int K = 0;
  int Nt = 0;

  int block(int i) const { return i * Nt * Nt; }
  int R(int i) const { return K * Nt * Nt + i; }
  int y(int i) const { return K * Nt * Nt + K + i; }
  int z(int i) const { return K * Nt * Nt + 2 * K + i; }
  int x(int k, int i) const { return K * Nt * Nt + 3 * K + k * K + i; }
  int size() const { return K * Nt * Nt + 3 * K + K * K; }
};

/// The convex conservative subproblem at one anchor, in solver form.
/// Rows per user i (names in brackets):
///   [a]  log(1-eps_i) + sigma_i^2 z_i + sum_{k!=i} softplus(x_ki + y_i - x_ii) <= 0
///   [b]  tr(W_k Q_ki) - e^{xb_ki} (x_ki - xb_ki + 1) <= 0,   k != i
///   [c]  e^{x_ii} - tr(W_i Q_ii) <= 0
///   [d]  log Theta_i + ln2 R_i - theta1_i y_i <= 0
///   [e]  e^{y_i - x_ii} - z_i <= 0
///   [f]  tr(W_i) - P_i <= 0
///   [r]  -R_i <= 0
/// plus W_i PSD; objective maximize sum alpha_i R_i.
struct SubproblemModel {
  VariableLayout layout;
  Anchor anchor;
  barrier::Program program;
};

SubproblemModel build_subproblem(const Scenario& s, const Anchor& a);

/// Deterministic strictly feasible start near the anchor's feasible point.
/// Throws NumericalFailure when no backoff of y yields strict feasibility.
struct InteriorStart {
  RVector v;
  int backoffs = 0;  // worst user
  double gamma = 0.0;
};
InteriorStart strict_interior_point(const SubproblemModel& m, const Scenario& s,
                                    const Beamformers& w_bar);

struct SubproblemSolution {
  std::vector<HermitianMatrix> W;
  std::vector<double> R;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<std::vector<double>> x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double max_row_value = 0.0;
  int iterations = 0;
  barrier::Status status = barrier::Status::NumericalFailure;
  double t = 0.0;
  RVector v;
};

SubproblemSolution solve_subproblem(const SubproblemModel& m, const Scenario& s,
                                    const RVector& start, const barrier::Options& opt = {});

/// Barrier optimality residual of an arbitrary point at barrier weight t.
double subproblem_kkt_residual(const SubproblemModel& m, const RVector& v, double t);

}  // namespace ocbf
