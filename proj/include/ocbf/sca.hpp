#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ocbf/baselines.hpp"
#include "ocbf/subproblem.hpp"

namespace ocbf {

enum class InitStrategy { MRT, ZF, Provided };

struct ScaConfig {
  double delta = 1e-2;
  int max_iters = 50;
  InitStrategy init = InitStrategy::MRT;
  /// Used when init == Provided; rates are recomputed from its beamformers.
  std::optional<Beamformers> provided;
  double rank_tol = 1e-5;
  barrier::Options solver;
  /// Per-iteration log (objective, rank ratios, discrepancies) when set.
  std::ostream* log = nullptr;
};

/// Rates below this are raised before anchoring so that log(2^R - 1) is finite.
inline constexpr double kRateFloor = 1e-6;
/// Cross-link quadratic forms below this are raised before taking logs.
inline constexpr double kCrossPowerFloor = 1e-12;

struct ScaIteration {
  double subproblem_objective = 0.0;  // sum alpha_i R_i^* of the convex model
  double objective = 0.0;             // after extraction and re-feasibilization
  std::vector<double> rank_ratios;
  int newton_steps = 0;
  double kkt_residual = 0.0;
  double max_row_value = 0.0;
  int backoffs = 0;
  barrier::Status status = barrier::Status::NumericalFailure;
  /// max_i (R_i^* - refeasibilized R_i); positive only when extraction loses power.
  double rate_discrepancy = 0.0;
};

struct ScaResult {
  BeamformerSolution solution;
  std::vector<double> objective_trace;  // entry 0 is the initial point
  int iterations = 0;
  std::vector<double> rank_ratios;
  bool converged = false;
  std::string status;  // "converged" | "max-iter" | "init-failure" | "numerical-failure"
  std::vector<ScaIteration> history;
};

/// Log-domain anchor of a feasible point (cross powers floored at kCrossPowerFloor).
/// Throws InvalidInput for a zero signal power or a non-positive rate.
Anchor anchor_from_solution(const Scenario& s, const Beamformers& w, const RateTuple& R);

struct Extraction {
  Beamformers w;
  std::vector<double> rank_ratios;  // lambda_2 / lambda_1 per block
};

/// w_i = sqrt(lambda_1) u_1 of each W_i (phase-normalized).
Extraction extract_beamformers(const std::vector<HermitianMatrix>& W);

/// Exact epsilon-rates of the extracted beamformers.
RateTuple refeasibilize(const Scenario& s, const Beamformers& w);

/// Sequential conservative approximation from an MRT / ZF / provided start.
/// Throws InfeasibleStrategy when ZF initialization is impossible.
ScaResult run_sca(const Scenario& s, const ScaConfig& cfg = {});

}  // namespace ocbf
