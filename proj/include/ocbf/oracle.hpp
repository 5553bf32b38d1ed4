#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ocbf/baselines.hpp"
#include "ocbf/barrier.hpp"

namespace ocbf {

struct OracleConfig {
  int M = 20;                   // nonzero levels per cross link
  double grid_min_frac = 1e-4;  // lowest nonzero level / highest level
  bool include_zero = true;
};

struct OracleResult {
  RateTuple best_rates;
  double best_sum = 0.0;  // sum alpha_i R_i at the best grid point
  Beamformers best_w;
  /// grid[0]: caps on the 0 -> 1 cross link, grid[1]: caps on 1 -> 0.
  std::array<std::vector<double>, 2> grid;
  std::array<int, 2> best_index{0, 0};
  std::int64_t evaluated = 0;
};

/// {0 (optional)} followed by M geometric levels from min_frac * gmax to gmax,
/// ascending. A zero gmax collapses to {0}.
std::vector<double> geometric_levels(double gmax, const OracleConfig& cfg);

/// Level lists for the two cross links of a K = 2 scenario, with
/// gmax = P_k * lambda_max(Q_ki). Throws InvalidInput for K != 2.
std::array<std::vector<double>, 2> interference_grid(const Scenario& s, const OracleConfig& cfg);

struct SignalMax {
  double s_max = 0.0;      // w^H Q_own w of the returned rank-one beam
  double sdp_value = 0.0;  // optimum of the relaxed program before rank reduction
  CVector w;
  int sdp_rank = 0;        // numerical rank of the solver output
};

/// maximize w^H Q_own w  s.t. |w|^2 <= P, w^H Q_cross w <= cap, through the
/// linear SDP relaxation followed by rank reduction to a rank-one optimum.
SignalMax max_signal_power(const HermitianMatrix& q_own, const HermitianMatrix& q_cross, double P,
                           double cap, const barrier::Options& opt = {});

/// Best weighted sum rate over every pair of cross-link caps; each rate is
/// computed with the partner's cap as its interference power.
OracleResult exhaustive_search(const Scenario& s, const OracleConfig& cfg = {});

}  // namespace ocbf
