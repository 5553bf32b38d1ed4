#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ocbf/oracle.hpp"
#include "ocbf/sca.hpp"

namespace ocbf {

/// Outcome of running one method on one scenario.
struct MethodRun {
  BeamformerSolution solution;
  std::string status;  // ok | converged | max-iter | init-failure | numerical-failure | infeasible
  int iterations = 0;
  double solve_ms = 0.0;
  double max_rank_ratio = 0.0;
  std::vector<double> objective_trace;  // SCA only
  bool converged = false;
  std::string message;
};

/// Never throws for method infeasibility; reports it through `status`.
MethodRun run_method(const Scenario& s, Method m, const ScaConfig& sca = {},
                     const OracleConfig& oracle = {});

std::string solution_to_json(const Scenario& s, const MethodRun& run);
/// Reads the "w" and "rates" fields of a solution document.
BeamformerSolution solution_from_json(const std::string& text);

struct UserCheck {
  double closed_form = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  bool pass = false;
};

/// Per-user closed-form outage and Monte Carlo estimate; a user passes when the
/// estimate is at most eps + 3 stderr. Throws InvalidInput on dimension mismatch.
std::vector<UserCheck> verify_solution(const Scenario& s, const BeamformerSolution& sol,
                                       std::int64_t samples, std::uint64_t seed);

struct SweepSpec {
  std::string axis = "eta";  // eta | snr_db
  std::vector<double> values;
  int trials = 1;
  std::vector<Method> methods;
  int K = 2;
  int Nt = 4;
  int rank = -1;
  double eps = 0.1;
  double delta = 1e-2;
  double eta = 0.5;      // fixed value when axis = snr_db
  double snr_db = 10.0;  // fixed value when axis = eta
  std::uint64_t seed = 1;
  int oracle_M = 20;
  std::int64_t verify_samples = 10000;
  int max_iters = 50;
  int threads = 0;  // 0: hardware concurrency
};

/// Throws ParseError / InvalidInput (trials >= 1, ORACLE only with K = 2, ...).
SweepSpec sweep_spec_from_json(const std::string& text);
void validate(const SweepSpec& spec);

struct ResultRow {
  double axis_value = 0.0;
  std::string method;
  int trial = 0;
  double sum_rate = 0.0;
  std::vector<double> rates;
  int iterations = 0;
  double solve_ms = 0.0;
  double max_outage_estimate = 0.0;
  double max_outage_stderr = 0.0;
  double max_rank_ratio = 0.0;
  std::string status;
};

inline constexpr const char* kCsvHeader =
    "axis_value,method,trial,sum_rate,rates,iterations,solve_ms,max_outage_estimate,"
    "max_rank_ratio,status";

/// Scenario seed of a trial: shared by every axis value so that sweeps compare
/// methods and axis points on common draws.
std::uint64_t trial_scenario_seed(std::uint64_t master, int trial);
/// Seed of the Monte Carlo verification stream of one (axis index, trial, method).
std::uint64_t trial_stream_seed(std::uint64_t master, int axis_index, int trial, int method);

Scenario sweep_scenario(const SweepSpec& spec, int axis_index, int trial);

/// Rows in (axis index, trial, method) order regardless of worker scheduling.
std::vector<ResultRow> run_sweep(const SweepSpec& spec,
                                 const std::function<void(int done, int total)>& progress = {});

std::string rows_to_csv(const std::vector<ResultRow>& rows, bool include_timing = true);
/// One row per (axis value, method): mean sum rate over rows with a usable status.
std::string summary_csv(const std::vector<ResultRow>& rows);

/// Runs `fn(task)` for task in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace ocbf
