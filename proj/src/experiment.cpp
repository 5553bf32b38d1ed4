#include "ocbf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ocbf/errors.hpp"
#include "ocbf/json_io.hpp"

namespace ocbf {

using json_io::json;

MethodRun run_method(const Scenario& s, Method m, const ScaConfig& sca, const OracleConfig& oracle) {
  MethodRun run;
  run.solution.method = m;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (m) {
      case Method::MRT: run.solution = mrt(s); run.status = "ok"; break;
      case Method::ZF: run.solution = zf(s); run.status = "ok"; break;
      case Method::TDMA: run.solution = tdma(s); run.status = "ok"; break;
      case Method::SCA: {
        const ScaResult r = run_sca(s, sca);
        run.solution = r.solution;
        run.status = r.status;
        run.iterations = r.iterations;
        run.converged = r.converged;
        run.objective_trace = r.objective_trace;
        for (double rr : r.rank_ratios) run.max_rank_ratio = std::max(run.max_rank_ratio, rr);
        break;
      }
      case Method::ORACLE: {
        const OracleResult r = exhaustive_search(s, oracle);
        run.solution.method = Method::ORACLE;
        run.solution.w = r.best_w;
        run.solution.rates = r.best_rates;
        run.solution.meta["evaluated"] = std::to_string(r.evaluated);
        run.status = "ok";
        break;
      }
    }
  } catch (const InfeasibleStrategy& e) {
    run.status = "infeasible";
    run.message = e.what();
    run.solution.w.clear();
    run.solution.rates.clear();
  } catch (const NumericalFailure& e) {
    run.status = "numerical-failure";
    run.message = e.what();
    run.solution.w.clear();
    run.solution.rates.clear();
  }
  run.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

std::string solution_to_json(const Scenario& s, const MethodRun& run) {
  json j;
  j["method"] = method_name(run.solution.method);
  j["status"] = run.status;
  if (!run.message.empty()) j["message"] = run.message;
  json w = json::array();
  for (const CVector& wi : run.solution.w) w.push_back(json_io::vector_to_json(wi));
  j["w"] = std::move(w);
  j["rates"] = run.solution.rates;
  j["sum_rate"] = run.solution.rates.empty() ? 0.0 : run.solution.weighted_sum(s);
  std::vector<double> outage;
  for (int i = 0; i < static_cast<int>(run.solution.rates.size()); ++i) {
    if (run.solution.method == Method::TDMA) break;
    outage.push_back(outage_probability(link_powers(s, run.solution.w, i), run.solution.rates[i]));
  }
  if (!outage.empty()) j["closed_form_outage"] = outage;
  if (run.solution.method == Method::SCA) {
    j["converged"] = run.converged;
    j["iterations"] = run.iterations;
    j["objective_trace"] = run.objective_trace;
    j["max_rank_ratio"] = run.max_rank_ratio;
  }
  json meta = json::object();
  for (const auto& [k, v] : run.solution.meta) meta[k] = v;
  j["meta"] = std::move(meta);
  j["solve_ms"] = run.solve_ms;
  return j.dump(1);
}

BeamformerSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("solution: ") + e.what());
  }
  BeamformerSolution sol;
  if (j.contains("method")) sol.method = parse_method(j.at("method").get<std::string>());
  const json& w = json_io::require(j, "w");
  if (!w.is_array()) throw ParseError("field 'w': expected an array of vectors");
  for (std::size_t i = 0; i < w.size(); ++i) {
    sol.w.push_back(json_io::vector_from_json(w[i], "w[" + std::to_string(i) + "]"));
  }
  sol.rates = json_io::number_array(json_io::require(j, "rates"), "rates");
  return sol;
}

std::vector<UserCheck> verify_solution(const Scenario& s, const BeamformerSolution& sol,
                                       std::int64_t samples, std::uint64_t seed) {
  if (static_cast<int>(sol.w.size()) != s.K || static_cast<int>(sol.rates.size()) != s.K) {
    throw InvalidInput("verify: solution must have K beamformers and K rates");
  }
  for (const CVector& wi : sol.w) {
    if (wi.size() != s.Nt) throw InvalidInput("verify: beamformer length differs from Nt");
  }
  const ChannelSampler sampler(s);
  std::vector<UserCheck> out(s.K);
  for (int i = 0; i < s.K; ++i) {
    Beamformers w = sol.w;
    RateTuple r = sol.rates;
    if (sol.method == Method::TDMA) {
      // Time-shared: user i transmits alone in its slot at K times its average rate.
      for (int k = 0; k < s.K; ++k) {
        if (k != i) w[k].setZero();
      }
      r[i] *= s.K;
    }
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i), 0x7e71f1ULL}));
    const OutageEstimate est = mc_outage(sampler, s, w, r, i, samples, rng);
    out[i].closed_form = outage_probability(link_powers(s, w, i), r[i]);
    out[i].mc_estimate = est.estimate;
    out[i].mc_stderr = est.stderr_;
    out[i].pass = est.estimate <= s.eps[i] + 3.0 * est.stderr_;
  }
  return out;
}

void validate(const SweepSpec& spec) {
  if (spec.axis != "eta" && spec.axis != "snr_db") {
    throw InvalidInput("sweep: axis must be 'eta' or 'snr_db'");
  }
  if (spec.values.empty()) throw InvalidInput("sweep: values must be non-empty");
  if (spec.trials < 1) throw InvalidInput("sweep: trials must be >= 1");
  if (spec.methods.empty()) throw InvalidInput("sweep: methods must be non-empty");
  if (spec.K < 1 || spec.Nt < 1) throw InvalidInput("sweep: K and Nt must be positive");
  for (Method m : spec.methods) {
    if (m == Method::ORACLE && spec.K != 2) throw InvalidInput("sweep: ORACLE requires K = 2");
  }
  if (spec.verify_samples < 1) throw InvalidInput("sweep: verify_samples must be >= 1");
}

SweepSpec sweep_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep spec: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("sweep spec: top level must be an object");
  SweepSpec spec;
  spec.axis = json_io::require(j, "axis").get<std::string>();
  spec.values = json_io::number_array(json_io::require(j, "values"), "values");
  spec.trials = json_io::require(j, "trials").get<int>();
  const json& methods = json_io::require(j, "methods");
  if (!methods.is_array()) throw ParseError("field 'methods': expected an array of labels");
  for (const json& m : methods) spec.methods.push_back(parse_method(m.get<std::string>()));
  auto opt_int = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = j.at(key).get<int>();
  };
  auto opt_num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = json_io::number(j.at(key), key);
  };
  opt_int("K", spec.K);
  opt_int("Nt", spec.Nt);
  opt_int("rank", spec.rank);
  opt_num("eps", spec.eps);
  opt_num("delta", spec.delta);
  opt_num("eta", spec.eta);
  opt_num("snr_db", spec.snr_db);
  opt_int("oracle_M", spec.oracle_M);
  opt_int("max_iters", spec.max_iters);
  opt_int("threads", spec.threads);
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("verify_samples")) spec.verify_samples = j.at("verify_samples").get<std::int64_t>();
  validate(spec);
  return spec;
}

std::uint64_t trial_scenario_seed(std::uint64_t master, int trial) {
  return derive_seed(master, {0x5ce7ULL, static_cast<std::uint64_t>(trial)});
}

std::uint64_t trial_stream_seed(std::uint64_t master, int axis_index, int trial, int method) {
  return derive_seed(master, {0xa715ULL, static_cast<std::uint64_t>(axis_index),
                              static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(method)});
}

Scenario sweep_scenario(const SweepSpec& spec, int axis_index, int trial) {
  ScenarioParams p;
  p.K = spec.K;
  p.Nt = spec.Nt;
  p.rank = spec.rank;
  p.eps = spec.eps;
  p.eta = spec.eta;
  p.snr_db = spec.snr_db;
  if (spec.axis == "eta") {
    p.eta = spec.values.at(axis_index);
  } else {
    p.snr_db = spec.values.at(axis_index);
  }
  p.seed = trial_scenario_seed(spec.seed, trial);
  return generate_scenario(p);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next++; t < n; t = next++) {
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec,
                                 const std::function<void(int, int)>& progress) {
  validate(spec);
  const int n_axis = static_cast<int>(spec.values.size());
  const int n_methods = static_cast<int>(spec.methods.size());
  const int tasks = n_axis * spec.trials;
  std::vector<std::vector<ResultRow>> buffered(tasks);
  std::atomic<int> done{0};
  std::mutex progress_mu;

  ScaConfig sca;
  sca.delta = spec.delta;
  sca.max_iters = spec.max_iters;
  OracleConfig oracle;
  oracle.M = spec.oracle_M;

  parallel_for(tasks, spec.threads, [&](int task) {
    const int axis_index = task / spec.trials;
    const int trial = task % spec.trials;
    const Scenario s = sweep_scenario(spec, axis_index, trial);
    for (int mi = 0; mi < n_methods; ++mi) {
      const Method m = spec.methods[mi];
      const MethodRun run = run_method(s, m, sca, oracle);
      ResultRow row;
      row.axis_value = spec.values[axis_index];
      row.method = method_name(m);
      row.trial = trial;
      row.rates = run.solution.rates;
      row.sum_rate = run.solution.rates.empty() ? 0.0 : run.solution.weighted_sum(s);
      row.iterations = run.iterations;
      row.solve_ms = run.solve_ms;
      row.max_rank_ratio = run.max_rank_ratio;
      row.status = run.status;
      if (!run.solution.w.empty()) {
        const auto checks = verify_solution(
            s, run.solution, spec.verify_samples,
            trial_stream_seed(spec.seed, axis_index, trial, static_cast<int>(m)));
        for (const UserCheck& c : checks) {
          if (c.mc_estimate >= row.max_outage_estimate) {
            row.max_outage_estimate = c.mc_estimate;
            row.max_outage_stderr = c.mc_stderr;
          }
        }
      }
      buffered[task].push_back(std::move(row));
    }
    const int d = ++done;
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mu);
      progress(d, tasks);
    }
  });

  std::vector<ResultRow> rows;
  rows.reserve(static_cast<std::size_t>(tasks) * n_methods);
  for (auto& b : buffered) {
    for (auto& r : b) rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows, bool include_timing) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << num(r.axis_value) << ',' << r.method << ',' << r.trial << ',' << num(r.sum_rate) << ',';
    for (std::size_t i = 0; i < r.rates.size(); ++i) out << (i ? ";" : "") << num(r.rates[i]);
    out << ',' << r.iterations << ',' << (include_timing ? num(r.solve_ms) : std::string("0")) << ','
        << num(r.max_outage_estimate) << ',' << num(r.max_rank_ratio) << ',' << r.status << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<ResultRow>& rows) {
  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  // Preserve first-appearance order of (axis value, method).
  std::vector<std::pair<double, std::string>> order;
  std::map<std::pair<double, std::string>, Acc> acc;
  for (const ResultRow& r : rows) {
    const auto key = std::make_pair(r.axis_value, r.method);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    if (r.status == "infeasible" || r.status == "numerical-failure" || r.status == "init-failure") {
      continue;
    }
    a.sum += r.sum_rate;
    a.count += 1;
  }
  std::ostringstream out;
  out << "axis_value,method,mean_sum_rate,trials\n";
  for (const auto& key : order) {
    const Acc& a = acc[key];
    out << num(key.first) << ',' << key.second << ','
        << (a.count ? num(a.sum / a.count) : std::string("nan")) << ',' << a.count << '\n';
  }
  return out.str();
}

}  // namespace ocbf
