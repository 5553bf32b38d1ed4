// ocbf: command-line front end for scenario generation, beamformer design,
// Monte Carlo verification, parameter sweeps and the K = 2 exhaustive oracle.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ocbf/errors.hpp"
#include "ocbf/experiment.hpp"
#include "ocbf/json_io.hpp"

namespace {

using namespace ocbf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

const char* kSweepHelp =
    "Runs every method on every (axis value, trial) pair and writes one CSV row per run.\n"
    "Columns: axis_value, method, trial, sum_rate (weighted), rates (';'-separated per user),\n"
    "iterations (SCA outer iterations, 0 otherwise), solve_ms, max_outage_estimate (largest\n"
    "per-user Monte Carlo outage), max_rank_ratio (SCA lambda2/lambda1), status.\n"
    "A companion file <out>.summary.csv holds the mean sum rate per (axis value, method).";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output file (default: standard output)");
  cmd->add_flag("--verbose,-v", c.verbose, "Diagnostics on standard error");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage-constrained beamforming for the MISO interference channel"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  ScenarioParams gp;
  auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
  add_common(gen, gen_c);
  gen->add_option("--K", gp.K, "Number of user pairs")->capture_default_str();
  gen->add_option("--Nt", gp.Nt, "Transmit antennas")->capture_default_str();
  gen->add_option("--eta", gp.eta, "Cross-link level lambda_max(Q_ki)")->capture_default_str();
  gen->add_option("--snr-db", gp.snr_db, "1/sigma^2 in dB")->capture_default_str();
  gen->add_option("--eps", gp.eps, "Outage budget of every user")->capture_default_str();
  gen->add_option("--rank", gp.rank, "Covariance rank (-1: full)")->capture_default_str();

  // solve
  Common solve_c;
  std::string solve_scenario, solve_method = "sca", solve_init = "mrt";
  ScaConfig sca_cfg;
  OracleConfig solve_oracle;
  auto* solve = app.add_subcommand("solve", "Design beamformers with one method and print JSON");
  add_common(solve, solve_c);
  solve->add_option("--scenario", solve_scenario, "Scenario file")->required();
  solve->add_option("--method", solve_method, "sca | mrt | zf | tdma | oracle")->capture_default_str();
  solve->add_option("--delta", sca_cfg.delta, "SCA relative stopping threshold")->capture_default_str();
  solve->add_option("--max-iters", sca_cfg.max_iters, "SCA iteration cap")->capture_default_str();
  solve->add_option("--init", solve_init, "SCA initialization: mrt | zf")->capture_default_str();
  solve->add_option("--M", solve_oracle.M, "Oracle levels per cross link")->capture_default_str();

  // verify
  Common verify_c;
  std::string verify_scenario, verify_solution_path;
  std::int64_t verify_samples = 100000;
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of a solution's outage constraints");
  add_common(verify, verify_c);
  verify->add_option("--scenario", verify_scenario, "Scenario file")->required();
  verify->add_option("--solution", verify_solution_path, "Solution JSON (output of solve)")->required();
  verify->add_option("--samples", verify_samples, "Channel draws per user")->capture_default_str();

  // sweep
  Common sweep_c;
  std::string sweep_spec_path;
  int sweep_threads = -1;
  auto* sweep = app.add_subcommand("sweep", kSweepHelp);
  add_common(sweep, sweep_c);
  sweep->add_option("--spec", sweep_spec_path, "Sweep specification JSON")->required();
  sweep->add_option("--threads", sweep_threads, "Worker threads (default: from spec)");

  // oracle
  Common oracle_c;
  std::string oracle_scenario;
  OracleConfig oracle_cfg;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive interference-grid search (K = 2)");
  add_common(oracle, oracle_c);
  oracle->add_option("--scenario", oracle_scenario, "Scenario file")->required();
  oracle->add_option("--M", oracle_cfg.M, "Levels per cross link")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      gp.seed = gen_c.seed;
      const Scenario s = generate_scenario(gp);
      if (gen_c.out.empty()) {
        std::cout << scenario_to_json(s) << '\n';
      } else {
        save_scenario(s, gen_c.out);
      }
      return kExitOk;
    }

    if (*solve) {
      const Scenario s = load_scenario(solve_scenario);
      const Method m = parse_method(solve_method);
      if (solve_init == "zf" || solve_init == "ZF") {
        sca_cfg.init = InitStrategy::ZF;
      } else if (solve_init != "mrt" && solve_init != "MRT") {
        throw InvalidInput("unknown --init '" + solve_init + "'");
      }
      if (solve_c.verbose) {
        sca_cfg.log = &std::cerr;
        sca_cfg.solver.trace = &std::cerr;
      }
      if (m == Method::SCA && sca_cfg.init == InitStrategy::ZF) {
        try {
          (void)zf(s);
        } catch (const InfeasibleStrategy& e) {
          std::cerr << "error: " << e.what() << "; use --init mrt instead\n";
          return kExitInfeasible;
        }
      }
      const MethodRun run = run_method(s, m, sca_cfg, solve_oracle);
      if (run.status == "infeasible") {
        std::cerr << "error: " << run.message << '\n';
        return kExitInfeasible;
      }
      write_output(solve_c.out, solution_to_json(s, run));
      if (run.status == "numerical-failure" || run.status == "init-failure") {
        std::cerr << "error: numerical failure (" << run.status << ")"
                  << (run.message.empty() ? "" : ": " + run.message) << '\n';
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (*verify) {
      const Scenario s = load_scenario(verify_scenario);
      const BeamformerSolution sol = solution_from_json(read_file(verify_solution_path));
      const auto checks = verify_solution(s, sol, verify_samples, verify_c.seed);
      std::ostringstream report;
      bool all = true;
      report << "user,closed_form,mc_estimate,mc_stderr,eps,pass\n";
      for (std::size_t i = 0; i < checks.size(); ++i) {
        const UserCheck& c = checks[i];
        char line[200];
        std::snprintf(line, sizeof line, "%zu,%.10g,%.10g,%.3g,%.10g,%s\n", i, c.closed_form,
                      c.mc_estimate, c.mc_stderr, s.eps[i], c.pass ? "pass" : "FAIL");
        report << line;
        all = all && c.pass;
      }
      write_output(verify_c.out, report.str());
      return all ? kExitOk : kExitUsage;
    }

    if (*sweep) {
      SweepSpec spec = sweep_spec_from_json(read_file(sweep_spec_path));
      if (sweep->count("--seed")) spec.seed = sweep_c.seed;
      if (sweep_threads >= 0) spec.threads = sweep_threads;
      std::function<void(int, int)> progress;
      if (sweep_c.verbose) {
        progress = [](int done, int total) { std::cerr << "sweep " << done << "/" << total << '\n'; };
      }
      const auto rows = run_sweep(spec, progress);
      write_output(sweep_c.out, rows_to_csv(rows));
      const std::string summary_path =
          sweep_c.out.empty() || sweep_c.out == "-" ? std::string() : sweep_c.out + ".summary.csv";
      if (summary_path.empty()) {
        std::cout << '\n' << summary_csv(rows);
      } else {
        write_output(summary_path, summary_csv(rows));
      }
      return kExitOk;
    }

    if (*oracle) {
      const Scenario s = load_scenario(oracle_scenario);
      const MethodRun run = run_method(s, Method::ORACLE, {}, oracle_cfg);
      write_output(oracle_c.out, solution_to_json(s, run));
      return run.status == "ok" ? kExitOk : kExitNumerical;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleStrategy& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
