#include "ocbf/sca.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "ocbf/errors.hpp"

namespace ocbf {

Anchor anchor_from_solution(const Scenario& s, const Beamformers& w, const RateTuple& R) {
  if (static_cast<int>(w.size()) != s.K || static_cast<int>(R.size()) != s.K) {
    throw InvalidInput("anchor: dimension mismatch");
  }
  std::vector<std::vector<double>> x(s.K, std::vector<double>(s.K));
  std::vector<double> y(s.K);
  for (int i = 0; i < s.K; ++i) {
    const double sig = quadratic_form(s.cov(i, i), w[i]);
    if (!(sig > 0.0)) throw InvalidInput("anchor: zero signal power for user " + std::to_string(i));
    if (!(R[i] > 0.0)) throw InvalidInput("anchor: rate must be positive for user " + std::to_string(i));
    x[i][i] = std::log(sig);
    y[i] = std::log(std::expm1(R[i] * std::log(2.0)));
    for (int k = 0; k < s.K; ++k) {
      if (k != i) x[k][i] = std::log(std::max(quadratic_form(s.cov(k, i), w[k]), kCrossPowerFloor));
    }
  }
  return make_anchor(std::move(x), std::move(y));
}

Extraction extract_beamformers(const std::vector<HermitianMatrix>& W) {
  Extraction ex;
  for (const HermitianMatrix& wi : W) {
    const EigenPairs ep = eig_hermitian(wi);
    const double l1 = wi.dim() > 0 ? ep.values(0) : 0.0;
    if (!(l1 > 0.0)) {
      ex.w.push_back(CVector::Zero(wi.dim()));
      ex.rank_ratios.push_back(0.0);
      continue;
    }
    CVector u = ep.vectors.col(0);
    normalize_phase(u);
    ex.w.push_back(std::sqrt(l1) * u);
    const double l2 = wi.dim() > 1 ? std::max(ep.values(1), 0.0) : 0.0;
    ex.rank_ratios.push_back(l2 / l1);
  }
  return ex;
}

RateTuple refeasibilize(const Scenario& s, const Beamformers& w) { return evaluate_rates(s, w); }

namespace {

double weighted(const Scenario& s, const RateTuple& r) {
  double acc = 0.0;
  for (int i = 0; i < s.K; ++i) acc += s.alpha[i] * r[i];
  return acc;
}

}  // namespace

ScaResult run_sca(const Scenario& s, const ScaConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw InvalidInput("sca: delta must be positive");
  if (cfg.max_iters < 1) throw InvalidInput("sca: max_iters must be >= 1");
  for (int i = 0; i < s.K; ++i) {
    if (!(s.eps[i] < 1.0)) throw InvalidInput("sca: outage budgets must be below 1");
  }

  Beamformers w_bar;
  switch (cfg.init) {
    case InitStrategy::MRT: w_bar = mrt(s).w; break;
    case InitStrategy::ZF:
      try {
        w_bar = zf(s).w;
      } catch (const InfeasibleStrategy& e) {
        throw InfeasibleStrategy(std::string(e.what()) + "; use MRT initialization instead");
      }
      break;
    case InitStrategy::Provided:
      if (!cfg.provided || static_cast<int>(cfg.provided->size()) != s.K) {
        throw InvalidInput("sca: provided initialization needs K beamformers");
      }
      w_bar = *cfg.provided;
      for (int i = 0; i < s.K; ++i) {
        if (w_bar[i].squaredNorm() > s.P[i] * (1.0 + 1e-9)) {
          throw InvalidInput("sca: provided beamformer violates the power budget");
        }
      }
      break;
  }
  RateTuple r_bar = evaluate_rates(s, w_bar);

  ScaResult res;
  res.solution.method = Method::SCA;
  res.solution.w = w_bar;
  res.solution.rates = r_bar;
  res.objective_trace.push_back(weighted(s, r_bar));
  res.status = "max-iter";
  double best = res.objective_trace.back();

  for (int it = 0; it < cfg.max_iters; ++it) {
    RateTuple r_anchor = r_bar;
    for (double& r : r_anchor) r = std::max(r, kRateFloor);
    const Anchor anchor = anchor_from_solution(s, w_bar, r_anchor);
    const SubproblemModel model = build_subproblem(s, anchor);

    InteriorStart start;
    try {
      start = strict_interior_point(model, s, w_bar);
    } catch (const NumericalFailure&) {
      res.status = "init-failure";
      break;
    }
    const SubproblemSolution sub = solve_subproblem(model, s, start.v, cfg.solver);
    ++res.iterations;
    if (sub.status == barrier::Status::NumericalFailure) {
      res.status = "numerical-failure";
      break;
    }

    const Extraction ex = extract_beamformers(sub.W);
    const RateTuple r_new = refeasibilize(s, ex.w);
    const double obj_prev = weighted(s, r_bar);
    const double obj_new = weighted(s, r_new);

    ScaIteration rec;
    rec.subproblem_objective = sub.objective;
    rec.objective = obj_new;
    rec.rank_ratios = ex.rank_ratios;
    rec.newton_steps = sub.iterations;
    rec.kkt_residual = sub.kkt_residual;
    rec.max_row_value = sub.max_row_value;
    rec.backoffs = start.backoffs;
    rec.status = sub.status;
    rec.rate_discrepancy = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.K; ++i) {
      rec.rate_discrepancy = std::max(rec.rate_discrepancy, sub.R[i] - r_new[i]);
    }
    res.history.push_back(rec);
    res.objective_trace.push_back(obj_new);
    res.rank_ratios = ex.rank_ratios;

    if (cfg.log) {
      *cfg.log << "sca iter " << res.iterations << ": model " << sub.objective << ", refeasibilized "
               << obj_new << ", newton " << sub.iterations << ", kkt " << sub.kkt_residual;
      for (double rr : ex.rank_ratios) {
        if (rr > cfg.rank_tol) *cfg.log << ", rank ratio " << rr << " above tolerance";
      }
      if (rec.rate_discrepancy > 1e-9) {
        *cfg.log << ", model rates exceed refeasibilized by " << rec.rate_discrepancy;
      }
      *cfg.log << '\n';
    }

    if (obj_new >= best) {
      best = obj_new;
      res.solution.w = ex.w;
      res.solution.rates = r_new;
    }
    w_bar = ex.w;
    r_bar = r_new;

    const double rel = obj_prev > 0.0 ? std::abs(obj_new - obj_prev) / obj_prev
                                      : (obj_new == obj_prev ? 0.0 : 1.0);
    if (rel < cfg.delta) {
      res.converged = true;
      res.status = "converged";
      break;
    }
  }
  res.solution.meta["iterations"] = std::to_string(res.iterations);
  res.solution.meta["status"] = res.status;
  return res;
}

}  // namespace ocbf
