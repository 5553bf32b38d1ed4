#include "ocbf/oracle.hpp"

#include <cmath>

#include "ocbf/errors.hpp"

namespace ocbf {

std::vector<double> geometric_levels(double gmax, const OracleConfig& cfg) {
  if (cfg.M < 2) throw InvalidInput("oracle: M must be >= 2");
  if (!(cfg.grid_min_frac > 0.0 && cfg.grid_min_frac < 1.0)) {
    throw InvalidInput("oracle: grid_min_frac must be in (0, 1)");
  }
  if (!(gmax > 0.0)) return {0.0};
  std::vector<double> levels;
  if (cfg.include_zero) levels.push_back(0.0);
  const double log_frac = std::log(cfg.grid_min_frac);
  for (int j = 0; j < cfg.M; ++j) {
    const double expo = static_cast<double>(cfg.M - 1 - j) / static_cast<double>(cfg.M - 1);
    levels.push_back(j == cfg.M - 1 ? gmax : gmax * std::exp(expo * log_frac));
  }
  return levels;
}

std::array<std::vector<double>, 2> interference_grid(const Scenario& s, const OracleConfig& cfg) {
  if (s.K != 2) throw InvalidInput("oracle: exhaustive search supports K = 2 only");
  return {geometric_levels(s.P[0] * lambda_max(s.cov(0, 1)), cfg),
          geometric_levels(s.P[1] * lambda_max(s.cov(1, 0)), cfg)};
}

namespace {

// Reduces W = V V^H to rank one while keeping tr(A W) fixed for every A in `keep`
// (at most three matrices, so a rank-one point always exists).
CVector reduce_to_rank_one(CMatrix V, const std::vector<const HermitianMatrix*>& keep) {
  while (V.cols() > 1) {
    const int r = static_cast<int>(V.cols());
    RMatrix rows(static_cast<Eigen::Index>(keep.size()), r * r);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const HermitianMatrix reduced(V.adjoint() * keep[j]->matrix() * V, 1e-8);
      rows.row(j) = hparam::trace_gradient(reduced).transpose();
    }
    Eigen::JacobiSVD<RMatrix> svd(rows, Eigen::ComputeFullV);
    const RVector d = svd.matrixV().col(r * r - 1);
    const HermitianMatrix delta(hparam::unpack(d, r), 1e-8);
    EigenPairs ep = eig_hermitian(delta);
    double top = ep.values(0);
    CMatrix step = delta.matrix();
    if (std::abs(ep.values(r - 1)) > std::abs(top)) {
      step = -step;
      top = -ep.values(r - 1);
    }
    if (!(top > 0.0)) break;
    // W' = V (I - step / top) V^H is PSD with at least one zero eigenvalue.
    const HermitianMatrix inner(CMatrix::Identity(r, r) - step / top, 1e-8);
    const EigenPairs ip = eig_hermitian(inner);
    CMatrix next(V.rows(), r - 1);
    for (int c = 0; c < r - 1; ++c) {
      next.col(c) = V * ip.vectors.col(c) * std::sqrt(std::max(ip.values(c), 0.0));
    }
    V = std::move(next);
  }
  CVector w = V.col(0);
  normalize_phase(w);
  return w;
}

SignalMax restricted_mrt(const HermitianMatrix& q_own, const CMatrix& basis, double P) {
  SignalMax out;
  if (basis.cols() == 0) {
    out.w = CVector::Zero(q_own.dim());
    return out;
  }
  const HermitianMatrix reduced(basis.adjoint() * q_own.matrix() * basis, 1e-9);
  CVector w = basis * principal_eigenvector(reduced);
  w.normalize();
  normalize_phase(w);
  out.w = std::sqrt(P) * w;
  out.s_max = quadratic_form(q_own, out.w);
  out.sdp_value = out.s_max;
  out.sdp_rank = 1;
  return out;
}

}  // namespace

SignalMax max_signal_power(const HermitianMatrix& q_own, const HermitianMatrix& q_cross, double P,
                           double cap, const barrier::Options& opt) {
  const int n = q_own.dim();
  if (q_cross.dim() != n) throw InvalidInput("max_signal_power: dimension mismatch");
  if (!(P > 0.0) || !(cap >= 0.0)) throw InvalidInput("max_signal_power: need P > 0, cap >= 0");

  if (cap >= P * lambda_max(q_cross)) {
    return restricted_mrt(q_own, CMatrix::Identity(n, n), P);
  }
  if (cap == 0.0) {
    const HermitianMatrix qs[] = {q_cross};
    return restricted_mrt(q_own, joint_nullspace(qs, n), P);
  }

  // Solved in normalized units W' = W / P, objective scaled by 1 / lambda_max(Q_own)
  // and the cap row by P / cap, so every row has unit scale.
  const double own_scale = std::max(lambda_max(q_own), 1e-300);
  const HermitianMatrix own_n = q_own.scaled(1.0 / own_scale);
  const HermitianMatrix cross_n = q_cross.scaled(P / cap);

  barrier::Program prog;
  prog.n = n * n;
  prog.c = -hparam::trace_gradient(own_n);
  prog.blocks.push_back({0, n});
  barrier::Row power;
  power.name = "power";
  power.support.resize(n * n);
  for (int p = 0; p < n * n; ++p) power.support[p] = p;
  power.lin = hparam::trace_gradient(HermitianMatrix::identity(n));
  power.constant = -1.0;
  barrier::Row interference = power;
  interference.name = "interference";
  interference.lin = hparam::trace_gradient(cross_n);
  interference.constant = -1.0;
  prog.rows = {power, interference};

  const double tr_cross = std::max(cross_n.matrix().trace().real(), 1e-300);
  const double c0 = 0.5 * std::min(1.0 / n, 1.0 / tr_cross);
  RVector start(n * n);
  hparam::pack(CMatrix::Identity(n, n) * c0, start);
  // The normalized objective is bounded below by -1, which bounds the initial gap.
  barrier::Options o = opt;
  if (!(o.t0 > 0.0)) o.t0 = prog.m_total() / (1.0 + prog.c.dot(start));
  barrier::Result r = barrier::solve(prog, start, o);
  if (r.status == barrier::Status::NumericalFailure) {
    throw NumericalFailure("max_signal_power: interior-point solve failed");
  }
  r.v *= P;
  r.objective *= P * own_scale;

  const HermitianMatrix W(hparam::unpack(r.v, n), 1e-9);
  const EigenPairs ep = eig_hermitian(W);
  int rank = 0;
  while (rank < n && ep.values(rank) > 1e-9 * ep.values(0)) ++rank;
  CMatrix V(n, rank);
  for (int c = 0; c < rank; ++c) V.col(c) = ep.vectors.col(c) * std::sqrt(ep.values(c));

  SignalMax out;
  out.sdp_value = -r.objective;
  out.sdp_rank = rank;
  const HermitianMatrix eye = HermitianMatrix::identity(n);
  out.w = reduce_to_rank_one(V, {&eye, &q_cross, &q_own});
  out.s_max = quadratic_form(q_own, out.w);
  return out;
}

OracleResult exhaustive_search(const Scenario& s, const OracleConfig& cfg) {
  OracleResult res;
  res.grid = interference_grid(s, cfg);
  // Each user's best beam depends only on the cap of its own outgoing link.
  std::array<std::vector<SignalMax>, 2> beams;
  for (int u = 0; u < 2; ++u) {
    const int other = 1 - u;
    for (double cap : res.grid[u]) {
      beams[u].push_back(max_signal_power(s.cov(u, u), s.cov(u, other), s.P[u], cap));
    }
  }
  res.best_sum = -1.0;
  for (std::size_t a = 0; a < res.grid[0].size(); ++a) {
    for (std::size_t b = 0; b < res.grid[1].size(); ++b) {
      ++res.evaluated;
      LinkPowers lp0{beams[0][a].s_max, {res.grid[1][b]}, s.sigma2[0]};
      LinkPowers lp1{beams[1][b].s_max, {res.grid[0][a]}, s.sigma2[1]};
      const RateTuple rates = {epsilon_rate(lp0, s.eps[0]), epsilon_rate(lp1, s.eps[1])};
      const double sum = s.alpha[0] * rates[0] + s.alpha[1] * rates[1];
      if (sum > res.best_sum) {
        res.best_sum = sum;
        res.best_rates = rates;
        res.best_w = {beams[0][a].w, beams[1][b].w};
        res.best_index = {static_cast<int>(a), static_cast<int>(b)};
      }
    }
  }
  return res;
}

}  // namespace ocbf
