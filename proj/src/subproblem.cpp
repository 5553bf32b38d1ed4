#include "ocbf/subproblem.hpp"

#include <cmath>

#include "ocbf/errors.hpp"

namespace ocbf {

using barrier::Row;

Anchor make_anchor(std::vector<std::vector<double>> x_bar, std::vector<double> y_bar) {
  Anchor a;
  a.x_bar = std::move(x_bar);
  a.y_bar = std::move(y_bar);
  const std::size_t K = a.y_bar.size();
  a.theta1.resize(K);
  a.theta2.resize(K);
  a.big_theta.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double t1 = barrier::sigmoid(a.y_bar[i]);
    const double t2 = barrier::sigmoid(-a.y_bar[i]);
    a.theta1[i] = t1;
    a.theta2[i] = t2;
    const double log_theta = (t1 > 0.0 ? t1 * std::log(t1) : 0.0) + (t2 > 0.0 ? t2 * std::log(t2) : 0.0);
    a.big_theta[i] = std::exp(log_theta);
  }
  return a;
}

namespace {

Row make_row(std::string name, std::vector<int> support) {
  Row r;
  r.name = std::move(name);
  r.lin = RVector::Zero(static_cast<Eigen::Index>(support.size()));
  r.support = std::move(support);
  return r;
}

std::vector<int> block_support(const VariableLayout& L, int i) {
  std::vector<int> sup(L.Nt * L.Nt);
  for (int p = 0; p < L.Nt * L.Nt; ++p) sup[p] = L.block(i) + p;
  return sup;
}

double log_big_theta(const Anchor& a, int i) {
  const double t1 = a.theta1[i];
  const double t2 = a.theta2[i];
  return (t1 > 0.0 ? t1 * std::log(t1) : 0.0) + (t2 > 0.0 ? t2 * std::log(t2) : 0.0);
}

}  // namespace

SubproblemModel build_subproblem(const Scenario& s, const Anchor& a) {
  SubproblemModel m;
  m.layout = {s.K, s.Nt};
  m.anchor = a;
  const VariableLayout& L = m.layout;
  barrier::Program& prog = m.program;
  prog.n = L.size();
  prog.c = RVector::Zero(prog.n);
  const int nb = s.Nt * s.Nt;
  const RVector trace_identity = hparam::trace_gradient(HermitianMatrix::identity(s.Nt));

  for (int i = 0; i < s.K; ++i) {
    prog.c(L.R(i)) = -s.alpha[i];
    prog.blocks.push_back({L.block(i), s.Nt});
    const std::string tag = "[" + std::to_string(i) + "]";

    // [a] log-form outage constraint.
    {
      std::vector<int> sup = {L.z(i), L.y(i), L.x(i, i)};
      for (int k = 0; k < s.K; ++k) {
        if (k != i) sup.push_back(L.x(k, i));
      }
      Row r = make_row("a" + tag, sup);
      r.constant = std::log1p(-s.eps[i]);
      r.lin(0) = s.sigma2[i];
      for (std::size_t j = 3; j < sup.size(); ++j) {
        Row::Term t;
        t.kind = Row::Kind::Softplus;
        t.a = RVector::Zero(static_cast<Eigen::Index>(sup.size()));
        t.a(j) = 1.0;
        t.a(1) = 1.0;
        t.a(2) = -1.0;
        r.terms.push_back(std::move(t));
      }
      prog.rows.push_back(std::move(r));
    }
    // [b] linearized interference caps on the links arriving at receiver i.
    for (int k = 0; k < s.K; ++k) {
      if (k == i) continue;
      std::vector<int> sup = block_support(L, k);
      sup.push_back(L.x(k, i));
      Row r = make_row("b[" + std::to_string(k) + "," + std::to_string(i) + "]", sup);
      const double xb = a.x_bar[k][i];
      const double ex = std::exp(xb);
      r.lin.head(nb) = hparam::trace_gradient(s.cov(k, i));
      r.lin(nb) = -ex;
      r.constant = ex * (xb - 1.0);
      prog.rows.push_back(std::move(r));
    }
    // [c] received signal power.
    {
      std::vector<int> sup = block_support(L, i);
      sup.push_back(L.x(i, i));
      Row r = make_row("c" + tag, sup);
      r.lin.head(nb) = -hparam::trace_gradient(s.cov(i, i));
      Row::Term t;
      t.kind = Row::Kind::Exp;
      t.a = RVector::Zero(nb + 1);
      t.a(nb) = 1.0;
      r.terms.push_back(std::move(t));
      prog.rows.push_back(std::move(r));
    }
    // [d] condensed rate constraint.
    {
      Row r = make_row("d" + tag, {L.R(i), L.y(i)});
      r.constant = log_big_theta(a, i);
      r.lin(0) = std::log(2.0);
      r.lin(1) = -a.theta1[i];
      prog.rows.push_back(std::move(r));
    }
    // [e] e^{y - x_ii} <= z.
    {
      Row r = make_row("e" + tag, {L.y(i), L.x(i, i), L.z(i)});
      r.lin(2) = -1.0;
      Row::Term t;
      t.kind = Row::Kind::Exp;
      t.a = RVector::Zero(3);
      t.a(0) = 1.0;
      t.a(1) = -1.0;
      r.terms.push_back(std::move(t));
      prog.rows.push_back(std::move(r));
    }
    // [f] power budget.
    {
      Row r = make_row("f" + tag, block_support(L, i));
      r.lin = trace_identity;
      r.constant = -s.P[i];
      prog.rows.push_back(std::move(r));
    }
    // [r] R_i >= 0.
    {
      Row r = make_row("r" + tag, {L.R(i)});
      r.lin(0) = -1.0;
      prog.rows.push_back(std::move(r));
    }
  }
  return m;
}

namespace {

constexpr double kRelMargin = 1e-6;

// Tries one interior start with identity weight gamma. Returns false if some
// user cannot be made strictly feasible in 200 backoffs.
bool try_interior(const SubproblemModel& m, const Scenario& s, const Beamformers& w_bar,
                  double gamma, InteriorStart& out) {
  const VariableLayout& L = m.layout;
  const Anchor& a = m.anchor;
  RVector v = RVector::Zero(L.size());
  std::vector<HermitianMatrix> W0(s.K);
  for (int i = 0; i < s.K; ++i) {
    const CMatrix w0 = (1.0 - gamma) * (w_bar[i] * w_bar[i].adjoint()) +
                       CMatrix::Identity(s.Nt, s.Nt) * (gamma * s.P[i] / (2.0 * s.Nt));
    W0[i] = HermitianMatrix(w0, 1e-9);
    hparam::pack(W0[i].matrix(), v.segment(L.block(i), s.Nt * s.Nt));
  }
  for (int i = 0; i < s.K; ++i) {
    const double sig = trace_product(W0[i], s.cov(i, i));
    if (!(sig > 0.0)) return false;
    v(L.x(i, i)) = std::log(sig) - kRelMargin;
    for (int k = 0; k < s.K; ++k) {
      if (k == i) continue;
      const double tr = trace_product(W0[k], s.cov(k, i));
      const double ex = std::exp(a.x_bar[k][i]);
      // Smallest x with e^{xb}(x - xb + 1) >= tr, plus a relative margin.
      v(L.x(k, i)) = a.x_bar[k][i] - 1.0 + tr * (1.0 + kRelMargin) / ex + kRelMargin;
    }
  }
  const double ln2 = std::log(2.0);
  int worst = 0;
  for (int i = 0; i < s.K; ++i) {
    const double log_theta = std::log(a.big_theta[i]);
    bool ok = false;
    for (int b = 0; b <= 200; ++b) {
      const double y = a.y_bar[i] + b * std::log(0.9);
      const double z = std::exp(y - v(L.x(i, i))) * (1.0 + kRelMargin);
      const double r_cap = (a.theta1[i] * y - log_theta) / ln2;
      if (!(r_cap > 0.0)) break;
      v(L.y(i)) = y;
      v(L.z(i)) = z;
      v(L.R(i)) = r_cap * (1.0 - kRelMargin);
      double ga = std::log1p(-s.eps[i]) + s.sigma2[i] * z;
      for (int k = 0; k < s.K; ++k) {
        if (k != i) ga += barrier::softplus(v(L.x(k, i)) + y - v(L.x(i, i)));
      }
      if (ga < -1e-10) {
        ok = true;
        worst = std::max(worst, b);
        break;
      }
    }
    if (!ok) return false;
  }
  if (!m.program.strictly_feasible(v)) return false;
  out.v = std::move(v);
  out.backoffs = worst;
  out.gamma = gamma;
  return true;
}

}  // namespace

InteriorStart strict_interior_point(const SubproblemModel& m, const Scenario& s,
                                    const Beamformers& w_bar) {
  if (static_cast<int>(w_bar.size()) != s.K) {
    throw InvalidInput("strict_interior_point: need K beamformers");
  }
  for (int i = 0; i < s.K; ++i) {
    if (!(w_bar[i].squaredNorm() > 0.0)) {
      throw NumericalFailure("strict_interior_point: zero beamformer for user " + std::to_string(i));
    }
  }
  // The identity component adds gamma * P / (2 Nt) * tr(Q_ki) of interference; when the
  // anchor interference is (near) zero that can exceed the linearized cap, so smaller
  // identity weights are tried before giving up.
  InteriorStart out;
  for (double gamma : {1e-3, 1e-5, 1e-7, 1e-9, 1e-11}) {
    if (try_interior(m, s, w_bar, gamma, out)) return out;
  }
  throw NumericalFailure("strict_interior_point: could not reach strict feasibility");
}

SubproblemSolution solve_subproblem(const SubproblemModel& m, const Scenario& s,
                                    const RVector& start, const barrier::Options& opt) {
  const barrier::Result r = barrier::solve(m.program, start, opt);
  const VariableLayout& L = m.layout;
  SubproblemSolution sol;
  sol.v = r.v;
  sol.t = r.t;
  sol.status = r.status;
  sol.iterations = r.newton_steps;
  sol.kkt_residual = r.kkt_residual;
  sol.max_row_value = r.max_row_value;
  sol.W.resize(s.K);
  sol.R.resize(s.K);
  sol.y.resize(s.K);
  sol.z.resize(s.K);
  sol.x.assign(s.K, std::vector<double>(s.K));
  for (int i = 0; i < s.K; ++i) {
    sol.W[i] = HermitianMatrix(hparam::unpack(r.v.segment(L.block(i), s.Nt * s.Nt), s.Nt));
    sol.R[i] = r.v(L.R(i));
    sol.y[i] = r.v(L.y(i));
    sol.z[i] = r.v(L.z(i));
    for (int k = 0; k < s.K; ++k) sol.x[k][i] = r.v(L.x(k, i));
    sol.objective += s.alpha[i] * sol.R[i];
  }
  return sol;
}

double subproblem_kkt_residual(const SubproblemModel& m, const RVector& v, double t) {
  return barrier::kkt_residual(m.program, v, t);
}

}  // namespace ocbf
