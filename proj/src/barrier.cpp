#include "ocbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "ocbf/errors.hpp"

namespace ocbf::barrier {

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

namespace {

RVector gather(const RVector& v, const std::vector<int>& support) {
  RVector x(support.size());
  for (std::size_t j = 0; j < support.size(); ++j) x(j) = v(support[j]);
  return x;
}

// Barrier value only; returns +inf when v is not strictly feasible.
double barrier_value(const Program& prog, const RVector& v) {
  double phi = 0.0;
  for (const Row& r : prog.rows) {
    const double g = r.value(v);
    if (!(g < 0.0)) return std::numeric_limits<double>::infinity();
    phi -= std::log(-g);
  }
  for (const PsdBlock& b : prog.blocks) {
    double val = 0.0;
    if (!hparam::neg_log_det(v.segment(b.offset, b.dim * b.dim), b.dim, val, nullptr, nullptr)) {
      return std::numeric_limits<double>::infinity();
    }
    phi += val;
  }
  return phi;
}

// Per-block congruence dW = L dU L^H with W = L L^H at v, identity elsewhere. In
// the new coordinates the log-det Hessian of every block is the identity, which
// keeps the Newton system well conditioned when W approaches low rank.
std::vector<RMatrix> block_scaling(const Program& prog, const RVector& v) {
  std::vector<RMatrix> T;
  for (const PsdBlock& b : prog.blocks) {
    const int sz = b.dim * b.dim;
    const CMatrix W = hparam::unpack(v.segment(b.offset, sz), b.dim);
    Eigen::LLT<CMatrix> llt(W);
    if (llt.info() != Eigen::Success) {
      T.push_back(RMatrix::Identity(sz, sz));
      continue;
    }
    const CMatrix L = llt.matrixL();
    RMatrix tb(sz, sz);
    RVector e = RVector::Zero(sz);
    RVector col(sz);
    for (int p = 0; p < sz; ++p) {
      e(p) = 1.0;
      hparam::pack(L * hparam::unpack(e, b.dim) * L.adjoint(), col);
      tb.col(p) = col;
      e(p) = 0.0;
    }
    T.push_back(std::move(tb));
  }
  return T;
}

// Newton direction for H dv = -g using Jacobi scaling and, if needed, a small ridge.
bool newton_direction(const RMatrix& h, const RVector& g, RVector& dv) {
  const Eigen::Index n = h.rows();
  RVector d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double hj = h(j, j);
    d(j) = hj > 0.0 ? 1.0 / std::sqrt(hj) : 1.0;
  }
  RMatrix hs = d.asDiagonal() * h * d.asDiagonal();
  const RVector gs = d.cwiseProduct(g);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (ridge > 0.0) hs.diagonal().array() += ridge;
    Eigen::LLT<RMatrix> llt(hs);
    if (llt.info() == Eigen::Success) {
      dv = -d.cwiseProduct(llt.solve(gs));
      if (dv.allFinite()) return true;
    }
    ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
  }
  return false;
}

bool scaled_newton_direction(const Program& prog, const RVector& v, const RMatrix& h,
                             const RVector& g, RVector& dv) {
  if (prog.blocks.empty()) return newton_direction(h, g, dv);
  const std::vector<RMatrix> T = block_scaling(prog, v);
  RMatrix hs = h;
  RVector gs = g;
  for (std::size_t j = 0; j < T.size(); ++j) {
    const PsdBlock& b = prog.blocks[j];
    const int sz = b.dim * b.dim;
    hs.middleCols(b.offset, sz) = hs.middleCols(b.offset, sz) * T[j];
    hs.middleRows(b.offset, sz) = T[j].transpose() * hs.middleRows(b.offset, sz);
    gs.segment(b.offset, sz) = T[j].transpose() * gs.segment(b.offset, sz);
  }
  RVector du;
  if (!newton_direction(hs, gs, du)) return false;
  dv = du;
  for (std::size_t j = 0; j < T.size(); ++j) {
    const PsdBlock& b = prog.blocks[j];
    const int sz = b.dim * b.dim;
    dv.segment(b.offset, sz) = T[j] * du.segment(b.offset, sz);
  }
  return dv.allFinite();
}

}  // namespace

double Row::value(const RVector& v) const {
  const RVector x = gather(v, support);
  double g = constant + lin.dot(x);
  for (const Term& t : terms) {
    const double u = t.a.dot(x) + t.shift;
    g += t.coef * (t.kind == Kind::Exp ? std::exp(u) : softplus(u));
  }
  return g;
}

void Row::derivatives(const RVector& v, RVector& grad, RMatrix& hess) const {
  const RVector x = gather(v, support);
  grad = lin;
  hess.setZero(support.size(), support.size());
  for (const Term& t : terms) {
    const double u = t.a.dot(x) + t.shift;
    double d1 = 0.0;
    double d2 = 0.0;
    if (t.kind == Kind::Exp) {
      d1 = d2 = std::exp(u);
    } else {
      d1 = sigmoid(u);
      d2 = d1 * (1.0 - d1);
    }
    grad += t.coef * d1 * t.a;
    hess += (t.coef * d2) * t.a * t.a.transpose();
  }
}

int Program::m_total() const {
  int m = static_cast<int>(rows.size());
  for (const PsdBlock& b : blocks) m += b.dim;
  return m;
}

double Program::max_row_value(const RVector& v) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Row& r : rows) worst = std::max(worst, r.value(v));
  return worst;
}

bool Program::strictly_feasible(const RVector& v, double margin) const {
  for (const Row& r : rows) {
    if (!(r.value(v) < -margin)) return false;
  }
  for (const PsdBlock& b : blocks) {
    double val = 0.0;
    if (!hparam::neg_log_det(v.segment(b.offset, b.dim * b.dim), b.dim, val, nullptr, nullptr)) {
      return false;
    }
  }
  return true;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::MaxIter: return "max-iter";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

Merit evaluate(const Program& prog, const RVector& v, double t, bool need_hess) {
  Merit m;
  m.grad = t * prog.c;
  if (need_hess) m.hess.setZero(prog.n, prog.n);
  RVector g;
  RMatrix h;
  for (const Row& r : prog.rows) {
    const double val = r.value(v);
    if (!(val < 0.0)) return m;
    m.barrier -= std::log(-val);
    r.derivatives(v, g, h);
    const double inv = -1.0 / val;  // 1 / slack
    const auto& sup = r.support;
    for (std::size_t a = 0; a < sup.size(); ++a) m.grad(sup[a]) += inv * g(a);
    if (need_hess) {
      for (std::size_t a = 0; a < sup.size(); ++a) {
        const double ga = inv * inv * g(a);
        for (std::size_t b = 0; b < sup.size(); ++b) {
          m.hess(sup[a], sup[b]) += ga * g(b) + inv * h(a, b);
        }
      }
    }
  }
  for (const PsdBlock& b : prog.blocks) {
    double val = 0.0;
    RVector bg;
    RMatrix bh;
    if (!hparam::neg_log_det(v.segment(b.offset, b.dim * b.dim), b.dim, val, &bg,
                             need_hess ? &bh : nullptr)) {
      return m;
    }
    m.barrier += val;
    const int sz = b.dim * b.dim;
    m.grad.segment(b.offset, sz) += bg;
    if (need_hess) m.hess.block(b.offset, b.offset, sz, sz) += bh;
  }
  m.feasible = true;
  return m;
}

double kkt_residual(const Program& prog, const RVector& v, double t) {
  const Merit m = evaluate(prog, v, t, true);
  const double gap = prog.m_total() / t;
  if (!m.feasible) return std::numeric_limits<double>::infinity();
  RVector dv;
  if (!scaled_newton_direction(prog, v, m.hess, m.grad, dv)) return std::numeric_limits<double>::infinity();
  const double lambda = std::sqrt(std::max(0.0, -m.grad.dot(dv)));
  return lambda / t + gap;
}

Result solve(const Program& prog, const RVector& start, const Options& opt) {
  if (start.size() != prog.n) throw InvalidInput("barrier::solve: start has wrong dimension");
  Result res;
  res.v = start;
  if (!prog.strictly_feasible(start)) {
    res.status = Status::NumericalFailure;
    res.objective = prog.c.dot(start);
    res.max_row_value = prog.max_row_value(start);
    return res;
  }

  const double m = prog.m_total();
  RVector v = start;
  double t = opt.t0 > 0.0 ? opt.t0 : m / std::max(1e-3, std::abs(prog.c.dot(v)));
  int stall = 0;
  double centered_gap = std::numeric_limits<double>::infinity();
  double prev_lambda2 = std::numeric_limits<double>::infinity();
  RVector dv;

  for (;;) {
    int steps_here = 0;
    bool stuck = false;
    double lambda2 = 0.0;
    for (;;) {
      const Merit mer = evaluate(prog, v, t, true);
      if (!mer.feasible || !scaled_newton_direction(prog, v, mer.hess, mer.grad, dv)) {
        stuck = true;
        break;
      }
      const double slope = mer.grad.dot(dv);
      lambda2 = -slope;
      if (lambda2 / 2.0 <= opt.newton_tol) break;
      if (res.newton_steps >= opt.max_newton_total) {
        res.status = Status::MaxIter;
        res.v = v;
        res.t = t;
        res.objective = prog.c.dot(v);
        res.max_row_value = prog.max_row_value(v);
        res.kkt_residual = kkt_residual(prog, v, t);
        return res;
      }
      // Barrier objective change computed as t s c^T dv + (phi_new - phi_old) so the
      // large linear term does not swamp the comparison.
      const double cdv = prog.c.dot(dv);
      double s = 1.0;
      bool accepted = false;
      RVector vn;
      while (s > 1e-18) {
        vn = v + s * dv;
        const double phi = barrier_value(prog, vn);
        if (std::isfinite(phi)) {
          const double change = t * s * cdv + (phi - mer.barrier);
          if (change <= opt.armijo * s * slope) {
            accepted = true;
            break;
          }
        }
        s *= opt.shrink;
      }
      if (!accepted) {
        stuck = true;
        break;
      }
      v = vn;
      ++res.newton_steps;
      ++steps_here;
      stall = lambda2 >= prev_lambda2 ? stall + 1 : 0;
      prev_lambda2 = lambda2;
      if (stall >= opt.max_stall || steps_here >= opt.max_centering) {
        stuck = true;
        break;
      }
    }
    ++res.outer_iterations;
    prev_lambda2 = std::numeric_limits<double>::infinity();
    stall = 0;
    if (opt.trace) {
      *opt.trace << t << ", " << steps_here << ", " << prog.c.dot(v) << ", "
                 << prog.max_row_value(v) << '\n';
    }
    // A stuck centering means the precision floor is near. A nearly centered
    // iterate still certifies its gap, so the path continues; otherwise the
    // solve ends with the last certified gap deciding the status.
    if (stuck && lambda2 / 2.0 > opt.centered_tol) {
      res.status = centered_gap <= opt.floor_gap_tol ? Status::Optimal : Status::NumericalFailure;
      break;
    }
    centered_gap = m / t;
    if (centered_gap <= opt.gap_tol) {
      res.status = Status::Optimal;
      break;
    }
    t *= opt.mu;
  }
  res.v = v;
  res.t = t;
  res.objective = prog.c.dot(v);
  res.max_row_value = prog.max_row_value(v);
  res.kkt_residual = kkt_residual(prog, v, t);
  return res;
}

}  // namespace ocbf::barrier
