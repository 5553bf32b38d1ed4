#include "ocbf/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ocbf/errors.hpp"

namespace ocbf {

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw InvalidInput("HermitianMatrix: matrix is not square");
  }
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (m.size() > 0 && !(dev <= tol)) {
    throw InvalidInput("HermitianMatrix: conjugate symmetry violated by " + std::to_string(dev));
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int dim) { return {CMatrix::Zero(dim, dim), Unchecked{}}; }

HermitianMatrix HermitianMatrix::identity(int dim) {
  return {CMatrix::Identity(dim, dim), Unchecked{}};
}

HermitianMatrix HermitianMatrix::outer(const CVector& w) {
  return {w * w.adjoint(), Unchecked{}};
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t j = 0; j < d.size(); ++j) m(j, j) = d[j];
  return {std::move(m), Unchecked{}};
}

HermitianMatrix HermitianMatrix::scaled(double a) const { return {a * m_, Unchecked{}}; }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw InvalidInput("HermitianMatrix: dimension mismatch in sum");
  return {m_ + o.m_, Unchecked{}};
}

EigenPairs eig_hermitian(const HermitianMatrix& h) {
  const int n = h.dim();
  EigenPairs out{RVector(n), CMatrix(n, n)};
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericalFailure("eig_hermitian: no convergence");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  for (int j = 0; j < n; ++j) {
    out.values(j) = es.eigenvalues()(order[j]);
    out.vectors.col(j) = es.eigenvectors().col(order[j]);
  }
  return out;
}

double lambda_max(const HermitianMatrix& h) {
  if (h.dim() == 0) return 0.0;
  return eig_hermitian(h).values(0);
}

void normalize_phase(CVector& v) {
  if (v.size() == 0) return;
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > 1e-10 * scale) {
      v *= std::conj(v(j)) / std::abs(v(j));
      v(j) = std::abs(v(j));
      return;
    }
  }
}

CVector principal_eigenvector(const HermitianMatrix& h) {
  CVector u = eig_hermitian(h).vectors.col(0);
  normalize_phase(u);
  return u;
}

CMatrix sqrt_factor(const HermitianMatrix& q) {
  const int n = q.dim();
  if (n == 0) return CMatrix(0, 0);
  const EigenPairs ep = eig_hermitian(q);
  const double top = std::max(ep.values(0), 0.0);
  if (ep.values(n - 1) < -1e-8 * top || (top == 0.0 && ep.values(n - 1) < 0.0)) {
    throw InvalidInput("sqrt_factor: matrix is not positive semidefinite");
  }
  int rank = 0;
  while (rank < n && ep.values(rank) > 1e-10 * top && ep.values(rank) > 0.0) ++rank;
  CMatrix f(n, rank);
  for (int j = 0; j < rank; ++j) {
    CVector u = ep.vectors.col(j);
    normalize_phase(u);
    f.col(j) = std::sqrt(ep.values(j)) * u;
  }
  return f;
}

double trace_product(const HermitianMatrix& w, const HermitianMatrix& q) {
  if (w.dim() != q.dim()) throw InvalidInput("trace_product: dimension mismatch");
  // tr(WQ) = sum_jk W_jk Q_kj
  return (w.matrix().array() * q.matrix().transpose().array()).sum().real();
}

double quadratic_form(const HermitianMatrix& q, const CVector& w) {
  if (q.dim() != w.size()) throw InvalidInput("quadratic_form: dimension mismatch");
  return w.dot(q.matrix() * w).real();
}

CMatrix joint_nullspace(std::span<const HermitianMatrix> qs, int dim) {
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const auto& q : qs) {
    if (q.dim() != dim) throw InvalidInput("joint_nullspace: dimension mismatch");
    sum += q.matrix();
  }
  const EigenPairs ep = eig_hermitian(HermitianMatrix(sum, 1e-9));
  const double top = dim > 0 ? std::max(ep.values(0), 0.0) : 0.0;
  std::vector<int> keep;
  for (int j = 0; j < dim; ++j) {
    if (top == 0.0 || ep.values(j) <= 1e-9 * top) keep.push_back(j);
  }
  CMatrix basis(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) basis.col(c) = ep.vectors.col(keep[c]);
  return basis;
}

namespace hparam {
namespace {

// Basis matrix E_p as at most two (row, col, coefficient) entries.
struct Term {
  int a;
  int b;
  Complex c;
};

struct BasisElem {
  Term t[2];
  int count;
};

std::vector<BasisElem> basis(int n) {
  std::vector<BasisElem> out;
  out.reserve(n * n);
  for (int j = 0; j < n; ++j) out.push_back({{{j, j, 1.0}, {}}, 1});
  const Complex i1(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      out.push_back({{{j, k, 1.0}, {k, j, 1.0}}, 2});
      out.push_back({{{j, k, i1}, {k, j, -i1}}, 2});
    }
  }
  return out;
}

const std::vector<BasisElem>& cached_basis(int n) {
  static thread_local std::vector<std::vector<BasisElem>> cache;
  if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
  if (cache[n].empty() && n > 0) cache[n] = basis(n);
  return cache[n];
}

}  // namespace

void pack(const CMatrix& m, Eigen::Ref<RVector> out) {
  const int n = static_cast<int>(m.rows());
  int p = 0;
  for (int j = 0; j < n; ++j) out(p++) = m(j, j).real();
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      out(p++) = m(j, k).real();
      out(p++) = m(j, k).imag();
    }
  }
}

CMatrix unpack(const Eigen::Ref<const RVector>& p, int n) {
  CMatrix m(n, n);
  int idx = 0;
  for (int j = 0; j < n; ++j) m(j, j) = p(idx++);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const Complex v(p(idx), p(idx + 1));
      idx += 2;
      m(j, k) = v;
      m(k, j) = std::conj(v);
    }
  }
  return m;
}

RVector trace_gradient(const HermitianMatrix& q) {
  const int n = q.dim();
  const auto& bs = cached_basis(n);
  RVector g(n * n);
  for (int p = 0; p < n * n; ++p) {
    Complex acc = 0.0;
    for (int t = 0; t < bs[p].count; ++t) acc += bs[p].t[t].c * q(bs[p].t[t].b, bs[p].t[t].a);
    g(p) = acc.real();
  }
  return g;
}

bool neg_log_det(const Eigen::Ref<const RVector>& p, int n, double& value, RVector* grad,
                 RMatrix* hess) {
  const CMatrix w = unpack(p, n);
  Eigen::LLT<CMatrix> llt(w);
  if (llt.info() != Eigen::Success) return false;
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = llt.matrixLLT()(j, j).real();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    logdet += 2.0 * std::log(d);
  }
  value = -logdet;
  if (!grad && !hess) return true;

  const CMatrix s = llt.solve(CMatrix::Identity(n, n));
  const auto& bs = cached_basis(n);
  const int m = n * n;
  if (grad) {
    grad->resize(m);
    for (int q = 0; q < m; ++q) {
      Complex acc = 0.0;
      for (int t = 0; t < bs[q].count; ++t) acc += bs[q].t[t].c * s(bs[q].t[t].b, bs[q].t[t].a);
      (*grad)(q) = -acc.real();
    }
  }
  if (hess) {
    hess->resize(m, m);
    // d^2/dp dq (-log det W) = tr(S E_p S E_q); tr(S e_a e_b^T S e_c e_d^T) = S_bc S_da.
    for (int pi = 0; pi < m; ++pi) {
      for (int qi = pi; qi < m; ++qi) {
        Complex acc = 0.0;
        for (int t1 = 0; t1 < bs[pi].count; ++t1) {
          const Term& x = bs[pi].t[t1];
          for (int t2 = 0; t2 < bs[qi].count; ++t2) {
            const Term& y = bs[qi].t[t2];
            acc += x.c * y.c * s(x.b, y.a) * s(y.b, x.a);
          }
        }
        (*hess)(pi, qi) = acc.real();
        (*hess)(qi, pi) = acc.real();
      }
    }
  }
  return true;
}

}  // namespace hparam
}  // namespace ocbf
