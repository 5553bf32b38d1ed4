#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ocbf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Dense complex Hermitian matrix. Construction checks conjugate symmetry
/// and stores the exactly symmetrized average.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m, double tol = 1e-12);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix outer(const CVector& w);
  static HermitianMatrix diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  HermitianMatrix scaled(double a) const;
  HermitianMatrix operator+(const HermitianMatrix& o) const;

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  struct Unchecked {};
  HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

struct EigenPairs {
  RVector values;   // descending
  CMatrix vectors;  // orthonormal columns matching `values`
};

/// Full eigendecomposition, eigenvalues sorted descending (exact ties keep index order).
EigenPairs eig_hermitian(const HermitianMatrix& h);

double lambda_max(const HermitianMatrix& h);

/// Unit principal eigenvector with the first nonzero entry made real positive.
CVector principal_eigenvector(const HermitianMatrix& h);

void normalize_phase(CVector& v);

/// F (dim x r) with F F^H = Q, r the numerical rank at 1e-10 * lambda_max.
/// Throws InvalidInput when an eigenvalue is below -1e-8 * lambda_max.
CMatrix sqrt_factor(const HermitianMatrix& q);

/// Re(tr(W Q)).
double trace_product(const HermitianMatrix& w, const HermitianMatrix& q);

/// w^H Q w (real part).
double quadratic_form(const HermitianMatrix& q, const CVector& w);

/// Orthonormal basis (columns) of the common null space of PSD matrices,
/// computed as the null space of their sum at 1e-9 * lambda_max(sum).
CMatrix joint_nullspace(std::span<const HermitianMatrix> qs, int dim);

/// Real parametrization of an n x n Hermitian matrix in n^2 reals: the n
/// diagonal entries followed by (re, im) of each upper-triangle entry
/// (j < k, row-major).
namespace hparam {

inline int size(int n) { return n * n; }

void pack(const CMatrix& m, Eigen::Ref<RVector> out);
CMatrix unpack(const Eigen::Ref<const RVector>& p, int n);

/// Gradient of p -> tr(W(p) Q).
RVector trace_gradient(const HermitianMatrix& q);

/// -log det W(p). Returns false if W(p) is not positive definite.
/// Fills value, gradient and (optionally) Hessian with respect to p.
bool neg_log_det(const Eigen::Ref<const RVector>& p, int n, double& value, RVector* grad,
                 RMatrix* hess);

}  // namespace hparam

}  // namespace ocbf
