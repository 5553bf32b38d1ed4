#include <doctest.h>

#include <cmath>

#include "ocbf/errors.hpp"
#include "ocbf/hermitian.hpp"
#include "test_util.hpp"

using namespace ocbf;
using ocbf::test::random_psd;
using ocbf::test::rel_frobenius;

namespace {

const Complex I1(0.0, 1.0);

double naive_trace(const CMatrix& w, const CMatrix& q) {
  Complex acc = 0.0;
  for (int j = 0; j < w.rows(); ++j) {
    for (int k = 0; k < w.cols(); ++k) acc += w(j, k) * q(k, j);
  }
  return acc.real();
}

}  // namespace

TEST_CASE("eig of a diagonal matrix is sorted descending with unit vectors") {
  const double d[] = {1.0, 2.0};
  const EigenPairs ep = eig_hermitian(HermitianMatrix::diagonal(d));
  CHECK(ep.values(0) == doctest::Approx(2.0));
  CHECK(ep.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(ep.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(ep.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig of [[1, i], [-i, 1]] by the characteristic polynomial") {
  CMatrix m(2, 2);
  m << 1.0, I1, -I1, 1.0;
  const EigenPairs ep = eig_hermitian(HermitianMatrix(m));
  CHECK(ep.values(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(ep.values(1)) < 1e-14);
}

TEST_CASE("eig reconstructs random PSD matrices and returns unitary vectors") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix h = random_psd(4, 4, rng);
    const EigenPairs ep = eig_hermitian(h);
    const CMatrix rec = ep.vectors * ep.values.asDiagonal() * ep.vectors.adjoint();
    CHECK(rel_frobenius(rec, h.matrix()) < 1e-9);
    CHECK((ep.vectors.adjoint() * ep.vectors - CMatrix::Identity(4, 4)).norm() < 1e-10);
    for (int j = 0; j + 1 < 4; ++j) CHECK(ep.values(j) >= ep.values(j + 1));
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 1.0;
  CHECK_THROWS_AS(HermitianMatrix{m}, InvalidInput);
  CMatrix c(2, 2);
  c << 1.0, I1, I1, 1.0;
  CHECK_THROWS_AS(HermitianMatrix{c}, InvalidInput);
}

TEST_CASE("sqrt_factor") {
  SUBCASE("identity") {
    const CMatrix f = sqrt_factor(HermitianMatrix::identity(2));
    CHECK((f * f.adjoint() - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("rank one gives a single column along u") {
    CVector u(3);
    u << 1.0, I1, -0.5;
    const CMatrix f = sqrt_factor(HermitianMatrix::outer(u));
    REQUIRE(f.cols() == 1);
    // F = u up to a unit phase.
    const Complex ratio = f(0, 0) / u(0);
    CHECK(std::abs(ratio) == doctest::Approx(1.0));
    CHECK((f.col(0) - ratio * u).norm() < 1e-12);
  }
  SUBCASE("random rank two in dimension eight") {
    Rng rng(3);
    const HermitianMatrix q = random_psd(8, 2, rng);
    const CMatrix f = sqrt_factor(q);
    CHECK(f.cols() == 2);
    CHECK(rel_frobenius(f * f.adjoint(), q.matrix()) < 1e-9);
  }
  SUBCASE("condition number 1e8 round trip") {
    Rng rng(5);
    const EigenPairs base = eig_hermitian(random_psd(6, 6, rng));
    RVector lam(6);
    lam << 1.0, 1e-2, 1e-3, 1e-5, 1e-7, 1e-8;
    const HermitianMatrix q(base.vectors * lam.asDiagonal() * base.vectors.adjoint(), 1e-9);
    const CMatrix f = sqrt_factor(q);
    CHECK(rel_frobenius(f * f.adjoint(), q.matrix()) < 1e-9);
    const EigenPairs ep = eig_hermitian(q);
    CHECK(rel_frobenius(ep.vectors * ep.values.asDiagonal() * ep.vectors.adjoint(), q.matrix()) <
          1e-9);
  }
  SUBCASE("clearly indefinite input is rejected") {
    const double d[] = {1.0, -0.1};
    CHECK_THROWS_AS(sqrt_factor(HermitianMatrix::diagonal(d)), InvalidInput);
  }
}

TEST_CASE("trace_product") {
  const double d[] = {2.0, 1.0};
  CHECK(trace_product(HermitianMatrix::identity(2), HermitianMatrix::diagonal(d)) ==
        doctest::Approx(3.0));

  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianMatrix w = random_psd(5, 3, rng);
    const HermitianMatrix q = random_psd(5, 5, rng);
    const HermitianMatrix q2 = random_psd(5, 2, rng);
    CHECK(std::abs(trace_product(w, q) - naive_trace(w.matrix(), q.matrix())) < 1e-12);
    CHECK(trace_product(w, q) == doctest::Approx(trace_product(q, w)).epsilon(1e-14));
    CHECK(trace_product(w, q + q2.scaled(2.5)) ==
          doctest::Approx(trace_product(w, q) + 2.5 * trace_product(w, q2)).epsilon(1e-13));
    CHECK(trace_product(w, q) >= -1e-12);
    const CVector v = ocbf::test::random_vector(5, rng);
    CHECK(trace_product(HermitianMatrix::outer(v), q) ==
          doctest::Approx(quadratic_form(q, v)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(trace_product(HermitianMatrix::identity(2), HermitianMatrix::identity(3)),
                  InvalidInput);
}

TEST_CASE("joint_nullspace") {
  SUBCASE("e2 e2^H in dimension two leaves e1") {
    CVector e2 = CVector::Zero(2);
    e2(1) = 1.0;
    const HermitianMatrix qs[] = {HermitianMatrix::outer(e2)};
    const CMatrix b = joint_nullspace(qs, 2);
    REQUIRE(b.cols() == 1);
    CHECK(std::abs(b(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(b(1, 0)) < 1e-12);
  }
  SUBCASE("identity leaves nothing") {
    const HermitianMatrix qs[] = {HermitianMatrix::identity(3)};
    CHECK(joint_nullspace(qs, 3).cols() == 0);
  }
  SUBCASE("two random rank-two matrices in dimension eight") {
    Rng rng(23);
    const HermitianMatrix qs[] = {random_psd(8, 2, rng), random_psd(8, 2, rng)};
    const CMatrix b = joint_nullspace(qs, 8);
    REQUIRE(b.cols() == 4);
    CHECK((b.adjoint() * b - CMatrix::Identity(4, 4)).norm() < 1e-10);
    for (int c = 0; c < b.cols(); ++c) {
      for (const HermitianMatrix& q : qs) CHECK(quadratic_form(q, b.col(c)) < 1e-8);
    }
  }
  SUBCASE("empty list gives the full space") {
    CHECK(joint_nullspace({}, 3).cols() == 3);
  }
}

TEST_CASE("normalize_phase makes the first significant entry real positive") {
  CVector v(3);
  v << 1e-14, Complex(0.0, -2.0), 1.0;
  normalize_phase(v);
  CHECK(v(1).real() == doctest::Approx(2.0));
  CHECK(std::abs(v(1).imag()) < 1e-15);
}

TEST_CASE("hparam pack / unpack round trip and trace gradient") {
  Rng rng(29);
  const HermitianMatrix w = random_psd(4, 4, rng);
  RVector p(16);
  hparam::pack(w.matrix(), p);
  CHECK((hparam::unpack(p, 4) - w.matrix()).norm() == 0.0);
  const HermitianMatrix q = random_psd(4, 3, rng);
  CHECK(hparam::trace_gradient(q).dot(p) == doctest::Approx(trace_product(w, q)).epsilon(1e-13));
}

TEST_CASE("neg_log_det derivatives match central differences") {
  Rng rng(31);
  const int n = 3;
  const HermitianMatrix w = random_psd(n, n, rng) + HermitianMatrix::identity(n).scaled(0.3);
  RVector p(n * n);
  hparam::pack(w.matrix(), p);
  double f0 = 0.0;
  RVector g;
  RMatrix h;
  REQUIRE(hparam::neg_log_det(p, n, f0, &g, &h));
  CHECK(f0 == doctest::Approx(-std::log(eig_hermitian(w).values.prod())).epsilon(1e-12));
  const double step = 1e-5;
  for (int a = 0; a < n * n; ++a) {
    RVector pp = p, pm = p;
    pp(a) += step;
    pm(a) -= step;
    double fp = 0.0, fm = 0.0;
    RVector gp, gm;
    REQUIRE(hparam::neg_log_det(pp, n, fp, &gp, nullptr));
    REQUIRE(hparam::neg_log_det(pm, n, fm, &gm, nullptr));
    const double fd = (fp - fm) / (2.0 * step);
    CHECK(std::abs(fd - g(a)) <= 1e-5 * std::max(1.0, std::abs(g(a))));
    const RVector hfd = (gp - gm) / (2.0 * step);
    CHECK((hfd - h.col(a)).norm() <= 1e-5 * std::max(1.0, h.col(a).norm()));
  }
  RVector bad = RVector::Zero(n * n);
  double v = 0.0;
  CHECK_FALSE(hparam::neg_log_det(bad, n, v, nullptr, nullptr));
}
