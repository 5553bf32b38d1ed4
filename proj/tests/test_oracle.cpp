#include <doctest.h>

#include <cmath>

#include "ocbf/errors.hpp"
#include "ocbf/oracle.hpp"
#include "test_util.hpp"

using namespace ocbf;

namespace {

Scenario seeded(int K, int Nt, double eta, double snr_db, std::uint64_t seed) {
  ScenarioParams p;
  p.K = K;
  p.Nt = Nt;
  p.eta = eta;
  p.snr_db = snr_db;
  p.seed = seed;
  return generate_scenario(p);
}

OracleConfig with_M(int M) {
  OracleConfig c;
  c.M = M;
  return c;
}

// Randomized maximization of w^H Qo w over |w|^2 <= P, w^H Qc w <= cap:
// uniform draws, then random perturbations of the incumbent with a shrinking
// step. Every candidate is made feasible by rescaling.
double random_search(const HermitianMatrix& qo, const HermitianMatrix& qc, double P, double cap,
                     Rng& rng, int draws) {
  const auto feasible = [&](CVector w) {
    w *= std::sqrt(P) / w.norm();
    const double c = quadratic_form(qc, w);
    if (c > cap) w *= std::sqrt(cap / c);
    return w;
  };
  const int uniform = draws / 100;
  CVector best_w;
  double best = -1.0;
  for (int t = 0; t < draws; ++t) {
    CVector w;
    if (t < uniform) {
      w = feasible(ocbf::test::random_vector(qo.dim(), rng));
    } else {
      const double frac = static_cast<double>(t - uniform) / (draws - uniform);
      const double step = 0.3 * std::pow(1e-4, frac);
      w = feasible(best_w + step * std::sqrt(P) * ocbf::test::random_vector(qo.dim(), rng));
    }
    const double v = quadratic_form(qo, w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("geometric levels") {
  const std::vector<double> l3 = geometric_levels(1.0, with_M(3));
  REQUIRE(l3.size() == 4);
  CHECK(l3[0] == 0.0);
  CHECK(l3[1] == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(l3[2] == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(l3[3] == 1.0);
  CHECK(geometric_levels(0.5, with_M(10)).size() == 11);
  CHECK(geometric_levels(0.0, with_M(10)) == std::vector<double>{0.0});
  OracleConfig nz = with_M(4);
  nz.include_zero = false;
  CHECK(geometric_levels(1.0, nz).size() == 4);
  CHECK_THROWS_AS(geometric_levels(1.0, with_M(1)), InvalidInput);
}

TEST_CASE("interference grid needs two users") {
  CHECK_THROWS_AS(interference_grid(seeded(3, 2, 0.5, 10.0, 1), {}), InvalidInput);
  const auto g = interference_grid(seeded(2, 2, 0.5, 10.0, 1), with_M(5));
  CHECK(g[0].back() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1].back() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("max_signal_power") {
  SUBCASE("an inactive cap gives MRT") {
    Rng rng(2);
    const HermitianMatrix qo = ocbf::test::random_psd(3, 3, rng);
    const HermitianMatrix qc = ocbf::test::random_psd(3, 3, rng);
    const SignalMax sm = max_signal_power(qo, qc, 2.0, 2.0 * lambda_max(qc));
    CHECK(sm.s_max == doctest::Approx(2.0 * lambda_max(qo)).epsilon(1e-10));
  }
  SUBCASE("zero cap against e1 e1^H confines the beam to e2") {
    const double d[] = {2.0, 1.0};
    CVector e1 = CVector::Zero(2);
    e1(0) = 1.0;
    const SignalMax sm = max_signal_power(HermitianMatrix::diagonal(d), HermitianMatrix::outer(e1), 1.0, 0.0);
    CHECK(sm.s_max == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(sm.w(0)) < 1e-12);
    CHECK(std::abs(sm.w(1)) == doctest::Approx(1.0));
  }
  SUBCASE("interior caps: feasible and within 0.5% of a 1e6-point random search") {
    Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
      const HermitianMatrix qo = ocbf::test::random_psd(4, 4, rng);
      const HermitianMatrix qc = ocbf::test::random_psd(4, 4, rng);
      const double cap = 0.3 * lambda_max(qc);
      const SignalMax sm = max_signal_power(qo, qc, 1.0, cap);
      CHECK(sm.w.squaredNorm() <= 1.0 + 1e-8);
      CHECK(quadratic_form(qc, sm.w) <= cap * (1.0 + 1e-8) + 1e-12);
      CHECK(sm.s_max == doctest::Approx(sm.sdp_value).epsilon(1e-6));
      const double sampled = random_search(qo, qc, 1.0, cap, rng, 1000000);
      // The solver stops at a relative duality gap near 1e-8.
      CHECK(sampled <= sm.s_max * (1.0 + 1e-6));
      CHECK(sampled >= 0.995 * sm.s_max);
    }
  }
  SUBCASE("invalid arguments") {
    const HermitianMatrix q = HermitianMatrix::identity(2);
    CHECK_THROWS_AS(max_signal_power(q, HermitianMatrix::identity(3), 1.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(max_signal_power(q, q, 0.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(max_signal_power(q, q, 1.0, -0.1), InvalidInput);
  }
}

TEST_CASE("exhaustive search without cross links gives single-user rates") {
  Scenario s = seeded(2, 3, 0.5, 10.0, 4);
  s.Q[0][1] = HermitianMatrix::zero(3);
  s.Q[1][0] = HermitianMatrix::zero(3);
  const OracleResult r = exhaustive_search(s, with_M(5));
  CHECK(r.evaluated == 1);
  for (int i = 0; i < 2; ++i) {
    const LinkPowers single{s.P[i] * lambda_max(s.cov(i, i)), {}, s.sigma2[i]};
    CHECK(r.best_rates[i] == doctest::Approx(epsilon_rate(single, s.eps[i])).epsilon(1e-9));
  }
}

TEST_CASE("exhaustive search at very low SNR is close to zero") {
  Scenario s = seeded(2, 2, 0.5, -60.0, 5);
  const OracleResult r = exhaustive_search(s, with_M(3));
  CHECK(r.best_sum < 1e-4);
  CHECK(r.best_sum >= 0.0);
}

TEST_CASE("exhaustive search counts and achievability") {
  const Scenario s = seeded(2, 4, 0.5, 10.0, 6);
  const int M = 6;
  const OracleResult r = exhaustive_search(s, with_M(M));
  CHECK(r.evaluated == (M + 1) * (M + 1));
  const double cap0 = r.grid[0][r.best_index[0]];
  const double cap1 = r.grid[1][r.best_index[1]];
  CHECK(quadratic_form(s.cov(0, 1), r.best_w[0]) <= cap0 + 1e-8);
  CHECK(quadratic_form(s.cov(1, 0), r.best_w[1]) <= cap1 + 1e-8);
  // The beams realize interference no larger than the caps, so the oracle
  // rates stay within the outage budget when evaluated exactly.
  for (int i = 0; i < 2; ++i) {
    CHECK(outage_probability(link_powers(s, r.best_w, i), r.best_rates[i]) <= s.eps[i] + 1e-8);
  }
  CHECK(r.best_sum == doctest::Approx(r.best_rates[0] + r.best_rates[1]));
}

TEST_CASE("refining a nested grid never lowers the oracle value") {
  // M = k and M = 2k - 1 share every level of the coarser grid exactly.
  for (std::uint64_t seed = 7; seed < 10; ++seed) {
    const Scenario s = seeded(2, 3, 0.7, 10.0, seed);
    const OracleResult coarse = exhaustive_search(s, with_M(4));
    const OracleResult fine = exhaustive_search(s, with_M(7));
    for (double level : coarse.grid[0]) {
      CHECK(std::find(fine.grid[0].begin(), fine.grid[0].end(), level) != fine.grid[0].end());
    }
    CHECK(fine.best_sum >= coarse.best_sum - 1e-9);
  }
}
