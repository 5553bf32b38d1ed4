#include "ocbf/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ocbf/errors.hpp"

namespace ocbf {

const char* method_name(Method m) {
  switch (m) {
    case Method::MRT: return "MRT";
    case Method::ZF: return "ZF";
    case Method::TDMA: return "TDMA";
    case Method::SCA: return "SCA";
    case Method::ORACLE: return "ORACLE";
  }
  return "?";
}

Method parse_method(const std::string& label) {
  std::string up = label;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  for (Method m : {Method::MRT, Method::ZF, Method::TDMA, Method::SCA, Method::ORACLE}) {
    if (up == method_name(m)) return m;
  }
  throw InvalidInput("unknown method '" + label + "'");
}

double BeamformerSolution::weighted_sum(const Scenario& s) const {
  double acc = 0.0;
  for (int i = 0; i < s.K; ++i) acc += s.alpha[i] * rates[i];
  return acc;
}

RateTuple evaluate_rates(const Scenario& s, const Beamformers& w) {
  RateTuple r(s.K, 0.0);
  for (int i = 0; i < s.K; ++i) r[i] = epsilon_rate(link_powers(s, w, i), s.eps[i]);
  return r;
}

BeamformerSolution mrt(const Scenario& s) {
  BeamformerSolution sol;
  sol.method = Method::MRT;
  sol.w.resize(s.K);
  for (int i = 0; i < s.K; ++i) sol.w[i] = std::sqrt(s.P[i]) * principal_eigenvector(s.cov(i, i));
  sol.rates = evaluate_rates(s, sol.w);
  return sol;
}

BeamformerSolution zf(const Scenario& s) {
  BeamformerSolution sol;
  sol.method = Method::ZF;
  sol.w.resize(s.K);
  for (int i = 0; i < s.K; ++i) {
    std::vector<HermitianMatrix> outgoing;
    for (int j = 0; j < s.K; ++j) {
      if (j != i) outgoing.push_back(s.cov(i, j));
    }
    const CMatrix basis = joint_nullspace(outgoing, s.Nt);
    if (basis.cols() == 0) {
      throw InfeasibleStrategy("ZF infeasible: user " + std::to_string(i) +
                               " has an empty joint null space");
    }
    const HermitianMatrix reduced(basis.adjoint() * s.cov(i, i).matrix() * basis, 1e-9);
    CVector w = basis * principal_eigenvector(reduced);
    w.normalize();
    normalize_phase(w);
    sol.w[i] = std::sqrt(s.P[i]) * w;
  }
  sol.rates = evaluate_rates(s, sol.w);
  sol.meta["max_cross_power"] = [&] {
    double worst = 0.0;
    for (int k = 0; k < s.K; ++k) {
      for (int i = 0; i < s.K; ++i) {
        if (k != i) worst = std::max(worst, quadratic_form(s.cov(k, i), sol.w[k]));
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", worst);
    return std::string(buf);
  }();
  return sol;
}

BeamformerSolution tdma(const Scenario& s) {
  BeamformerSolution sol;
  sol.method = Method::TDMA;
  sol.w.resize(s.K);
  sol.rates.resize(s.K);
  const double share = 1.0 / s.K;
  for (int i = 0; i < s.K; ++i) {
    sol.w[i] = std::sqrt(s.P[i]) * principal_eigenvector(s.cov(i, i));
    LinkPowers lp;
    lp.signal = s.P[i] * lambda_max(s.cov(i, i));
    lp.sigma2 = s.sigma2[i];
    sol.rates[i] = share * epsilon_rate(lp, s.eps[i]);
  }
  sol.meta["time_share"] = "equal 1/K slots, per-slot power P_i, no cross-link interference";
  return sol;
}

}  // namespace ocbf
