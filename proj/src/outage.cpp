#include "ocbf/outage.hpp"

#include <cmath>
#include <limits>

#include "ocbf/errors.hpp"

namespace ocbf {

LinkPowers link_powers(const Scenario& s, const Beamformers& w, int i) {
  if (static_cast<int>(w.size()) != s.K) throw InvalidInput("link_powers: need K beamformers");
  LinkPowers lp;
  lp.sigma2 = s.sigma2[i];
  lp.signal = std::max(0.0, quadratic_form(s.cov(i, i), w[i]));
  for (int k = 0; k < s.K; ++k) {
    if (k == i) continue;
    lp.interference.push_back(std::max(0.0, quadratic_form(s.cov(k, i), w[k])));
  }
  return lp;
}

double instantaneous_rate(const ChannelRealization& h, const Beamformers& w, int i, double sigma2) {
  const int K = static_cast<int>(w.size());
  const double signal = std::norm(h.h[i][i].dot(w[i]));
  double interference = 0.0;
  for (int k = 0; k < K; ++k) {
    if (k != i) interference += std::norm(h.h[k][i].dot(w[k]));
  }
  return std::log2(1.0 + signal / (interference + sigma2));
}

double outage_probability(const LinkPowers& lp, double rate) {
  if (rate <= 0.0) return 0.0;
  if (lp.signal <= 0.0) return 1.0;
  const double g = std::expm1(rate * std::log(2.0));
  if (!std::isfinite(g)) return 1.0;
  double log_success = -g * lp.sigma2 / lp.signal;
  for (double ik : lp.interference) log_success -= std::log1p(g * ik / lp.signal);
  return std::clamp(-std::expm1(log_success), 0.0, 1.0);
}

double epsilon_rate(const LinkPowers& lp, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidInput("epsilon_rate: outage budget must lie in (0, 1)");
  }
  if (lp.signal <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int grow = 0; grow < 64 && outage_probability(lp, hi) <= eps; ++grow) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (outage_probability(lp, mid) <= eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

OutageEstimate mc_outage(const ChannelSampler& sampler, const Scenario& s, const Beamformers& w,
                         const RateTuple& R, int i, std::int64_t n_samples, Rng& rng) {
  if (n_samples < 1) throw InvalidInput("mc_outage: n_samples must be >= 1");
  if (static_cast<int>(w.size()) != s.K || static_cast<int>(R.size()) != s.K) {
    throw InvalidInput("mc_outage: dimension mismatch");
  }
  // h_ki^H w_k = g^H (F_ki^H w_k) with h_ki = F_ki g; precompute the projections.
  std::vector<CVector> proj(s.K);
  for (int k = 0; k < s.K; ++k) proj[k] = sampler.factor(k, i).adjoint() * w[k];

  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::int64_t outages = 0;
  for (std::int64_t n = 0; n < n_samples; ++n) {
    double signal = 0.0;
    double interference = 0.0;
    for (int k = 0; k < s.K; ++k) {
      Complex acc = 0.0;
      for (Eigen::Index j = 0; j < proj[k].size(); ++j) {
        const double re = nd(rng);
        const double im = nd(rng);
        acc += Complex(re, -im) * proj[k](j);
      }
      if (k == i) {
        signal = std::norm(acc);
      } else {
        interference += std::norm(acc);
      }
    }
    const double rate = std::log2(1.0 + signal / (interference + s.sigma2[i]));
    if (rate < R[i]) ++outages;
  }
  OutageEstimate out;
  out.estimate = static_cast<double>(outages) / static_cast<double>(n_samples);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n_samples));
  return out;
}

OutageEstimate mc_outage(const Scenario& s, const Beamformers& w, const RateTuple& R, int i,
                         std::int64_t n_samples, Rng& rng) {
  return mc_outage(ChannelSampler(s), s, w, R, i, n_samples, rng);
}

}  // namespace ocbf
