#pragma once

#include <cstdint>
#include <vector>

#include "ocbf/scenario.hpp"

namespace ocbf {

/// Rates in bits per channel use, one entry per user.
using RateTuple = std::vector<double>;

/// The quadratic forms that fully determine receiver i's outage behaviour.
struct LinkPowers {
  double signal = 0.0;                // w_i^H Q_ii w_i
  std::vector<double> interference;   // w_k^H Q_ki w_k, k != i
  double sigma2 = 1.0;
};

/// Quadratic forms seen by receiver i for beamformers w.
LinkPowers link_powers(const Scenario& s, const Beamformers& w, int i);

/// log2(1 + |h_ii^H w_i|^2 / (sum_{k != i} |h_ki^H w_k|^2 + sigma_i^2)).
double instantaneous_rate(const ChannelRealization& h, const Beamformers& w, int i, double sigma2);

/// Closed-form Pr{rate < R} for independent Rayleigh-faded links, evaluated in
/// the log domain: log(1-p) = -g sigma2 / s - sum_k log1p(g I_k / s), g = 2^R - 1.
double outage_probability(const LinkPowers& lp, double rate);

/// Largest R with outage_probability(lp, R) <= eps (bisection, feasible side).
/// Returns 0 when the signal power is zero; throws InvalidInput for eps outside (0, 1).
double epsilon_rate(const LinkPowers& lp, double eps);

struct OutageEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo outage of receiver i: fraction of n_samples independent channel
/// draws whose instantaneous rate is below R[i].
OutageEstimate mc_outage(const Scenario& s, const Beamformers& w, const RateTuple& R, int i,
                         std::int64_t n_samples, Rng& rng);

/// Same estimator using a prebuilt sampler (avoids refactoring covariances).
OutageEstimate mc_outage(const ChannelSampler& sampler, const Scenario& s, const Beamformers& w,
                         const RateTuple& R, int i, std::int64_t n_samples, Rng& rng);

}  // namespace ocbf
