#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "ocbf/hermitian.hpp"

namespace ocbf {

/// Pseudo-random generator used throughout. Streams are seeded with
/// derive_seed(), so every trial / sample block owns an independent stream.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64+splitmix64";

/// SplitMix64-based mixing of a master seed with stream identifiers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids);

/// Circularly symmetric standard complex normal (re, im ~ N(0, 1/2)).
Complex complex_normal(Rng& rng);

using Beamformers = std::vector<CVector>;

struct Scenario {
  int K = 0;
  int Nt = 0;
  /// Q[k][i]: covariance of the channel from transmitter k to receiver i.
  std::vector<std::vector<HermitianMatrix>> Q;
  std::vector<double> sigma2;
  std::vector<double> P;
  std::vector<double> eps;
  std::vector<double> alpha;
  double eta = 1.0;
  std::uint64_t seed = 0;

  const HermitianMatrix& cov(int k, int i) const { return Q[k][i]; }
};

/// Throws InvalidInput on any violated invariant. The lambda_max normalization
/// (1 for direct links, eta for cross links) is only checked when requested.
void validate(const Scenario& s, bool check_normalization = true);

struct ScenarioParams {
  int K = 2;
  int Nt = 4;
  double eta = 0.5;
  double snr_db = 10.0;
  double eps = 0.1;
  int rank = -1;  // -1: full rank (Nt)
  /// Optional per-link ranks link_ranks[k][i]; overrides `rank` when non-empty.
  std::vector<std::vector<int>> link_ranks;
  std::uint64_t seed = 0;
};

/// Random covariances Q = A A^H (A: Nt x rank, i.i.d. CN(0,1)), rescaled so that
/// lambda_max is 1 on direct links and eta on cross links. sigma2 = 10^(-snr_db/10),
/// P = alpha = 1. The A draws depend only on (K, Nt, ranks, seed), not on eta.
Scenario generate_scenario(const ScenarioParams& p);

struct ChannelRealization {
  /// h[k][i]: channel vector from transmitter k to receiver i.
  std::vector<std::vector<CVector>> h;
};

/// Precomputes the square-root factors of every covariance for repeated draws.
class ChannelSampler {
 public:
  explicit ChannelSampler(const Scenario& s);

  ChannelRealization sample(Rng& rng) const;
  /// Draws only the K vectors h[k][i] for k = 0..K-1 arriving at receiver i.
  void sample_into_receiver(int i, Rng& rng, std::vector<CVector>& out) const;

  const CMatrix& factor(int k, int i) const { return factors_[k][i]; }
  int users() const { return K_; }

 private:
  int K_;
  int Nt_;
  std::vector<std::vector<CMatrix>> factors_;
};

ChannelRealization sample_channels(const Scenario& s, Rng& rng);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& s);

/// Throws ParseError (with field context) on malformed input and InvalidInput
/// when the loaded scenario violates an invariant.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const std::string& text);

}  // namespace ocbf
