#pragma once

#include <map>
#include <string>

#include "ocbf/outage.hpp"

namespace ocbf {

enum class Method { MRT, ZF, TDMA, SCA, ORACLE };

const char* method_name(Method m);
/// Case-insensitive; throws InvalidInput for unknown labels.
Method parse_method(const std::string& label);

struct BeamformerSolution {
  Beamformers w;
  RateTuple rates;
  Method method = Method::MRT;
  /// Method-specific diagnostics (time-share convention, iteration counts, ...).
  std::map<std::string, std::string> meta;

  double weighted_sum(const Scenario& s) const;
};

/// rates[i] = epsilon_rate of the quadratic forms induced by w.
RateTuple evaluate_rates(const Scenario& s, const Beamformers& w);

/// w_i = sqrt(P_i) * principal eigenvector of Q_ii.
BeamformerSolution mrt(const Scenario& s);

/// Statistical zero forcing: w_i confined to the joint null space of
/// {Q_ij : j != i}. Throws InfeasibleStrategy naming the first user whose
/// null space is empty.
BeamformerSolution zf(const Scenario& s);

/// Equal 1/K time shares, each user alone at full power on its MRT beam.
BeamformerSolution tdma(const Scenario& s);

}  // namespace ocbf
