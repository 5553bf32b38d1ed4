#include "ocbf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ocbf/errors.hpp"
#include "ocbf/json_io.hpp"

namespace ocbf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_count(const std::vector<double>& v, int K, const char* name) {
  if (static_cast<int>(v.size()) != K) {
    throw InvalidInput(std::string("scenario: '") + name + "' must have K entries");
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

void validate(const Scenario& s, bool check_normalization) {
  if (s.K < 1) throw InvalidInput("scenario: K must be >= 1");
  if (s.Nt < 1) throw InvalidInput("scenario: Nt must be >= 1");
  require_count(s.sigma2, s.K, "sigma2");
  require_count(s.P, s.K, "P");
  require_count(s.eps, s.K, "eps");
  require_count(s.alpha, s.K, "alpha");
  if (static_cast<int>(s.Q.size()) != s.K) throw InvalidInput("scenario: Q must be K x K");
  bool any_weight = false;
  for (int i = 0; i < s.K; ++i) {
    if (!(s.sigma2[i] > 0.0)) throw InvalidInput("scenario: sigma2 must be > 0");
    if (!(s.P[i] > 0.0)) throw InvalidInput("scenario: P must be > 0");
    if (!(s.eps[i] > 0.0 && s.eps[i] <= 1.0)) throw InvalidInput("scenario: eps must be in (0,1]");
    if (!(s.alpha[i] >= 0.0)) throw InvalidInput("scenario: alpha must be >= 0");
    any_weight = any_weight || s.alpha[i] > 0.0;
  }
  if (!any_weight) throw InvalidInput("scenario: at least one alpha must be positive");
  if (s.K > 1 && !(s.eta > 0.0 && s.eta <= 1.0)) throw InvalidInput("scenario: eta must be in (0,1]");
  for (int k = 0; k < s.K; ++k) {
    if (static_cast<int>(s.Q[k].size()) != s.K) throw InvalidInput("scenario: Q must be K x K");
    for (int i = 0; i < s.K; ++i) {
      const HermitianMatrix& q = s.Q[k][i];
      if (q.dim() != s.Nt) throw InvalidInput("scenario: covariance dimension must be Nt");
      const EigenPairs ep = eig_hermitian(q);
      const double top = ep.values(0);
      if (ep.values(s.Nt - 1) < -1e-10 * std::abs(top)) {
        throw InvalidInput("scenario: Q[" + std::to_string(k) + "][" + std::to_string(i) +
                           "] is not positive semidefinite");
      }
      if (check_normalization) {
        const double want = (k == i) ? 1.0 : s.eta;
        if (std::abs(top - want) > 1e-9) {
          throw InvalidInput("scenario: lambda_max(Q[" + std::to_string(k) + "][" +
                             std::to_string(i) + "]) = " + std::to_string(top) +
                             ", expected " + std::to_string(want));
        }
      }
    }
  }
}

Scenario generate_scenario(const ScenarioParams& p) {
  if (p.K < 1) throw InvalidInput("generate_scenario: K must be >= 1");
  if (p.Nt < 1) throw InvalidInput("generate_scenario: Nt must be >= 1");
  if (!(p.eta > 0.0 && p.eta <= 1.0)) throw InvalidInput("generate_scenario: eta must be in (0,1]");
  if (!(p.eps > 0.0 && p.eps <= 1.0)) throw InvalidInput("generate_scenario: eps must be in (0,1]");

  Scenario s;
  s.K = p.K;
  s.Nt = p.Nt;
  s.eta = p.eta;
  s.seed = p.seed;
  s.sigma2.assign(p.K, std::pow(10.0, -p.snr_db / 10.0));
  s.P.assign(p.K, 1.0);
  s.eps.assign(p.K, p.eps);
  s.alpha.assign(p.K, 1.0);
  s.Q.assign(p.K, std::vector<HermitianMatrix>(p.K));

  Rng rng(derive_seed(p.seed, {0x5ce7a410ULL}));
  for (int k = 0; k < p.K; ++k) {
    for (int i = 0; i < p.K; ++i) {
      int rank = p.rank < 0 ? p.Nt : p.rank;
      if (!p.link_ranks.empty()) rank = p.link_ranks.at(k).at(i);
      if (rank < 1 || rank > p.Nt) throw InvalidInput("generate_scenario: rank must be in [1, Nt]");
      CMatrix a(p.Nt, rank);
      for (int c = 0; c < rank; ++c) {
        for (int r = 0; r < p.Nt; ++r) a(r, c) = complex_normal(rng);
      }
      const HermitianMatrix raw(a * a.adjoint(), 1e-9);
      const double target = (k == i) ? 1.0 : p.eta;
      s.Q[k][i] = raw.scaled(target / lambda_max(raw));
    }
  }
  validate(s, true);
  return s;
}

ChannelSampler::ChannelSampler(const Scenario& s) : K_(s.K), Nt_(s.Nt) {
  factors_.assign(K_, std::vector<CMatrix>(K_));
  for (int k = 0; k < K_; ++k) {
    for (int i = 0; i < K_; ++i) factors_[k][i] = sqrt_factor(s.Q[k][i]);
  }
}

ChannelRealization ChannelSampler::sample(Rng& rng) const {
  ChannelRealization out;
  out.h.assign(K_, std::vector<CVector>(K_));
  std::vector<CVector> col;
  // Draw order: receiver-major so that sample_into_receiver reproduces the same
  // per-receiver stream layout.
  for (int i = 0; i < K_; ++i) {
    sample_into_receiver(i, rng, col);
    for (int k = 0; k < K_; ++k) out.h[k][i] = std::move(col[k]);
  }
  return out;
}

void ChannelSampler::sample_into_receiver(int i, Rng& rng, std::vector<CVector>& out) const {
  out.resize(K_);
  for (int k = 0; k < K_; ++k) {
    const CMatrix& f = factors_[k][i];
    CVector g(f.cols());
    for (Eigen::Index j = 0; j < g.size(); ++j) g(j) = complex_normal(rng);
    out[k] = f.cols() > 0 ? CVector(f * g) : CVector(CVector::Zero(Nt_));
  }
}

ChannelRealization sample_channels(const Scenario& s, Rng& rng) {
  return ChannelSampler(s).sample(rng);
}

std::string scenario_to_json(const Scenario& s) {
  using json_io::json;
  json j;
  j["rng"] = kRngName;
  j["K"] = s.K;
  j["Nt"] = s.Nt;
  j["eta"] = s.eta;
  j["sigma2"] = s.sigma2;
  j["P"] = s.P;
  j["eps"] = s.eps;
  j["alpha"] = s.alpha;
  j["seed"] = s.seed;
  json q = json::array();
  for (int k = 0; k < s.K; ++k) {
    json row = json::array();
    for (int i = 0; i < s.K; ++i) row.push_back(json_io::matrix_to_json(s.Q[k][i].matrix()));
    q.push_back(std::move(row));
  }
  j["Q"] = std::move(q);
  return j.dump(1);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("save_scenario: cannot open " + path.string());
  out << scenario_to_json(s) << '\n';
  if (!out) throw InvalidInput("save_scenario: write failed for " + path.string());
}

Scenario scenario_from_json(const std::string& text) {
  using json_io::json;
  using json_io::require;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario: top level must be an object");

  Scenario s;
  const json& k = require(j, "K");
  const json& nt = require(j, "Nt");
  if (!k.is_number_integer()) throw ParseError("field 'K': expected an integer");
  if (!nt.is_number_integer()) throw ParseError("field 'Nt': expected an integer");
  s.K = k.get<int>();
  s.Nt = nt.get<int>();
  s.eta = json_io::number(require(j, "eta"), "eta");
  s.sigma2 = json_io::number_array(require(j, "sigma2"), "sigma2");
  s.P = json_io::number_array(require(j, "P"), "P");
  s.eps = json_io::number_array(require(j, "eps"), "eps");
  s.alpha = json_io::number_array(require(j, "alpha"), "alpha");
  const json& seed = require(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ParseError("field 'seed': expected an unsigned integer");
  }
  s.seed = seed.get<std::uint64_t>();

  const json& q = require(j, "Q");
  if (!q.is_array() || static_cast<int>(q.size()) != s.K) {
    throw ParseError("field 'Q': expected a K x K array of matrices");
  }
  s.Q.assign(s.K, std::vector<HermitianMatrix>(s.K));
  for (int kk = 0; kk < s.K; ++kk) {
    const std::string rw = "Q[" + std::to_string(kk) + "]";
    if (!q[kk].is_array() || static_cast<int>(q[kk].size()) != s.K) {
      throw ParseError("field '" + rw + "': expected K matrices");
    }
    for (int i = 0; i < s.K; ++i) {
      const std::string where = rw + "[" + std::to_string(i) + "]";
      const CMatrix m = json_io::matrix_from_json(q[kk][i], where);
      if (m.rows() != s.Nt) throw ParseError("field '" + where + "': expected Nt x Nt");
      try {
        s.Q[kk][i] = HermitianMatrix(m, 1e-12);
      } catch (const InvalidInput& e) {
        throw InvalidInput("field '" + where + "': " + e.what());
      }
    }
  }
  validate(s, true);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace ocbf
