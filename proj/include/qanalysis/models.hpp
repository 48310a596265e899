#pragma once

// Spin-chain model zoo. Open boundary conditions, Pauli matrices:
//   H = (Jxy/2) sum_i (sx_i sx_{i+1} + sy_i sy_{i+1}) + (Jz/2) sum_i sz_i sz_{i+1}
//       + h sum_i sz_i
// For a single site this is h sz. The two-site XX chain with Jxy = 1 has
// spectrum {-1, 0, 0, 1}.

#include <map>
#include <optional>
#include <string>

#include "qanalysis/operator_core.hpp"

namespace qa {

inline constexpr int kDefaultMaxSites = 8;

struct ModelSpec {
  enum class Kind { xx_chain, xxz_chain, custom };
  Kind kind = Kind::xx_chain;
  int sites = 2;
  double jxy = 1.0;
  double jz = 0.0;     // ignored by xx_chain
  double field = 0.0;
  int max_sites = kDefaultMaxSites;
  std::optional<Operator> custom_h;  // kind == custom

  int dim() const { return 1 << sites; }
};

ModelSpec::Kind model_kind_from_name(const std::string& name);
std::string model_kind_name(ModelSpec::Kind kind);

struct Model {
  Operator h;
  // sz_total = sum_i sz_i (Pauli), total_sz = sz_total / 2, sz_<i>, sx_<i>,
  // current_<i> on bond (i, i+1), current = sum of bond currents.
  std::map<std::string, Operator> observables;

  const Operator& observable(const std::string& name) const;
};

Model build_model(const ModelSpec& spec);

// Single-site operator embedded at `site` of an n-site chain (site 0 is the
// most significant tensor factor).
Operator embed(const Operator& local, int site, int sites);

}  // namespace qa
