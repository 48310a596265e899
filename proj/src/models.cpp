#include "qanalysis/models.hpp"

#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

namespace qa {

namespace {

Operator pauli(char which) {
  Operator p = Operator::Zero(2, 2);
  switch (which) {
    case 'x':
      p(0, 1) = 1.0;
      p(1, 0) = 1.0;
      break;
    case 'y':
      p(0, 1) = -kI;
      p(1, 0) = kI;
      break;
    default:
      p(0, 0) = 1.0;
      p(1, 1) = -1.0;
  }
  return p;
}

}  // namespace

ModelSpec::Kind model_kind_from_name(const std::string& name) {
  if (name == "xx_chain") return ModelSpec::Kind::xx_chain;
  if (name == "xxz_chain") return ModelSpec::Kind::xxz_chain;
  if (name == "custom") return ModelSpec::Kind::custom;
  throw ConfigError("unknown model kind '" + name + "'");
}

std::string model_kind_name(ModelSpec::Kind kind) {
  switch (kind) {
    case ModelSpec::Kind::xx_chain:
      return "xx_chain";
    case ModelSpec::Kind::xxz_chain:
      return "xxz_chain";
    default:
      return "custom";
  }
}

const Operator& Model::observable(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw ConfigError("model has no observable '" + name + "'");
  return it->second;
}

Operator embed(const Operator& local, int site, int sites) {
  Operator out = Operator::Identity(1, 1);
  for (int k = 0; k < sites; ++k) {
    const Operator factor = (k == site) ? local : Operator(Operator::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

Model build_model(const ModelSpec& spec) {
  Model m;
  if (spec.kind == ModelSpec::Kind::custom) {
    if (!spec.custom_h) throw ConfigError("custom model needs a Hamiltonian");
    check_hermitian(*spec.custom_h, "custom Hamiltonian");
    m.h = *spec.custom_h;
    return m;
  }
  if (spec.sites < 1) throw ConfigError("model needs at least one site");
  if (spec.sites > spec.max_sites) {
    std::ostringstream msg;
    msg << "model with " << spec.sites << " sites exceeds the cap of " << spec.max_sites;
    throw DimensionCap(msg.str());
  }
  const int n = spec.sites;
  const int d = spec.dim();
  const double jz = spec.kind == ModelSpec::Kind::xxz_chain ? spec.jz : 0.0;
  std::vector<Operator> sx, sy, sz;
  for (int i = 0; i < n; ++i) {
    sx.push_back(embed(pauli('x'), i, n));
    sy.push_back(embed(pauli('y'), i, n));
    sz.push_back(embed(pauli('z'), i, n));
  }
  m.h = Operator::Zero(d, d);
  Operator total_current = Operator::Zero(d, d);
  for (int i = 0; i + 1 < n; ++i) {
    m.h += 0.5 * spec.jxy * (sx[i] * sx[i + 1] + sy[i] * sy[i + 1]);
    m.h += 0.5 * jz * sz[i] * sz[i + 1];
    // Spin current across bond (i, i+1), from the continuity equation of sz.
    const Operator j = 0.5 * spec.jxy * (sx[i] * sy[i + 1] - sy[i] * sx[i + 1]);
    m.observables["current_" + std::to_string(i)] = j;
    total_current += j;
  }
  Operator sz_total = Operator::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    m.h += spec.field * sz[i];
    sz_total += sz[i];
    m.observables["sz_" + std::to_string(i)] = sz[i];
    m.observables["sx_" + std::to_string(i)] = sx[i];
  }
  m.observables["sz_total"] = sz_total;
  m.observables["total_sz"] = 0.5 * sz_total;
  m.observables["current"] = total_current;
  return m;
}

}  // namespace qa
