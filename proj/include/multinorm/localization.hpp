#pragma once

#include "multinorm/module.hpp"

#include <stdexcept>
#include <vector>

namespace multinorm {

/// Localization of a free module at a pure state tau = (block j, xi):
/// H_tau = C^{p*k_j}, quotient map x -> stacked (x_i^{(j)} xi).
/// The quotient is surjective and already complete, so no closure step.
struct Localization {
  ModuleSpace source;
  PureState state;
  int dim = 0;

  Vec quotient_map(const ModuleVector& x) const {
    if (x.space() != source)
      throw std::invalid_argument("Localization: space mismatch");
    return x.block_stack(state.block) * state.vector;
  }
};

inline Localization localize(const ModuleSpace& space, const PureState& tau) {
  if (tau.shape != space.shape)
    throw std::invalid_argument("localize: shape mismatch");
  Localization loc;
  loc.source = space;
  loc.state = tau;
  loc.dim = space.rank * space.shape.block_size(tau.block);
  return loc;
}

/// phi_tau(T): the matrix on H_tau with phi_tau(T) q(x) = q(Tx).  For the
/// free-module quotient this is exactly the flattened block of T at
/// tau.block, independent of xi.
inline Mat phi_tau(const Localization& loc, const OperatorOnModule& t) {
  if (t.space() != loc.source)
    throw std::invalid_argument("phi_tau: space mismatch");
  return t.block(loc.state.block);
}

inline std::vector<Vec> localize_tuple(const Localization& loc,
                                       const ModuleTuple& tuple) {
  if (tuple.space != loc.source)
    throw std::invalid_argument("localize_tuple: space mismatch");
  std::vector<Vec> out;
  out.reserve(tuple.entries.size());
  for (const auto& x : tuple.entries) out.push_back(loc.quotient_map(x));
  return out;
}

}  // namespace multinorm
