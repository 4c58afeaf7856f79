#pragma once

#include <cstdint>

#include "andor/interaction.hpp"

namespace andor {

struct SparsifierConfig {
  SparsifyMethod method = SparsifyMethod::primal_dual;
  double bound_ratio = 0.5;  ///< rho in |gamma_T| <= rho * max_T |v(T) - v(empty)|
  int max_iterations = 5000;
  double step_scale = 0.01;  ///< subgradient only: step = step_scale * range / sqrt(k)
  /// primal-dual only: stop once (best objective - dual bound) <= tolerance * max(1, range).
  double tolerance = 1e-7;
  std::uint64_t seed = 0;    ///< subgradient only: random choice of subgradient at |I| = 0
};

/// Finds gamma minimising sum_S |I_and(S)| + |I_or(S)| inside the box and returns
/// decompose(table, gamma*). The returned objective never exceeds the gamma = 0
/// objective; source_meta.trace holds the best-so-far objective per iteration.
InteractionSpectrum sparsify(const MaskedOutputTable& table, const SparsifierConfig& cfg = {});

}  // namespace andor
