#pragma once

#include <cstddef>

#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"

namespace adsplit {

struct ReactionSolverConfig {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t max_substeps = 100000;

  void validate() const;
};

/// Y^tau: integrates u' = f(t, x_k, u) independently at every grid point from
/// state.time() over tau (tau < 0 integrates backwards). The result carries
/// time state.time() + tau.
///
/// With a non-null `anchor`, `state` holds increments w relative to the
/// anchor values (u = anchor + w) and the result is returned in the same
/// form. Integrating the increment keeps tiny differences between nearby
/// maps free of the rounding noise of the full values.
FieldState react_step(const FieldState& state, const ModelSpec& model, double tau,
                      const ReactionSolverConfig& cfg, const FieldState* anchor = nullptr);

/// Advances `main` (all species) and `reduced` (monitored species only) by
/// tau in a single stacked solve per grid point. Each keeps its own clock:
/// main starts at main.time(), reduced at reduced.time().
void react_pair_step(FieldState& main, FieldState& reduced, const ModelSpec& model, double tau,
                     const ReactionSolverConfig& cfg);

}  // namespace adsplit
