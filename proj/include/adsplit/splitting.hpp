#pragma once

#include <string>

#include "adsplit/diffusion.hpp"
#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"
#include "adsplit/norms.hpp"
#include "adsplit/reaction.hpp"

namespace adsplit {

enum class SchemeKind { Lie1, Lie2, Strang1, Strang2, Strang1Shifted, Strang2Shifted };

/// Compositions read right to left: the rightmost map acts first.
///   Lie1   X^t Y^t            Lie2   Y^t X^t
///   Strang1 X^{t/2} Y^t X^{t/2}       Strang2 Y^{t/2} X^t Y^{t/2}
///   Strang1Shifted X^{(1/2-e)t} Y^t X^{(1/2+e)t}
///   Strang2Shifted Y^{(1/2-e)t} X^t Y^{(1/2+e)t}
struct SchemeId {
  SchemeKind kind = SchemeKind::Strang2;
  double shift = 0.0;

  /// Throws ConfigError unless shifted kinds have 0 < |shift| < 1/2.
  static SchemeId make(SchemeKind kind, double shift = 0.0);
  bool shifted() const noexcept {
    return kind == SchemeKind::Strang1Shifted || kind == SchemeKind::Strang2Shifted;
  }
  std::string name() const;
};

/// Everything a splitting step needs besides the state.
struct SplitContext {
  const ModelSpec& model;
  const DiffusionOperator& diffusion;
  ReactionSolverConfig reaction;
};

/// One step of `scheme` over dt. With an anchor, states are increments (see
/// react_step).
FieldState apply_scheme(const SchemeId& scheme, const FieldState& state, const SplitContext& ctx,
                        double dt, const FieldState* anchor = nullptr);

struct PairStepResult {
  FieldState main;     ///< Strang2 step
  FieldState shifted;  ///< Strang2Shifted step, monitored species only
  double err;
};

/// Strang2 and its shifted companion sharing substeps:
///   u1 = Y^{dt/2} u;  v = Y^{eps dt} u1 (monitored);  X^dt on both;
///   Y^{(1/2-eps)dt} on both (one stacked solve);  Y^{eps dt} on the main one.
/// For eps > 1/2 the shared substep would run the reaction backwards, so the
/// main branch takes its Y^{dt/2} directly and only the companion goes back.
PairStepResult fused_pair_step(const FieldState& state, const SplitContext& ctx, double dt,
                               double eps, const NormSpec& norm);

}  // namespace adsplit
