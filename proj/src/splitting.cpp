#include "adsplit/splitting.hpp"

#include <cmath>
#include <functional>

#include "adsplit/errors.hpp"

namespace adsplit {

SchemeId SchemeId::make(SchemeKind kind, double shift) {
  SchemeId id{kind, 0.0};
  if (id.shifted()) {
    if (!(std::abs(shift) < 0.5) || shift == 0.0) {
      throw ConfigError("shift must satisfy 0 < |eps| < 1/2");
    }
    id.shift = shift;
  }
  return id;
}

std::string SchemeId::name() const {
  switch (kind) {
    case SchemeKind::Lie1: return "lie1";
    case SchemeKind::Lie2: return "lie2";
    case SchemeKind::Strang1: return "strang1";
    case SchemeKind::Strang2: return "strang2";
    case SchemeKind::Strang1Shifted: return "strang1_shifted(" + std::to_string(shift) + ")";
    case SchemeKind::Strang2Shifted: return "strang2_shifted(" + std::to_string(shift) + ")";
  }
  return "unknown";
}

namespace {

// Rethrows a sub-integrator failure with the substep named.
template <class F>
FieldState substep(const char* label, F&& f) {
  try {
    return f();
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string(label) + ": " + e.what(), e.point());
  } catch (const NumericError& e) {
    throw NumericError(std::string(label) + ": " + e.what());
  }
}

}  // namespace

FieldState apply_scheme(const SchemeId& scheme, const FieldState& state, const SplitContext& ctx,
                        double dt, const FieldState* anchor) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("apply_scheme: dt must be positive");
  const SchemeId checked = SchemeId::make(scheme.kind, scheme.shift);
  const double eps = checked.shift;
  auto Y = [&](const FieldState& u, double tau, const char* label) {
    return substep(label, [&] { return react_step(u, ctx.model, tau, ctx.reaction, anchor); });
  };
  auto X = [&](const FieldState& u, double tau, const char* label) {
    return substep(label, [&] { return diffuse_step(u, ctx.diffusion, tau, anchor); });
  };
  switch (checked.kind) {
    case SchemeKind::Lie1:
      return X(Y(state, dt, "Y^dt"), dt, "X^dt");
    case SchemeKind::Lie2:
      return Y(X(state, dt, "X^dt"), dt, "Y^dt");
    case SchemeKind::Strang1:
      return X(Y(X(state, 0.5 * dt, "X^(dt/2) first"), dt, "Y^dt"), 0.5 * dt, "X^(dt/2) last");
    case SchemeKind::Strang2:
      return Y(X(Y(state, 0.5 * dt, "Y^(dt/2) first"), dt, "X^dt"), 0.5 * dt, "Y^(dt/2) last");
    case SchemeKind::Strang1Shifted:
      return X(Y(X(state, (0.5 + eps) * dt, "X^((1/2+eps)dt)"), dt, "Y^dt"), (0.5 - eps) * dt,
               "X^((1/2-eps)dt)");
    case SchemeKind::Strang2Shifted:
      return Y(X(Y(state, (0.5 + eps) * dt, "Y^((1/2+eps)dt)"), dt, "X^dt"), (0.5 - eps) * dt,
               "Y^((1/2-eps)dt)");
  }
  throw ConfigError("unknown scheme");
}

PairStepResult fused_pair_step(const FieldState& state, const SplitContext& ctx, double dt,
                               double eps, const NormSpec& norm) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("fused_pair_step: dt must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("fused_pair_step: eps must lie in (0, 1)");
  const ModelSpec& model = ctx.model;
  const auto& coeff = ctx.diffusion.coefficients();

  FieldState main = substep("Y^(dt/2)", [&] {
    return react_step(state, model, 0.5 * dt, ctx.reaction);
  });
  const FieldState u1 = extract_monitored(main, model);
  const ModelSpec sub = restrict_to_monitored(model);
  FieldState shifted = substep("Y^(eps dt) companion", [&] {
    return react_step(u1, sub, eps * dt, ctx.reaction);
  });

  main = substep("X^dt", [&] { return diffuse_step(main, ctx.diffusion, dt); });
  for (std::size_t r = 0; r < model.monitored.size(); ++r) {
    ctx.diffusion.apply(shifted.row(r), coeff[model.monitored[r]], dt);
  }

  const double back = (0.5 - eps) * dt;
  if (back >= 0.0) {
    try {
      react_pair_step(main, shifted, model, back, ctx.reaction);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string("Y^((1/2-eps)dt) stacked: ") + e.what(), e.point());
    }
    main = substep("Y^(eps dt) main", [&] { return react_step(main, model, eps * dt, ctx.reaction); });
  } else {
    main = substep("Y^(dt/2) main", [&] { return react_step(main, model, 0.5 * dt, ctx.reaction); });
    shifted = substep("Y^((1/2-eps)dt) companion", [&] {
      return react_step(shifted, sub, back, ctx.reaction);
    });
  }
  const double err = monitored_err_reduced(main, shifted, state, model, norm);
  return {std::move(main), std::move(shifted), err};
}

}  // namespace adsplit
