#include "adsplit/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adsplit/diffusion.hpp"

namespace adsplit {

namespace {
constexpr double kTiny = std::numeric_limits<double>::min();
}

std::vector<std::string> ControllerConfig::validate() const {
  std::vector<std::string> warnings;
  auto fail = [](const std::string& what) { throw ConfigError("controller: " + what); };
  if (!(eta > 0.0)) fail("eta must be positive");
  if (!(dt0 > 0.0)) fail("dt0 must be positive");
  if (!(upsilon > 0.0 && upsilon <= 1.0)) fail("upsilon must lie in (0, 1]");
  if (!(zeta > 0.0 && zeta <= 1.0)) fail("zeta must lie in (0, 1]");
  if (!(beta > 0.0 && beta < gamma && gamma <= 1.0)) fail("need 0 < beta < gamma <= 1");
  if (!(theta >= 1.0)) fail("theta must be >= 1");
  if (!(rejection_offset > 1.0)) fail("rejection offset C must be > 1");
  if (!(eps_max > 0.0 && eps_max < 1.0)) fail("eps_max must lie in (0, 1)");
  if (!(eps0 > 0.0 && eps0 < eps_max)) fail("need 0 < eps0 < eps_max");
  for (const ProbeSet& p : {big, small}) {
    if (!(p.b > 0.0 && p.c > 0.0) || std::abs(p.a - (p.b + p.c)) > 1e-14) {
      fail("probe sets need a = b + c with b, c > 0");
    }
  }
  if (std::abs(big.a - 1.0) > 1e-14) fail("the first probe set needs a = 1");
  if (std::abs(small.a - big.c) > 1e-14) fail("the second probe set needs a equal to the first c");
  if (probe_policy == ProbePolicy::EveryN && probe_period == 0) fail("probe period must be >= 1");
  if (max_rejections == 0) fail("max_rejections must be >= 1");
  if (eps_max >= 0.5) {
    warnings.push_back("eps_max >= 1/2: the shifted companion may integrate the reaction backwards");
  }
  return warnings;
}

const char* to_string(StepNote note) {
  switch (note) {
    case StepNote::None: return "";
    case StepNote::ErrAboveTolerance: return "err>eta";
    case StepNote::AboveCriticalStep: return "dt>dt_star";
    case StepNote::EventBarrier: return "event-barrier";
  }
  return "";
}

double next_dt(double dt, double err, double eta, double upsilon) {
  if (std::isnan(err)) throw NumericError("next_dt: error estimate is NaN");
  if (err < 1e-300) return 5.0 * dt;
  return upsilon * dt * std::sqrt(eta / err);
}

bool accept_step(double err, double eta) {
  if (std::isnan(err)) throw NumericError("accept_step: error estimate is NaN");
  return err < eta;
}

ProbeResult run_probes(const FieldState& u0, const SplitContext& sub, double dt,
                       const ControllerConfig& cfg, const NormSpec& norm) {
  const SchemeId strang = SchemeId::make(SchemeKind::Strang2);
  FieldState u1 = apply_scheme(strang, u0, sub, cfg.small.c * dt);
  u1 = apply_scheme(strang, u1, sub, cfg.small.b * dt);
  FieldState u2 = apply_scheme(strang, u0, sub, cfg.big.c * dt);
  ProbeResult out{0.0, 0.0, u0};
  out.e_small = monitored_err(u2, u1, u0, sub.model, norm);
  out.reference = apply_scheme(strang, u2, sub, cfg.big.b * dt);
  return out;
}

double finish_probes(ProbeResult& probes, const FieldState& main_monitored, const FieldState& u0,
                     const NormSpec& norm) {
  double e = 0.0;
  for (std::size_t r = 0; r < u0.species(); ++r) {
    e = std::max(e, normalized_l2_diff(main_monitored.row(r), probes.reference.row(r), u0.row(r), norm));
  }
  probes.e_big = e;
  return e;
}

C0Omega estimate_C0_omega(double e_big, double e_small, double dt, const ControllerConfig& cfg) {
  if (!(dt > 0.0)) throw DomainError("estimate_C0_omega: dt must be positive");
  const double h3 = dt * dt * dt;
  const ProbeSet& p1 = cfg.big;
  const ProbeSet& p2 = cfg.small;
  // e_i / dt^3 = (a^3 - b^3) C0 + c^3 W
  const double a11 = p1.a * p1.a * p1.a - p1.b * p1.b * p1.b, a12 = p1.c * p1.c * p1.c;
  const double a21 = p2.a * p2.a * p2.a - p2.b * p2.b * p2.b, a22 = p2.c * p2.c * p2.c;
  const double det = a11 * a22 - a12 * a21;
  if (det == 0.0) throw ConfigError("probe sets give a singular system");
  const double r1 = e_big / h3, r2 = e_small / h3;
  const double c0 = (r1 * a22 - a12 * r2) / det;
  const double w = (a11 * r2 - a21 * r1) / det;
  if (!(c0 > 0.0)) return {kTiny, 0.0, true};
  return {c0, std::max(w / c0, 0.0), false};
}

double estimate_dt_star(double err, double dt, double eps, double c0, double zeta) {
  if (!(c0 > kTiny)) return std::numeric_limits<double>::infinity();
  const double c_eps = err / (eps * dt * dt);
  return zeta * eps * c_eps / c0;
}

double adapt_epsilon(double eps, double err, double dt, double c0, double theta, double eps_max) {
  if (!(err > 1e-300)) return eps_max;
  const double raw = eps * c0 * dt * dt * dt / err;
  return std::min(theta * raw, eps_max);
}

namespace {

bool probe_due(const ControllerConfig& cfg, std::size_t i, bool estimate) {
  switch (cfg.probe_policy) {
    case ProbePolicy::Never: return false;
    case ProbePolicy::EveryN: return estimate || i % cfg.probe_period == 0;
    case ProbePolicy::AtSteps:
      return estimate ||
             std::find(cfg.probe_steps.begin(), cfg.probe_steps.end(), i) != cfg.probe_steps.end();
  }
  return false;
}

std::string format_abort(const ControllerState& s, std::size_t count) {
  std::ostringstream os;
  os << count << " consecutive rejections at t=" << s.t << " (dt=" << s.dt << ", eps=" << s.eps
     << ", dt_star=" << s.dt_star << ")";
  return os.str();
}

}  // namespace

RunResult run_adaptive(const ModelSpec& model, const FieldState& u0, double t_end,
                       const ControllerConfig& cfg, const RunOptions& options) {
  model.validate();
  options.reaction.validate();
  RunResult result{u0, {}, {}, cfg.validate()};
  if (u0.species() != model.species()) throw DimensionError("initial state does not match the model");
  const double t0 = u0.time();
  if (t_end < t0) throw DomainError("final time precedes the initial time");

  const DiffusionOperator diffusion(u0.grid(), model.diffusion);
  const SplitContext ctx{model, diffusion, options.reaction};
  const ModelSpec sub_model = restrict_to_monitored(model);
  std::vector<double> sub_coeff;
  for (std::size_t j : model.monitored) sub_coeff.push_back(model.diffusion[j]);
  const DiffusionOperator sub_diffusion(u0.grid(), sub_coeff);
  const SplitContext sub_ctx{sub_model, sub_diffusion, options.reaction};

  // Barriers: events (with reset), breakpoints and snapshot times (without), all in (t0, t_end].
  struct Barrier {
    double time;
    double reset;  // 0 for snapshots
  };
  std::vector<Barrier> barriers;
  for (const Event& e : model.events) {
    if (e.time > t0 && e.time <= t_end) barriers.push_back({e.time, e.reset_dt});
  }
  // Jumps of f in time: stepping across one would spoil the error estimate.
  for (double b : model.breakpoints) {
    if (b > t0 && b <= t_end) barriers.push_back({b, 0.0});
  }
  for (double s : options.snapshot_times) {
    if (s == t0) result.snapshots.push_back(u0);
    else if (s > t0 && s <= t_end) barriers.push_back({s, 0.0});
  }
  std::stable_sort(barriers.begin(), barriers.end(),
                   [](const Barrier& a, const Barrier& b) { return a.time < b.time; });
  std::vector<double> snapshot_pending;
  for (double s : options.snapshot_times) {
    if (s > t0 && s <= t_end) snapshot_pending.push_back(s);
  }
  std::sort(snapshot_pending.begin(), snapshot_pending.end());

  ControllerState s;
  s.t = t0;
  s.dt = cfg.dt0;
  s.eps = cfg.eps0;
  FieldState u = u0;
  std::size_t next_barrier = 0;
  std::size_t rejections = 0;

  while (s.t < t_end) {
    while (next_barrier < barriers.size() && barriers[next_barrier].time <= s.t) ++next_barrier;
    double stop = t_end;
    if (next_barrier < barriers.size()) stop = std::min(stop, barriers[next_barrier].time);
    bool lands = false;
    if (s.t + s.dt >= stop) {
      s.dt = stop - s.t;
      lands = true;
    }

    const FieldState u_sub = extract_monitored(u, model);
    bool probed = false;
    ProbeResult probes{0.0, 0.0, u_sub};
    if (probe_due(cfg, s.i, s.estimate)) {
      try {
        probes = run_probes(u_sub, sub_ctx, s.dt, cfg, options.norm);
        probed = true;
      } catch (const Error& e) {
        result.warnings.push_back(std::string("probe failed at t=") + std::to_string(s.t) + ": " + e.what());
        s.estimate = true;
      }
    }

    PairStepResult pair = fused_pair_step(u, ctx, s.dt, s.eps, options.norm);
    const double err = pair.err;

    if (probed) {
      try {
        finish_probes(probes, extract_monitored(pair.main, model), u_sub, options.norm);
        const C0Omega fit = estimate_C0_omega(probes.e_big, probes.e_small, s.dt, cfg);
        if (fit.clamped) {
          result.warnings.push_back("non-positive C0 estimate at t=" + std::to_string(s.t));
        }
        s.c0 = fit.c0;
        s.omega = fit.omega;
        s.dt_star = estimate_dt_star(err, s.dt, s.eps, s.c0, cfg.zeta);
        s.estimate = false;
        if (s.has_dt_star() && (s.dt < cfg.beta * s.dt_star || s.dt > cfg.gamma * s.dt_star)) {
          s.estimate = true;
        }
      } catch (const Error& e) {
        result.warnings.push_back(std::string("probe evaluation failed: ") + e.what());
        s.estimate = true;
      }
    }
    if (s.estimate && s.i > 0 && s.c0 > kTiny && s.has_dt_star()) {
      const double eps_new = adapt_epsilon(s.eps, err, s.dt, s.c0, cfg.theta, cfg.eps_max);
      s.dt_star = estimate_dt_star(err * eps_new / s.eps, s.dt, eps_new, s.c0, cfg.zeta);
      s.eps = eps_new;
      s.estimate = false;
    }

    const double dt_new = next_dt(s.dt, err, cfg.eta, cfg.upsilon);
    double err_eff = err;
    StepNote note = StepNote::None;
    if (s.dt > s.dt_star) {
      err_eff = cfg.eta + cfg.rejection_offset;
      note = StepNote::AboveCriticalStep;
    }
    if (dt_new > s.dt_star && s.eps != cfg.eps_max) s.estimate = true;
    const double dt_next = std::min(dt_new, s.dt_star);
    const bool accepted = accept_step(err_eff, cfg.eta);
    if (!accepted && note == StepNote::None) note = StepNote::ErrAboveTolerance;

    StepRecord rec{s.t, s.dt, s.eps, err, s.dt_star, s.c0, s.omega, accepted, note, probed};

    if (accepted) {
      rejections = 0;
      u = std::move(pair.main);
      s.t = lands ? stop : s.t + s.dt;
      u.set_time(s.t);
      ++s.i;
      s.dt = dt_next;
      if (lands && next_barrier < barriers.size() && barriers[next_barrier].time == s.t) {
        // Several barriers may share a time (event and snapshot).
        for (std::size_t b = next_barrier; b < barriers.size() && barriers[b].time == s.t; ++b) {
          if (barriers[b].reset > 0.0) {
            s.dt = barriers[b].reset;
            rec.note = StepNote::EventBarrier;
            if (cfg.restart_at_events) {
              s.i = 0;
              s.eps = cfg.eps0;
              s.dt_star = std::numeric_limits<double>::infinity();
              s.c0 = 0.0;
              s.omega = 0.0;
              s.estimate = false;
            }
          }
        }
      }
      while (!snapshot_pending.empty() && snapshot_pending.front() <= s.t) {
        result.snapshots.push_back(u);
        snapshot_pending.erase(snapshot_pending.begin());
      }
      result.log.push_back(rec);
    } else {
      result.log.push_back(rec);
      s.dt = dt_next;
      if (++rejections > cfg.max_rejections) {
        throw ControllerAbort(format_abort(s, rejections), std::move(result.log));
      }
    }
  }
  result.final_state = std::move(u);
  return result;
}

}  // namespace adsplit
