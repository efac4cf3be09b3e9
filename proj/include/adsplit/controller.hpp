#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "adsplit/errors.hpp"
#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"
#include "adsplit/norms.hpp"
#include "adsplit/reaction.hpp"
#include "adsplit/splitting.hpp"

namespace adsplit {

enum class ProbePolicy { EveryN, AtSteps, Never };

/// Re-splitting S^{a dt} against S^{b dt} S^{c dt} with a = b + c.
struct ProbeSet {
  double a, b, c;
};

struct ControllerConfig {
  double eta = 1e-4;
  double dt0 = 1e-6;
  double eps0 = 0.05;
  double eps_max = 0.999;
  ProbeSet big{1.0, 0.5, 0.5};
  ProbeSet small{0.5, 0.4, 0.1};
  double zeta = 0.9;
  double beta = 0.1;
  double gamma = 0.95;
  double theta = 10.0;
  double rejection_offset = 10.0;
  double upsilon = 0.9;
  std::size_t probe_period = 10;
  ProbePolicy probe_policy = ProbePolicy::EveryN;
  std::vector<std::size_t> probe_steps;
  std::size_t max_rejections = 50;
  /// At every event, restart the counter, eps and the critical-step estimate
  /// as if a fresh run began there (periodic forcing).
  bool restart_at_events = false;

  /// Throws ConfigError on a violated invariant; returns warnings.
  std::vector<std::string> validate() const;
};

struct ControllerState {
  double t = 0.0;
  std::size_t i = 0;
  double dt = 0.0;
  double eps = 0.0;
  double dt_star = std::numeric_limits<double>::infinity();
  double c0 = 0.0;
  double omega = 0.0;
  bool estimate = false;

  bool has_dt_star() const noexcept { return dt_star < std::numeric_limits<double>::infinity(); }
};

enum class StepNote { None, ErrAboveTolerance, AboveCriticalStep, EventBarrier };
const char* to_string(StepNote note);

struct StepRecord {
  double t;   ///< start of the attempted step
  double dt;
  double eps;
  double err;
  double dt_star;  ///< +inf until the first probe
  double c0;
  double omega;
  bool accepted;
  StepNote note;
  bool probed;
};

/// Thrown after too many consecutive rejections; carries the attempt log.
class ControllerAbort : public Error {
 public:
  ControllerAbort(const std::string& what, std::vector<StepRecord> log)
      : Error(what), log_(std::move(log)) {}
  const std::vector<StepRecord>& log() const noexcept { return log_; }

 private:
  std::vector<StepRecord> log_;
};

/// upsilon * dt * sqrt(eta / err); 5 * dt when err is below 1e-300.
double next_dt(double dt, double err, double eta, double upsilon);
/// err < eta. NaN throws NumericError.
bool accept_step(double err, double eta);

struct ProbeResult {
  double e_small = 0.0;
  double e_big = 0.0;
  FieldState reference;  ///< S^{b1 dt} S^{c1 dt} u0 on the monitored species
};

/// Probe work done before the main step: e_small and the state that the main
/// step is later compared against. `sub` is the monitored subsystem context
/// and `u0` is already restricted to it.
ProbeResult run_probes(const FieldState& u0, const SplitContext& sub, double dt,
                       const ControllerConfig& cfg, const NormSpec& norm);
/// Completes e_big once the main step result (monitored rows) is known.
double finish_probes(ProbeResult& probes, const FieldState& main_monitored, const FieldState& u0,
                     const NormSpec& norm);

struct C0Omega {
  double c0;
  double omega;
  bool clamped;  ///< solved C0 was not positive
};

C0Omega estimate_C0_omega(double e_big, double e_small, double dt, const ControllerConfig& cfg);
/// zeta * err / (C0 dt^2); +inf when C0 is not positive.
double estimate_dt_star(double err, double dt, double eps, double c0, double zeta);
/// min(theta * eps * C0 dt^3 / err, eps_max).
double adapt_epsilon(double eps, double err, double dt, double c0, double theta, double eps_max);

struct RunOptions {
  NormSpec norm;
  ReactionSolverConfig reaction;
  /// Extra barriers where the state is recorded.
  std::vector<double> snapshot_times;
};

struct RunResult {
  FieldState final_state;
  std::vector<StepRecord> log;
  std::vector<FieldState> snapshots;
  std::vector<std::string> warnings;
};

RunResult run_adaptive(const ModelSpec& model, const FieldState& u0, double t_end,
                       const ControllerConfig& cfg, const RunOptions& options);

}  // namespace adsplit
