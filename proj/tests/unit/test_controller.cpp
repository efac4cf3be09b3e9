#include <catch_amalgamated.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "adsplit/controller.hpp"
#include "adsplit/errors.hpp"
#include "helpers.hpp"

using namespace adsplit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Two coupled species with unequal diffusion: splitting is not exact.
ModelSpec coupled_model() {
  return testing::linear_model(2, {-1.0, 2.0, 0.5, -0.8}, {0.02, 0.005});
}

}  // namespace

TEST_CASE("next_dt examples", "[controller]") {
  CHECK_THAT(next_dt(1e-3, 4e-6, 1e-6, 0.9), WithinRel(4.5e-4, 1e-15));
  CHECK(next_dt(1e-3, 1e-6, 1e-6, 0.9) == 0.9 * 1e-3);
  CHECK_THAT(next_dt(1e-3, 0.25e-6, 1e-6, 1.0), WithinRel(2e-3, 1e-15));
  CHECK(next_dt(1e-3, 0.0, 1e-6, 0.9) == 5e-3);
  CHECK_THROWS_AS(next_dt(1e-3, std::nan(""), 1e-6, 0.9), NumericError);
}

TEST_CASE("next_dt decreases strictly with the error", "[controller]") {
  double previous = kInf;
  for (double err = 1e-12; err < 1.0; err *= 1.7) {
    const double dt = next_dt(1e-2, err, 1e-6, 0.9);
    CHECK(dt < previous);
    previous = dt;
  }
}

TEST_CASE("accept_step is strict", "[controller]") {
  CHECK(accept_step(1e-7, 1e-6));
  CHECK_FALSE(accept_step(1e-6, 1e-6));
  CHECK_THROWS_AS(accept_step(std::nan(""), 1e-6), NumericError);
}

TEST_CASE("C0 and omega from the probe errors", "[controller]") {
  const ControllerConfig cfg;
  const C0Omega a = estimate_C0_omega(1.0, 0.062, 1.0, cfg);
  CHECK_THAT(a.c0, WithinAbs(1.0, 1e-14));
  CHECK_THAT(a.omega, WithinAbs(1.0, 1e-13));
  CHECK_FALSE(a.clamped);
  const double dt = 1e-2, h3 = dt * dt * dt;
  const C0Omega b = estimate_C0_omega(0.875 * h3, 0.061 * h3, dt, cfg);
  CHECK_THAT(b.c0, WithinRel(1.0, 1e-13));
  CHECK_THAT(b.omega, WithinAbs(0.0, 1e-12));
  const C0Omega c = estimate_C0_omega(1.0, 0.0, 1.0, cfg);
  CHECK(c.clamped);
  CHECK(estimate_dt_star(1e-6, 1e-3, 0.05, c.c0, 0.9) == kInf);
}

TEST_CASE("probe system round trip recovers C0 and omega", "[controller]") {
  const ControllerConfig cfg;
  auto synth = [&](const ProbeSet& p, double c0, double w, double dt) {
    return dt * dt * dt * ((p.a * p.a * p.a - p.b * p.b * p.b) * c0 + p.c * p.c * p.c * w);
  };
  for (double c0 : {1e-6, 0.3, 7.0, 1e4}) {
    for (double omega : {0.0, 0.5, 2.0}) {
      const double dt = 3e-3;
      const double e_big = synth(cfg.big, c0, omega * c0, dt);
      const double e_small = synth(cfg.small, c0, omega * c0, dt);
      const C0Omega fit = estimate_C0_omega(e_big, e_small, dt, cfg);
      CHECK_THAT(fit.c0, WithinRel(c0, 1e-12));
      CHECK_THAT(fit.omega, WithinAbs(omega, 1e-11));
      // Feeding the fitted C0 back gives the self-consistent critical step.
      CHECK_THAT(estimate_dt_star(fit.c0 * dt * dt * dt, dt, 0.05, fit.c0, 1.0),
                 WithinRel(dt, 1e-12));
    }
  }
}

TEST_CASE("probe-set arithmetic", "[controller]") {
  const ControllerConfig cfg;
  auto cube = [](double v) { return v * v * v; };
  CHECK(cube(cfg.big.a) - cube(cfg.big.b) == 7.0 / 8.0);
  CHECK(cube(cfg.big.c) == 1.0 / 8.0);
  CHECK_THAT(cube(cfg.small.a) - cube(cfg.small.b), WithinAbs(61.0 / 1000.0, 1e-16));
  CHECK_THAT(cube(cfg.small.c), WithinAbs(1.0 / 1000.0, 1e-18));
  const double det = (7.0 / 8.0) * 1e-3 - (1.0 / 8.0) * 0.061;
  CHECK_THAT(det, WithinRel(-0.00675, 1e-12));
}

TEST_CASE("critical step and eps adaptation examples", "[controller]") {
  CHECK_THAT(estimate_dt_star(1e-8, 1e-3, 0.05, 1e-2, 0.9), WithinRel(0.9, 1e-14));
  CHECK_THAT(estimate_dt_star(2.0 * 1e-9, 1e-3, 0.3, 2.0, 1.0), WithinRel(1e-3, 1e-14));
  CHECK_THAT(adapt_epsilon(0.05, 1e-5, 1e-2, 1.0, 10.0, 0.999), WithinRel(0.05, 1e-14));
  CHECK(adapt_epsilon(0.05, 1e-9, 1e-2, 1.0, 10.0, 0.999) == 0.999);
  CHECK(adapt_epsilon(0.05, 0.0, 1e-2, 1.0, 10.0, 0.4) == 0.4);
}

TEST_CASE("controller configuration checks", "[controller]") {
  ControllerConfig cfg;
  auto warnings = cfg.validate();
  CHECK(warnings.size() == 1);  // eps_max = 0.999 >= 1/2
  cfg.eps_max = 0.45;
  CHECK(cfg.validate().empty());
  ControllerConfig bad;
  bad.beta = 0.95;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.small = {0.5, 0.4, 0.2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.rejection_offset = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.eps0 = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("probes vanish for an exact splitting", "[controller]") {
  Grid1D g(0.0, 1.0, 30);
  const auto model = testing::linear_model(2, {0, 0, 0, 0}, {0.1, 0.3});
  DiffusionOperator op(g, model.diffusion);
  SplitContext ctx{model, op, {}};
  const FieldState u0 = testing::smooth_state(g, 2);
  const ControllerConfig cfg;
  ProbeResult p = run_probes(u0, ctx, 0.01, cfg, {});
  const FieldState main = apply_scheme(SchemeId::make(SchemeKind::Strang2), u0, ctx, 0.01);
  finish_probes(p, main, u0, {});
  CHECK(p.e_small < 1e-14);
  CHECK(p.e_big < 1e-14);
}

TEST_CASE("probes recover the Strang error constant on a linear model", "[controller]") {
  Grid1D g(0.0, 1.0, 16);
  const auto model = coupled_model();
  DiffusionOperator op(g, model.diffusion);
  SplitContext ctx{model, op, {1e-14, 1e-14}};
  const FieldState u0 = testing::smooth_state(g, 2);
  const double dt = 0.02;
  ControllerConfig cfg;
  ProbeResult p = run_probes(u0, ctx, dt, cfg, {});
  const FieldState main = apply_scheme(SchemeId::make(SchemeKind::Strang2), u0, ctx, dt);
  finish_probes(p, main, u0, {});
  const C0Omega fit = estimate_C0_omega(p.e_big, p.e_small, dt, cfg);

  // Exact flow from the assembled generator.
  const std::size_t n = g.size();
  std::vector<double> e(n), col(n);
  Eigen::MatrixXd lap(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    op.laplacian(e, col);
    for (std::size_t r = 0; r < n; ++r) lap(r, c) = col[r];
  }
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  gen.block(0, 0, n, n) = model.diffusion[0] * lap - 1.0 * Eigen::MatrixXd::Identity(n, n);
  gen.block(0, n, n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
  gen.block(n, 0, n, n) = 0.5 * Eigen::MatrixXd::Identity(n, n);
  gen.block(n, n, n, n) = model.diffusion[1] * lap - 0.8 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(u0.values().data(), 2 * n);
  const Eigen::VectorXd t = (dt * gen).exp() * v;
  const FieldState exact(g, 2, dt, std::vector<double>(t.data(), t.data() + t.size()));
  const double direct = monitored_err(main, exact, u0, model, {}) / (dt * dt * dt);
  CHECK(fit.c0 > 0.5 * direct);
  CHECK(fit.c0 < 2.0 * direct);
}

TEST_CASE("exact splitting: every step accepted and growth capped", "[controller]") {
  Grid1D g(0.0, 1.0, 20);
  const auto model = testing::linear_model(1, {0.0}, {0.1});
  const FieldState u0 = testing::smooth_state(g, 1);
  ControllerConfig cfg;
  cfg.dt0 = 1e-4;
  cfg.probe_policy = ProbePolicy::Never;
  const RunResult r = run_adaptive(model, u0, 1.0, cfg, {});
  REQUIRE(!r.log.empty());
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    CHECK(r.log[i].accepted);
    if (i + 2 < r.log.size()) CHECK(r.log[i + 1].dt == Catch::Approx(5.0 * r.log[i].dt));
  }
  CHECK(r.final_state.time() == 1.0);
}

TEST_CASE("empty run produces no steps", "[controller]") {
  Grid1D g(0.0, 1.0, 10);
  const auto model = coupled_model();
  const FieldState u0 = testing::smooth_state(g, 2, 0.5);
  const RunResult r = run_adaptive(model, u0, 0.5, ControllerConfig{}, {});
  CHECK(r.log.empty());
  CHECK(r.final_state.time() == 0.5);
}

TEST_CASE("probe-free loop is the plain embedded scheme", "[controller]") {
  Grid1D g(0.0, 1.0, 24);
  const auto model = coupled_model();
  const FieldState u0 = testing::smooth_state(g, 2);
  ControllerConfig cfg;
  cfg.eta = 1e-6;
  cfg.dt0 = 1e-3;
  cfg.probe_policy = ProbePolicy::Never;
  const double t_end = 0.5;
  const RunResult r = run_adaptive(model, u0, t_end, cfg, {});

  // Independent re-implementation: accept if err < eta, dt <- upsilon dt sqrt(eta/err).
  DiffusionOperator op(g, model.diffusion);
  SplitContext ctx{model, op, {}};
  FieldState u = u0;
  double t = 0.0, dt = cfg.dt0;
  std::vector<StepRecord> plain;
  while (t < t_end) {
    bool lands = false;
    if (t + dt >= t_end) {
      dt = t_end - t;
      lands = true;
    }
    PairStepResult pair = fused_pair_step(u, ctx, dt, cfg.eps0, {});
    const bool ok = pair.err < cfg.eta;
    plain.push_back({t, dt, cfg.eps0, pair.err, kInf, 0.0, 0.0, ok, StepNote::None, false});
    const double next = cfg.upsilon * dt * std::sqrt(cfg.eta / pair.err);
    if (ok) {
      u = std::move(pair.main);
      t = lands ? t_end : t + dt;
      u.set_time(t);
    }
    dt = next;
  }
  REQUIRE(r.log.size() == plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    CHECK(r.log[i].t == plain[i].t);
    CHECK(r.log[i].dt == plain[i].dt);
    CHECK(r.log[i].err == plain[i].err);
    CHECK(r.log[i].accepted == plain[i].accepted);
  }
  CHECK(std::equal(u.values().begin(), u.values().end(), r.final_state.values().begin()));
}

TEST_CASE("adaptive run invariants with probes and events", "[controller]") {
  Grid1D g(0.0, 1.0, 24);
  auto model = coupled_model();
  model.events = {{0.13, 1e-3}, {0.31, 2e-3}};
  model.breakpoints = {0.0, 0.27};
  const FieldState u0 = testing::smooth_state(g, 2);
  ControllerConfig cfg;
  cfg.eta = 1e-6;
  cfg.dt0 = 1e-3;
  cfg.probe_period = 5;
  RunOptions options;
  options.snapshot_times = {0.2, 0.4};
  const double t_end = 0.45;
  const RunResult r = run_adaptive(model, u0, t_end, cfg, options);
  double last_t = -1.0;
  std::size_t probes = 0, barrier_notes = 0;
  for (const StepRecord& s : r.log) {
    probes += s.probed ? 1 : 0;
    if (s.accepted) {
      CHECK(s.err < cfg.eta);
      CHECK(s.t > last_t);
      last_t = s.t;
      CHECK(s.t + s.dt <= t_end * (1 + 1e-15));
      for (const Event& e : model.events) {
        CHECK_FALSE((s.t < e.time && s.t + s.dt > e.time * (1 + 1e-15)));
      }
      CHECK_FALSE((s.t < 0.27 && s.t + s.dt > 0.27 * (1 + 1e-15)));
      barrier_notes += s.note == StepNote::EventBarrier ? 1 : 0;
    } else {
      CHECK(s.note != StepNote::None);
    }
  }
  CHECK(probes > 0);
  CHECK(barrier_notes == 2);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].time() == 0.2);
  CHECK(r.snapshots[1].time() == 0.4);
  CHECK(r.final_state.time() == t_end);
  // Right after each event the step restarts from the reset value.
  for (std::size_t i = 0; i + 1 < r.log.size(); ++i) {
    if (r.log[i].accepted && r.log[i].note == StepNote::EventBarrier) {
      const double expected = r.log[i + 1].t == 0.13 ? 1e-3 : 2e-3;
      CHECK(r.log[i + 1].dt == expected);
    }
  }
}

TEST_CASE("restart at events resets eps and the probe counter", "[controller]") {
  Grid1D g(0.0, 1.0, 24);
  auto model = coupled_model();
  model.events = {{0.2, 1e-3}};
  const FieldState u0 = testing::smooth_state(g, 2);
  ControllerConfig cfg;
  cfg.eta = 1e-6;
  cfg.dt0 = 1e-3;
  cfg.probe_period = 7;
  cfg.restart_at_events = true;
  const RunResult r = run_adaptive(model, u0, 0.3, cfg, {});
  bool seen = false;
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    if (r.log[i].t == 0.2 && (i == 0 || r.log[i - 1].t < 0.2)) {
      seen = true;
      CHECK(r.log[i].eps == cfg.eps0);
      CHECK(r.log[i].probed);
      CHECK(r.log[i].dt == 1e-3);
    }
  }
  CHECK(seen);
}

TEST_CASE("too many rejections abort with the log", "[controller]") {
  Grid1D g(0.0, 1.0, 16);
  const auto model = coupled_model();
  const FieldState u0 = testing::smooth_state(g, 2);
  ControllerConfig cfg;
  cfg.eta = 1e-20;  // below the rounding floor of err
  cfg.dt0 = 1e-2;
  cfg.max_rejections = 3;
  cfg.probe_policy = ProbePolicy::Never;
  try {
    run_adaptive(model, u0, 1.0, cfg, {});
    FAIL("expected an abort");
  } catch (const ControllerAbort& e) {
    CHECK(e.log().size() == 4);
    for (const StepRecord& s : e.log()) CHECK_FALSE(s.accepted);
  }
}
