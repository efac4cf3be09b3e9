#include "adsplit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "adsplit/csv.hpp"
#include "adsplit/errors.hpp"

namespace adsplit {

namespace fs = std::filesystem;

namespace {

// Runs `body`, tagging any failure with the stage name.
template <class F>
auto stage(const std::string& name, std::ostream& log, F&& body) -> decltype(body()) {
  log << "[" << name << "]\n";
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string indexed(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return stem + "_" + buf + ".csv";
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return v;
}

SweepConfig sweep_config(const RunConfig& cfg) {
  SweepConfig s;
  s.reaction = cfg.reaction;
  s.reaction.rtol = s.reaction.atol = cfg.study.tolerance;
  s.reference = cfg.reference;
  s.reference.rtol = s.reference.atol = cfg.study.tolerance;
  s.norm = cfg.norm;
  return s;
}

// KPP with reaction rate k; other parameters from the config.
RunConfig with_k(const RunConfig& cfg, double k) {
  RunConfig c = cfg;
  c.kpp.k = k;
  return c;
}

// M1 and M2 of the canonical front (k = D = 1); the theoretical critical
// step for rate k is then eps M1 / (k M2).
MomentPair canonical_moments(const RunConfig& cfg) {
  KppParams p = cfg.kpp;
  p.k = 1.0;
  p.diffusion = 1.0;
  const FieldState u0 = kpp_initial_state(p);
  return compute_M1_M2(u0.row(0), p.grid().dx(), *make_kpp_model(p).scalar);
}

void require_kpp(const RunConfig& cfg, const std::string& command) {
  if (cfg.model != ModelId::Kpp) {
    throw StageError("setup", command + " needs the scalar kpp model");
  }
}

void write_states(const fs::path& out, const std::string& stem, const std::vector<FieldState>& states,
                  const ModelSpec& model) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    write_state_csv(out / indexed(stem, i), states[i], model.names);
  }
}

void command_run(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const ModelSpec model = stage("setup", log, [&] { return cfg.make_model(); });
  const FieldState u0 = stage("setup", log, [&] { return cfg.initial_state(); });
  RunOptions options;
  options.norm = cfg.norm;
  options.reaction = cfg.reaction;
  options.snapshot_times = cfg.snapshot_times;

  RunResult result = stage("adaptive run", log, [&] {
    try {
      return run_adaptive(model, u0, cfg.t_end, cfg.controller, options);
    } catch (const ControllerAbort& e) {
      write_steps_csv(out / "steps.csv", e.log());
      throw;
    }
  });
  for (const std::string& w : result.warnings) {
    if (std::find(cfg.warnings.begin(), cfg.warnings.end(), w) == cfg.warnings.end()) {
      log << "warning: " << w << "\n";
    }
  }

  stage("write steps", log, [&] {
    write_steps_csv(out / "steps.csv", result.log);
    write_states(out, "snapshot", result.snapshots, model);
    write_state_csv(out / "final.csv", result.final_state, model.names);
  });

  std::size_t accepted = 0;
  for (const StepRecord& r : result.log) accepted += r.accepted ? 1 : 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double final_eps = result.log.empty() ? cfg.controller.eps0 : result.log.back().eps;
  const double final_dt_star = result.log.empty() ? nan : result.log.back().dt_star;

  std::optional<FieldState> reference;
  if (cfg.compare_reference) {
    reference = stage("reference", log, [&] {
      return reference_solve(model, u0, cfg.t_end, cfg.reference);
    });
  }

  stage("write summary", log, [&] {
    CsvWriter w(out / "summary.csv", {"quantity", "value"});
    w << "t_end" << cfg.t_end;
    w.end_row();
    w << "eta" << cfg.controller.eta;
    w.end_row();
    w << "accepted_steps" << accepted;
    w.end_row();
    w << "rejected_steps" << (result.log.size() - accepted);
    w.end_row();
    w << "final_eps" << final_eps;
    w.end_row();
    w << "final_dt_star" << final_dt_star;
    w.end_row();
    if (reference) {
      double worst = 0.0;
      for (std::size_t j : model.monitored) {
        const auto a = result.final_state.row(j);
        const auto b = reference->row(j);
        std::vector<double> diff(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) diff[k] = a[k] - b[k];
        const double rel = normalized_l2_diff(a, b, b, cfg.norm);
        worst = std::max(worst, rel);
        w << ("abs_l2_error:" + model.names[j]) << rms(diff);
        w.end_row();
        w << ("normalized_l2_error:" + model.names[j]) << rel;
        w.end_row();
      }
      w << "normalized_l2_error:max" << worst;
      w.end_row();
      log << "final normalized L2 error " << worst << " (eta " << cfg.controller.eta << ")\n";
    }
    w.commit();
  });
  log << accepted << " accepted, " << (result.log.size() - accepted) << " rejected steps\n";
}

void command_reference(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const ModelSpec model = stage("setup", log, [&] { return cfg.make_model(); });
  const FieldState u0 = stage("setup", log, [&] { return cfg.initial_state(); });
  std::vector<FieldState> snapshots;
  FieldState state = u0;
  stage("reference", log, [&] {
    for (double t : cfg.snapshot_times) {
      state = reference_solve(model, state, t, cfg.reference);
      snapshots.push_back(state);
    }
    state = reference_solve(model, state, cfg.t_end, cfg.reference);
  });
  stage("write snapshots", log, [&] {
    write_states(out, "reference", snapshots, model);
    write_state_csv(out / "reference_final.csv", state, model.names);
  });
}

std::vector<RunConfig> study_cases(const RunConfig& cfg) {
  if (cfg.model != ModelId::Kpp) return {cfg};
  std::vector<RunConfig> cases;
  for (double k : cfg.study.k) cases.push_back(with_k(cfg, k));
  return cases;
}

void command_study_order(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const std::vector<double> dts =
      cfg.study.dts.empty() ? log_grid(cfg.study.dt_min, cfg.study.dt_max, cfg.study.points)
                            : cfg.study.dts;
  CsvWriter summary(out / "order.csv", {"k", "eps", "slope_t_minus_strang",
                                        "slope_t_minus_shifted", "slope_strang_minus_shifted"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const RunConfig& c : study_cases(cfg)) {
    const double k = cfg.model == ModelId::Kpp ? c.kpp.k : nan;
    const ModelSpec model = stage("setup", log, [&] { return c.make_model(); });
    const FieldState u0 = stage("setup", log, [&] { return c.initial_state(); });
    for (double eps : cfg.study.eps) {
      const SweepResult sweep = stage("sweep k=" + tag(k) + " eps=" + tag(eps), log, [&] {
        return local_error_sweep(model, u0, dts, eps, sweep_config(c));
      });
      stage("write sweep", log, [&] {
        const std::string name =
            cfg.model == ModelId::Kpp ? "sweep_k" + tag(k) + "_eps" + tag(eps) + ".csv"
                                      : "sweep_eps" + tag(eps) + ".csv";
        CsvWriter w(out / name,
                    {"dt", "t_minus_strang", "t_minus_shifted", "strang_minus_shifted"});
        std::vector<std::pair<double, double>> a, b, s;
        for (const SweepRow& r : sweep.rows) {
          w << r.dt << r.t_minus_strang << r.t_minus_shifted << r.strang_minus_shifted;
          w.end_row();
          a.emplace_back(r.dt, r.t_minus_strang);
          b.emplace_back(r.dt, r.t_minus_shifted);
          s.emplace_back(r.dt, r.strang_minus_shifted);
        }
        w.commit();
        summary << k << eps << order_slope(a) << order_slope(b) << order_slope(s);
        summary.end_row();
      });
    }
  }
  summary.commit();
}

void command_study_dtstar(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  require_kpp(cfg, "study-dtstar");
  const MomentPair moments = stage("theory", log, [&] { return canonical_moments(cfg); });
  CsvWriter w(out / "table.csv",
              {"k", "eps", "dt_star_measured", "dt_star_theory", "relative_gap"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const RunConfig& c : study_cases(cfg)) {
    const ModelSpec model = stage("setup", log, [&] { return c.make_model(); });
    const FieldState u0 = stage("setup", log, [&] { return c.initial_state(); });
    for (double eps : cfg.study.eps) {
      const double theory = dt_star_theory(moments.m1, moments.m2, eps, c.kpp.k);
      const std::vector<double> dts =
          cfg.study.dts.empty()
              ? log_grid(theory / cfg.study.bracket_below, theory * cfg.study.bracket_above,
                         cfg.study.points)
              : cfg.study.dts;
      const SweepResult sweep = stage("sweep k=" + tag(c.kpp.k) + " eps=" + tag(eps), log, [&] {
        return local_error_sweep(model, u0, dts, eps, sweep_config(c));
      });
      const std::optional<double> measured = measure_dt_star(sweep);
      const double m = measured ? *measured : nan;
      w << c.kpp.k << eps << m << theory << (m - theory) / theory;
      w.end_row();
      log << "k=" << c.kpp.k << " eps=" << eps << " measured " << m << " theory " << theory
          << "\n";
    }
  }
  stage("write table", log, [&] { w.commit(); });
}

void command_theory(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  require_kpp(cfg, "theory");
  const MomentPair moments = stage("theory", log, [&] { return canonical_moments(cfg); });
  CsvWriter table(out / "theory.csv", {"k", "eps", "M1", "M2", "dt_star_theory"});
  for (const RunConfig& c : study_cases(cfg)) {
    for (double eps : cfg.study.eps) {
      table << c.kpp.k << eps << moments.m1 << moments.m2
            << dt_star_theory(moments.m1, moments.m2, eps, c.kpp.k);
      table.end_row();
    }
    stage("profiles k=" + tag(c.kpp.k), log, [&] {
      const FieldState u0 = c.initial_state();
      const ModelSpec model = c.make_model();
      std::vector<std::string> header{"x", "u0"};
      std::vector<std::vector<double>> columns;
      for (double eps : cfg.study.eps) {
        header.push_back("leading_eps" + tag(eps));
        columns.push_back(leading_error_strang(u0.row(0), u0.grid().dx(), *model.scalar, c.kpp.k,
                                               c.kpp.diffusion, eps, cfg.study.profile_time));
      }
      CsvWriter w(out / ("profiles_k" + tag(c.kpp.k) + ".csv"), header);
      for (std::size_t i = 0; i < u0.points(); ++i) {
        w << u0.grid().x(i) << u0(0, i);
        for (const auto& col : columns) w << col[i];
        w.end_row();
      }
      w.commit();
    });
  }
  stage("write theory", log, [&] { table.commit(); });
}

}  // namespace

void run_subcommand(const std::string& name, const RunConfig& cfg, const fs::path& out,
                    std::ostream& log) {
  stage("output", log, [&] { fs::create_directories(out); });
  for (const std::string& w : cfg.warnings) log << "warning: " << w << "\n";
  if (name == "run") {
    command_run(cfg, out, log);
  } else if (name == "study-order") {
    command_study_order(cfg, out, log);
  } else if (name == "study-dtstar") {
    command_study_dtstar(cfg, out, log);
  } else if (name == "reference") {
    command_reference(cfg, out, log);
  } else if (name == "theory") {
    command_theory(cfg, out, log);
  } else {
    throw StageError("setup", "unknown subcommand '" + name + "'");
  }
}

}  // namespace adsplit
