#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adsplit/analysis.hpp"
#include "adsplit/controller.hpp"
#include "adsplit/models.hpp"

namespace adsplit {

enum class ModelId { Kpp, Bz, Discharge };
const char* to_string(ModelId id);

struct StudyConfig {
  std::vector<double> k{1.0, 10.0, 100.0};
  std::vector<double> eps{0.05, 0.005, 0.0005};
  /// Explicit step list for sweeps. Empty: study-order uses a log grid over
  /// [dt_min, dt_max]; study-dtstar brackets the theoretical critical step.
  std::vector<double> dts;
  double dt_min = 1e-4;
  double dt_max = 1e-2;
  std::size_t points = 13;
  /// study-dtstar bracket: [theory / below, theory * above].
  double bracket_below = 10.0;
  double bracket_above = 30.0;
  /// Evaluation time of the leading-term profiles written by `theory`.
  double profile_time = 1e-3;
  /// Reaction and reference tolerance used by the sweeps; their differences
  /// go down to 1e-12, far below the run-time defaults.
  double tolerance = 1e-14;
};

struct RunConfig {
  ModelId model = ModelId::Kpp;
  KppParams kpp;
  BzParams bz;
  DischargeParams discharge;
  /// Species names to monitor; empty keeps the model default.
  std::vector<std::string> monitored;

  double t0 = 0.0;
  double t_end = 1.0;
  std::vector<double> snapshot_times;

  ControllerConfig controller;
  ReactionSolverConfig reaction;
  ReferenceConfig reference;
  NormSpec norm;

  std::string out_dir;
  /// `run` also integrates the coupled reference and reports final errors.
  bool compare_reference = true;

  StudyConfig study;

  /// Warnings collected during validation.
  std::vector<std::string> warnings;

  ModelSpec make_model() const;
  FieldState initial_state() const;
  /// Throws ConfigError naming the violated invariant.
  void validate();
};

/// Parses commented JSON text. Empty input yields all defaults.
/// Throws ConfigError with line/column or key path.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Every setting with its default value, in the accepted file layout.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace adsplit
