#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adsplit/field_state.hpp"

namespace adsplit {

/// Pointwise reaction term u' = f(t, x, u) with its Jacobian.
class ReactionModel {
 public:
  virtual ~ReactionModel() = default;
  virtual std::size_t species() const noexcept = 0;
  virtual void rates(double t, double x, std::span<const double> u, std::span<double> dudt) const = 0;
  /// Row-major m x m matrix of d rates_i / d u_j.
  virtual void jacobian(double t, double x, std::span<const double> u,
                        std::span<double> jac) const = 0;
};

/// Autonomous scalar reaction with derivatives up to fourth order.
class ScalarReaction {
 public:
  virtual ~ScalarReaction() = default;
  /// {f, f', f'', f''', f''''} at u.
  virtual std::array<double, 5> derivatives(double u) const = 0;
};

/// f(u) = M u with a constant matrix, identical at every point.
class LinearReaction final : public ReactionModel, public ScalarReaction {
 public:
  /// `matrix` is row-major m x m.
  LinearReaction(std::size_t m, std::vector<double> matrix);
  static std::shared_ptr<LinearReaction> scalar(double rate);

  std::size_t species() const noexcept override { return m_; }
  void rates(double t, double x, std::span<const double> u, std::span<double> dudt) const override;
  void jacobian(double t, double x, std::span<const double> u, std::span<double> jac) const override;
  /// Only meaningful for m == 1.
  std::array<double, 5> derivatives(double u) const override;

 private:
  std::size_t m_;
  std::vector<double> a_;
};

/// A pulse barrier: no step may straddle `time`; at `time` the step is reset.
struct Event {
  double time;
  double reset_dt;
};

struct ModelSpec {
  std::vector<std::string> names;
  std::vector<double> diffusion;
  std::shared_ptr<const ReactionModel> reaction;
  /// Zero-based indices of the species entering every error norm.
  std::vector<std::size_t> monitored;
  std::vector<Event> events;
  /// Times where f(t, ...) jumps; the coupled reference solver restarts there.
  std::vector<double> breakpoints;
  /// Present for scalar autonomous models only.
  std::shared_ptr<const ScalarReaction> scalar;

  std::size_t species() const noexcept { return names.size(); }
  bool monitors_all() const noexcept { return monitored.size() == names.size(); }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// The subsystem made of the monitored species only. Excluded species are
/// fed to the reaction as zeros, which is exact when the monitored rates do
/// not depend on them.
ModelSpec restrict_to_monitored(const ModelSpec& model);

/// Copies the monitored rows of `state` into a new state.
FieldState extract_monitored(const FieldState& state, const ModelSpec& model);

}  // namespace adsplit
