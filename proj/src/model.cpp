#include "adsplit/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "adsplit/errors.hpp"

namespace adsplit {

LinearReaction::LinearReaction(std::size_t m, std::vector<double> matrix)
    : m_(m), a_(std::move(matrix)) {
  if (m == 0 || a_.size() != m * m) throw DimensionError("linear reaction matrix must be m x m");
}

std::shared_ptr<LinearReaction> LinearReaction::scalar(double rate) {
  return std::make_shared<LinearReaction>(1, std::vector<double>{rate});
}

void LinearReaction::rates(double, double, std::span<const double> u,
                           std::span<double> dudt) const {
  for (std::size_t i = 0; i < m_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m_; ++j) s += a_[i * m_ + j] * u[j];
    dudt[i] = s;
  }
}

void LinearReaction::jacobian(double, double, std::span<const double>,
                              std::span<double> jac) const {
  std::copy(a_.begin(), a_.end(), jac.begin());
}

std::array<double, 5> LinearReaction::derivatives(double u) const {
  return {a_[0] * u, a_[0], 0.0, 0.0, 0.0};
}

void ModelSpec::validate() const {
  const std::size_t m = names.size();
  if (m == 0) throw ConfigError("model has no species");
  if (diffusion.size() != m) throw ConfigError("one diffusion coefficient per species is required");
  for (double d : diffusion) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("diffusion coefficients must be >= 0");
  }
  if (!reaction) throw ConfigError("model has no reaction term");
  if (reaction->species() != m) throw ConfigError("reaction species count differs from model");
  if (monitored.empty()) throw ConfigError("monitored species set is empty");
  std::vector<std::size_t> sorted = monitored;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("monitored species listed twice");
  }
  if (sorted.back() >= m) throw ConfigError("monitored species index out of range");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].reset_dt > 0.0)) throw ConfigError("event reset step must be positive");
    if (i > 0 && !(events[i].time > events[i - 1].time)) {
      throw ConfigError("event times must be strictly increasing");
    }
  }
}

namespace {

class MonitoredReaction final : public ReactionModel {
 public:
  MonitoredReaction(std::shared_ptr<const ReactionModel> full, std::vector<std::size_t> keep)
      : full_(std::move(full)), keep_(std::move(keep)) {}

  std::size_t species() const noexcept override { return keep_.size(); }

  void rates(double t, double x, std::span<const double> u, std::span<double> dudt) const override {
    const std::size_t m = full_->species();
    std::vector<double> buf(2 * m, 0.0);
    for (std::size_t r = 0; r < keep_.size(); ++r) buf[keep_[r]] = u[r];
    full_->rates(t, x, std::span<const double>(buf.data(), m), std::span<double>(buf.data() + m, m));
    for (std::size_t r = 0; r < keep_.size(); ++r) dudt[r] = buf[m + keep_[r]];
  }

  void jacobian(double t, double x, std::span<const double> u, std::span<double> jac) const override {
    const std::size_t m = full_->species();
    const std::size_t l = keep_.size();
    std::vector<double> state(m, 0.0), full_jac(m * m);
    for (std::size_t r = 0; r < l; ++r) state[keep_[r]] = u[r];
    full_->jacobian(t, x, state, full_jac);
    for (std::size_t r = 0; r < l; ++r) {
      for (std::size_t s = 0; s < l; ++s) jac[r * l + s] = full_jac[keep_[r] * m + keep_[s]];
    }
  }

 private:
  std::shared_ptr<const ReactionModel> full_;
  std::vector<std::size_t> keep_;
};

}  // namespace

ModelSpec restrict_to_monitored(const ModelSpec& model) {
  if (model.monitors_all()) {
    // Identity restriction keeps the original species order.
    bool ordered = true;
    for (std::size_t r = 0; r < model.monitored.size(); ++r) ordered = ordered && model.monitored[r] == r;
    if (ordered) return model;
  }
  ModelSpec reduced;
  for (std::size_t j : model.monitored) {
    reduced.names.push_back(model.names[j]);
    reduced.diffusion.push_back(model.diffusion[j]);
  }
  reduced.reaction = std::make_shared<MonitoredReaction>(model.reaction, model.monitored);
  for (std::size_t r = 0; r < model.monitored.size(); ++r) reduced.monitored.push_back(r);
  reduced.events = model.events;
  reduced.breakpoints = model.breakpoints;
  return reduced;
}

FieldState extract_monitored(const FieldState& state, const ModelSpec& model) {
  FieldState out(state.grid(), model.monitored.size(), state.time());
  for (std::size_t r = 0; r < model.monitored.size(); ++r) {
    const auto src = state.row(model.monitored[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace adsplit
