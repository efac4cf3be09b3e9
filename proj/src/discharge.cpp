#include <atomic>
#include <cmath>
#include <memory>

#include "adsplit/errors.hpp"
#include "adsplit/models.hpp"

namespace adsplit {

namespace {
std::atomic<std::size_t> g_clamps{0};

double clamp_density(double v) {
  if (v < 0.0) {
    g_clamps.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return v;
}
}  // namespace

std::size_t discharge_clamp_count() { return g_clamps.load(); }

void DischargeParams::validate() const {
  if (!(gap > 0.0)) throw ConfigError("discharge: gap must be positive");
  if (!(seed_begin >= 0.0 && seed_end > seed_begin && seed_end <= gap)) {
    throw ConfigError("discharge: seed region must lie inside the gap");
  }
  if (!(pulse_duration > 0.0 && pulse_duration < period)) {
    throw ConfigError("discharge: need 0 < pulse duration < period");
  }
  if (!(field_pulse >= 0.0) || !(diffusion >= 0.0)) throw ConfigError("discharge: field and D must be >= 0");
  if (!(ionization_prefactor >= 0.0 && ionization_field >= 0.0 && attachment_rate >= 0.0 &&
        beta_ep >= 0.0 && beta_np >= 0.0)) {
    throw ConfigError("discharge: rate coefficients must be >= 0");
  }
  if (!(seed_density >= 0.0 && seed_width > 0.0 && background_density >= 0.0)) {
    throw ConfigError("discharge: invalid seed");
  }
  (void)grid();
}

double DischargeParams::ionization(double field) const {
  if (!(field > 0.0)) return 0.0;
  return ionization_prefactor * std::exp(-ionization_field / field);
}

double DischargeParams::attachment(double field) const {
  if (!(field > 0.0) || field_pulse == 0.0) return 0.0;
  return attachment_rate * field / field_pulse;
}

double field_profile(double x, double t, const DischargeParams& p) {
  double phase = std::fmod(t, p.period);
  if (phase < 0.0) phase += p.period;
  const bool on = phase < p.pulse_duration;
  return on && x >= p.seed_begin && x <= p.seed_end ? p.field_pulse : 0.0;
}

std::array<double, 3> discharge_rhs(double ne, double np, double nn, double field,
                                    const DischargeParams& p) {
  ne = clamp_density(ne);
  np = clamp_density(np);
  nn = clamp_density(nn);
  const double ion = p.ionization(field), att = p.attachment(field);
  const double rec_ep = p.beta_ep * ne * np, rec_np = p.beta_np * nn * np;
  const double s = p.recombination == RecombinationSign::AsPrinted ? 1.0 : -1.0;
  return {ion * ne - att * ne + s * rec_ep,  //
          ion * ne - rec_ep + s * rec_np,    //
          att * ne - rec_np};
}

std::array<double, 9> discharge_jacobian(double ne, double np, double nn, double field,
                                         const DischargeParams& p) {
  // Derivatives vanish in the clamped directions.
  const double dne = ne < 0.0 ? 0.0 : 1.0, dnp = np < 0.0 ? 0.0 : 1.0, dnn = nn < 0.0 ? 0.0 : 1.0;
  ne = std::max(ne, 0.0);
  np = std::max(np, 0.0);
  nn = std::max(nn, 0.0);
  const double ion = p.ionization(field), att = p.attachment(field);
  const double be = p.beta_ep, bn = p.beta_np;
  const double s = p.recombination == RecombinationSign::AsPrinted ? 1.0 : -1.0;
  return {(ion - att + s * be * np) * dne, s * be * ne * dnp, 0.0,  //
          (ion - be * np) * dne, (-be * ne + s * bn * nn) * dnp, s * bn * np * dnn,  //
          att * dne, -bn * nn * dnp, -bn * np * dnn};
}

namespace {

class DischargeReaction final : public ReactionModel {
 public:
  explicit DischargeReaction(DischargeParams p) : p_(p) {}
  std::size_t species() const noexcept override { return 3; }
  void rates(double t, double x, std::span<const double> u, std::span<double> out) const override {
    const auto r = discharge_rhs(u[0], u[1], u[2], field_profile(x, t, p_), p_);
    out[0] = r[0];
    out[1] = r[1];
    out[2] = r[2];
  }
  void jacobian(double t, double x, std::span<const double> u, std::span<double> jac) const override {
    const auto j = discharge_jacobian(u[0], u[1], u[2], field_profile(x, t, p_), p_);
    for (std::size_t i = 0; i < 9; ++i) jac[i] = j[i];
  }

 private:
  DischargeParams p_;
};

}  // namespace

ModelSpec make_discharge_model(const DischargeParams& p, double t_end) {
  p.validate();
  ModelSpec spec;
  spec.names = {"n_e", "n_p", "n_n"};
  spec.diffusion = {p.diffusion, p.diffusion, p.diffusion};
  spec.reaction = std::make_shared<DischargeReaction>(p);
  spec.monitored = {0, 1, 2};
  for (int k = 0;; ++k) {
    const double start = k * p.period;
    if (start > t_end) break;
    if (k > 0) spec.events.push_back({start, p.pulse_duration});
    spec.breakpoints.push_back(start);
    if (start + p.pulse_duration <= t_end) spec.breakpoints.push_back(start + p.pulse_duration);
  }
  return spec;
}

FieldState discharge_initial_state(const DischargeParams& p) {
  p.validate();
  const Grid1D g = p.grid();
  FieldState s(g, 3, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double z = (g.x(k) - p.seed_begin) / p.seed_width;
    const double n = p.seed_density * std::exp(-z * z) + p.background_density;
    s(0, k) = n;
    s(1, k) = n;
    s(2, k) = 0.0;
  }
  return s;
}

}  // namespace adsplit
