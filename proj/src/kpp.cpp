#include <cmath>
#include <memory>

#include "adsplit/errors.hpp"
#include "adsplit/models.hpp"

namespace adsplit {

void KppParams::validate() const {
  if (!(k > 0.0) || !(diffusion > 0.0)) throw ConfigError("kpp: k and D must be positive");
  (void)grid();
}

std::array<double, 5> kpp_rhs(double u, const KppParams& p) {
  const double k = p.k;
  return {k * u * u * (1.0 - u), k * (2.0 * u - 3.0 * u * u), k * (2.0 - 6.0 * u), -6.0 * k, 0.0};
}

double kpp_exact_front(double x, double t, const KppParams& p) {
  const double r = std::sqrt(p.k / p.diffusion) * x;
  const double tau = p.k * t;
  return 1.0 / (1.0 + std::exp((r - tau / std::sqrt(2.0)) / std::sqrt(2.0)));
}

namespace {

class KppReaction final : public ReactionModel, public ScalarReaction {
 public:
  explicit KppReaction(KppParams p) : p_(p) {}
  std::size_t species() const noexcept override { return 1; }
  void rates(double, double, std::span<const double> u, std::span<double> out) const override {
    out[0] = p_.k * u[0] * u[0] * (1.0 - u[0]);
  }
  void jacobian(double, double, std::span<const double> u, std::span<double> jac) const override {
    jac[0] = p_.k * (2.0 * u[0] - 3.0 * u[0] * u[0]);
  }
  std::array<double, 5> derivatives(double u) const override { return kpp_rhs(u, p_); }

 private:
  KppParams p_;
};

}  // namespace

ModelSpec make_kpp_model(const KppParams& p) {
  p.validate();
  auto reaction = std::make_shared<KppReaction>(p);
  ModelSpec spec;
  spec.names = {"u"};
  spec.diffusion = {p.diffusion};
  spec.reaction = reaction;
  spec.scalar = reaction;
  spec.monitored = {0};
  return spec;
}

FieldState kpp_initial_state(const KppParams& p, double t) {
  const Grid1D g = p.grid();
  FieldState s(g, 1, t);
  for (std::size_t k = 0; k < g.size(); ++k) s(0, k) = kpp_exact_front(g.x(k), t, p);
  return s;
}

}  // namespace adsplit
