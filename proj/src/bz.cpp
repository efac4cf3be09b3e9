#include <cmath>
#include <memory>

#include "adsplit/errors.hpp"
#include "adsplit/models.hpp"

namespace adsplit {

void BzParams::validate() const {
  if (!(eps > 0.0) || !(mu > 0.0) || !(mu < eps)) throw ConfigError("bz: need 0 < mu < eps");
  if (!(q > 0.0) || !(f > 0.0)) throw ConfigError("bz: q and f must be positive");
  for (double d : diffusion) {
    if (!(d >= 0.0)) throw ConfigError("bz: diffusion coefficients must be >= 0");
  }
  if (!(excited_fraction >= 0.0 && excited_fraction < 1.0)) {
    throw ConfigError("bz: excited_fraction must lie in [0, 1)");
  }
  (void)grid();
}

std::array<double, 3> bz_rhs(double a, double b, double c, const BzParams& p) {
  return {(-p.q * a - a * b + p.f * c) / p.mu, (p.q * a - a * b + b * (1.0 - b)) / p.eps, b - c};
}

std::array<double, 9> bz_jacobian(double a, double b, double, const BzParams& p) {
  return {(-p.q - b) / p.mu, -a / p.mu,       p.f / p.mu,  //
          (p.q - b) / p.eps, (-a + 1.0 - 2.0 * b) / p.eps, 0.0,  //
          0.0,               1.0,              -1.0};
}

std::array<double, 3> bz_rest_state(const BzParams& p) {
  // With a slaved (a = f c/(q+b)) and c = b: b^2 + (f - 1 + q) b - q (f + 1) = 0.
  const double bb = p.f - 1.0 + p.q;
  const double b = 0.5 * (-bb + std::sqrt(bb * bb + 4.0 * p.q * (p.f + 1.0)));
  return {p.f * b / (p.q + b), b, b};
}

namespace {

class BzReaction final : public ReactionModel {
 public:
  explicit BzReaction(BzParams p) : p_(p) {}
  std::size_t species() const noexcept override { return 3; }
  void rates(double, double, std::span<const double> u, std::span<double> out) const override {
    const auto r = bz_rhs(u[0], u[1], u[2], p_);
    out[0] = r[0];
    out[1] = r[1];
    out[2] = r[2];
  }
  void jacobian(double, double, std::span<const double> u, std::span<double> jac) const override {
    const auto j = bz_jacobian(u[0], u[1], u[2], p_);
    for (std::size_t i = 0; i < 9; ++i) jac[i] = j[i];
  }

 private:
  BzParams p_;
};

}  // namespace

ModelSpec make_bz_model(const BzParams& p) {
  p.validate();
  ModelSpec spec;
  spec.names = {"a", "b", "c"};
  spec.diffusion = {p.diffusion[0], p.diffusion[1], p.diffusion[2]};
  spec.reaction = std::make_shared<BzReaction>(p);
  spec.monitored = {0, 1, 2};
  return spec;
}

FieldState bz_initial_state(const BzParams& p) {
  p.validate();
  const Grid1D g = p.grid();
  const auto rest = bz_rest_state(p);
  const double edge = p.x_min + p.excited_fraction * (p.x_max - p.x_min);
  FieldState s(g, 3, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const bool excited = g.x(k) <= edge;
    const double b = excited ? p.excited_b : rest[1];
    const double c = excited ? p.excited_c.value_or(rest[2]) : rest[2];
    s(0, k) = p.f * c / (p.q + b);
    s(1, k) = b;
    s(2, k) = c;
  }
  return s;
}

}  // namespace adsplit
