#include "adsplit/diffusion.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "adsplit/errors.hpp"

namespace adsplit {

namespace {
// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct DiffusionOperator::Plan {
  fftw_plan dct = nullptr;
  ~Plan() {
    if (dct) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(dct);
    }
  }
};

DiffusionOperator::DiffusionOperator(Grid1D grid, std::vector<double> coefficients)
    : grid_(grid), coeff_(std::move(coefficients)), plan_(std::make_unique<Plan>()) {
  for (double d : coeff_) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("diffusion coefficients must be >= 0");
  }
  const std::size_t n = grid_.size();
  const double dx = grid_.dx();
  lambda_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n - 1));
    // 1 - cos(2a) = 2 sin^2(a) avoids cancellation for the slow modes.
    lambda_[j] = -(4.0 / (dx * dx)) * s * s;
  }
  std::vector<double> in(n), out(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_->dct = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_REDFT00,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_->dct) throw NumericError("could not create the cosine transform plan");
}

DiffusionOperator::~DiffusionOperator() = default;

void DiffusionOperator::transform(const double* in, double* out) const {
  fftw_execute_r2r(plan_->dct, const_cast<double*>(in), out);
}

void DiffusionOperator::apply(std::span<double> row, double coeff, double tau) const {
  if (tau < 0.0) throw DomainError("diffusion cannot run backwards in time");
  if (coeff == 0.0 || tau == 0.0) return;
  const std::size_t n = grid_.size();
  std::vector<double> spec(n);
  transform(row.data(), spec.data());
  const double scale = 1.0 / (2.0 * static_cast<double>(n - 1));
  for (std::size_t j = 0; j < n; ++j) spec[j] *= std::exp(tau * coeff * lambda_[j]) * scale;
  transform(spec.data(), row.data());
}

void DiffusionOperator::apply_increment(std::span<const double> base, std::span<double> delta,
                                        double coeff, double tau) const {
  if (tau < 0.0) throw DomainError("diffusion cannot run backwards in time");
  if (coeff == 0.0 || tau == 0.0) return;
  const std::size_t n = grid_.size();
  std::vector<double> sb(n), sd(n);
  transform(base.data(), sb.data());
  transform(delta.data(), sd.data());
  const double scale = 1.0 / (2.0 * static_cast<double>(n - 1));
  for (std::size_t j = 0; j < n; ++j) {
    const double z = tau * coeff * lambda_[j];
    sd[j] = (std::expm1(z) * sb[j] + std::exp(z) * sd[j]) * scale;
  }
  transform(sd.data(), delta.data());
}

void DiffusionOperator::laplacian(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = grid_.size();
  const double inv = 1.0 / (grid_.dx() * grid_.dx());
  out[0] = 2.0 * (in[1] - in[0]) * inv;
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (in[k + 1] - 2.0 * in[k] + in[k - 1]) * inv;
  out[n - 1] = 2.0 * (in[n - 2] - in[n - 1]) * inv;
}

FieldState diffuse_step(const FieldState& state, const DiffusionOperator& op, double tau,
                        const FieldState* anchor) {
  if (!(state.grid() == op.grid())) throw DimensionError("diffuse_step: grid mismatch");
  if (op.coefficients().size() != state.species()) {
    throw DimensionError("diffuse_step: one coefficient per species is required");
  }
  if (!(tau >= 0.0)) throw DomainError("diffuse_step: negative duration");
  if (anchor) require_same_shape(state, *anchor);
  FieldState out = state;
  for (std::size_t j = 0; j < state.species(); ++j) {
    if (anchor) op.apply_increment(anchor->row(j), out.row(j), op.coefficients()[j], tau);
    else op.apply(out.row(j), op.coefficients()[j], tau);
  }
  out.require_finite("diffuse_step");
  return out;
}

}  // namespace adsplit
