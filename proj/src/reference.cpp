#include <algorithm>
#include <cmath>
#include <vector>

#include "adsplit/analysis.hpp"
#include "adsplit/banded.hpp"
#include "adsplit/errors.hpp"
#include "adsplit/radau5.hpp"

namespace adsplit {

namespace {

// Point-major unknowns y[k*m + j]; u = base + y when a base is given.
class MethodOfLines {
 public:
  MethodOfLines(const ModelSpec& model, const Grid1D& grid, const FieldState* base)
      : model_(model), grid_(grid), m_(model.species()), n_(grid.size()),
        inv_dx2_(1.0 / (grid.dx() * grid.dx())), u_(m_), f_(m_), jac_(m_ * m_) {
    if (base) {
      base_.resize(m_ * n_);
      base_lap_.resize(m_ * n_);
      for (std::size_t k = 0; k < n_; ++k) {
        for (std::size_t j = 0; j < m_; ++j) base_[k * m_ + j] = (*base)(j, k);
      }
      laplacian(base_, base_lap_);
    }
  }

  void rhs(double t, std::span<const double> y, std::span<double> out) {
    laplacian(y, out);
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t j = 0; j < m_; ++j) {
        const std::size_t i = k * m_ + j;
        double diff = out[i];
        if (!base_.empty()) diff += base_lap_[i];
        out[i] = model_.diffusion[j] * diff;
        u_[j] = base_.empty() ? y[i] : base_[i] + y[i];
      }
      model_.reaction->rates(t, grid_.x(k), u_, f_);
      for (std::size_t j = 0; j < m_; ++j) out[k * m_ + j] += f_[j];
    }
  }

  void jacobian(double t, std::span<const double> y, BandMatrix& jac) {
    jac.zero();
    const double c = inv_dx2_;
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t j = 0; j < m_; ++j) {
        const std::size_t i = k * m_ + j;
        u_[j] = base_.empty() ? y[i] : base_[i] + y[i];
      }
      model_.reaction->jacobian(t, grid_.x(k), u_, jac_);
      for (std::size_t a = 0; a < m_; ++a) {
        for (std::size_t b = 0; b < m_; ++b) jac.at(k * m_ + a, k * m_ + b) = jac_[a * m_ + b];
      }
      for (std::size_t j = 0; j < m_; ++j) {
        const double d = model_.diffusion[j];
        const std::size_t i = k * m_ + j;
        jac.at(i, i) -= 2.0 * d * c;
        if (k == 0) {
          jac.at(i, i + m_) += 2.0 * d * c;
        } else if (k == n_ - 1) {
          jac.at(i, i - m_) += 2.0 * d * c;
        } else {
          jac.at(i, i + m_) += d * c;
          jac.at(i, i - m_) += d * c;
        }
      }
    }
  }

 private:
  void laplacian(std::span<const double> y, std::span<double> out) const {
    const std::size_t m = m_, n = n_;
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = 2.0 * (y[m + j] - y[j]) * inv_dx2_;
      const std::size_t last = (n - 1) * m + j;
      out[last] = 2.0 * (y[last - m] - y[last]) * inv_dx2_;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = k * m + j;
        out[i] = (y[i + m] - 2.0 * y[i] + y[i - m]) * inv_dx2_;
      }
    }
  }

  const ModelSpec& model_;
  Grid1D grid_;
  std::size_t m_, n_;
  double inv_dx2_;
  std::vector<double> base_, base_lap_;
  std::vector<double> u_, f_, jac_;
};

}  // namespace

FieldState reference_solve(const ModelSpec& model, const FieldState& u0, double t_end,
                           const ReferenceConfig& cfg, const FieldState* anchor) {
  model.validate();
  if (u0.species() != model.species()) throw DimensionError("reference_solve: species mismatch");
  if (anchor) require_same_shape(u0, *anchor);
  const double t0 = u0.time();
  if (t_end < t0) throw DomainError("reference_solve: final time precedes the initial time");
  FieldState out = u0;
  out.set_time(t_end);
  if (t_end == t0) return out;

  const std::size_t m = model.species(), n = u0.points();
  std::vector<double> y(m * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < m; ++j) y[k * m + j] = u0(j, k);
  }
  MethodOfLines mol(model, u0.grid(), anchor);
  RadauOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  opts.max_steps = cfg.max_steps;
  Radau5<BandedBackend> solver(BandedBackend(m * n, m, m), opts);

  std::vector<double> stops;
  for (double b : model.breakpoints) {
    if (b > t0 && b < t_end) stops.push_back(b);
  }
  std::sort(stops.begin(), stops.end());
  stops.push_back(t_end);
  double t = t0;
  for (double s : stops) {
    RadauOptions seg = opts;
    seg.initial_step = cfg.initial_step > 0.0 ? cfg.initial_step : 1e-4 * (s - t);
    solver.set_options(seg);
    try {
      solver.integrate(mol, t, s, y);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string("reference solve: ") + e.what());
    }
    t = s;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < m; ++j) out(j, k) = y[k * m + j];
  }
  out.require_finite("reference_solve");
  return out;
}

}  // namespace adsplit
