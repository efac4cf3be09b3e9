#pragma once

#include <memory>
#include <span>
#include <vector>

#include "adsplit/field_state.hpp"
#include "adsplit/grid.hpp"

namespace adsplit {

/// Exact exponential of D * L where L is the 3-point Laplacian with mirror
/// (zero-flux) closure. L is diagonalized by the type-I discrete cosine
/// transform; mode j has eigenvalue -(2/dx^2)(1 - cos(j pi / (n-1))).
///
/// The conserved discrete mean is the trapezoidal one (end points weighted 1/2).
class DiffusionOperator {
 public:
  DiffusionOperator(Grid1D grid, std::vector<double> coefficients);
  ~DiffusionOperator();
  DiffusionOperator(const DiffusionOperator&) = delete;
  DiffusionOperator& operator=(const DiffusionOperator&) = delete;

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<double>& coefficients() const noexcept { return coeff_; }
  double eigenvalue(std::size_t mode) const { return lambda_.at(mode); }

  /// row <- exp(tau * coeff * L) row.
  void apply(std::span<double> row, double coeff, double tau) const;
  /// With u = base + delta: delta <- exp(tau coeff L)(base + delta) - base.
  void apply_increment(std::span<const double> base, std::span<double> delta, double coeff,
                       double tau) const;
  /// Applies L (no coefficient) to `in`.
  void laplacian(std::span<const double> in, std::span<double> out) const;

 private:
  void transform(const double* in, double* out) const;

  Grid1D grid_;
  std::vector<double> coeff_;
  std::vector<double> lambda_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

/// X^tau for every species; time is not advanced (it tracks the reaction clock).
/// `anchor` has the same meaning as in react_step.
FieldState diffuse_step(const FieldState& state, const DiffusionOperator& op, double tau,
                        const FieldState* anchor = nullptr);

}  // namespace adsplit
