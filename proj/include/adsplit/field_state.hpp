#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adsplit/grid.hpp"

namespace adsplit {

/// m species sampled on a grid at time t. Storage is species-major: row j
/// holds species j at every grid point.
class FieldState {
 public:
  FieldState(Grid1D grid, std::size_t species, double t = 0.0);
  FieldState(Grid1D grid, std::size_t species, double t, std::vector<double> values);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t species() const noexcept { return m_; }
  std::size_t points() const noexcept { return grid_.size(); }
  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  std::span<double> row(std::size_t j) { return {values_.data() + j * points(), points()}; }
  std::span<const double> row(std::size_t j) const {
    return {values_.data() + j * points(), points()};
  }
  double& operator()(std::size_t j, std::size_t k) { return values_[j * points() + k]; }
  double operator()(std::size_t j, std::size_t k) const { return values_[j * points() + k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const noexcept;
  /// Throws NumericError naming `context` if any entry is NaN or infinite.
  void require_finite(const char* context) const;

 private:
  Grid1D grid_;
  std::size_t m_;
  double t_;
  std::vector<double> values_;
};

/// Throws DimensionError unless both states share grid and species count.
void require_same_shape(const FieldState& a, const FieldState& b);

}  // namespace adsplit
