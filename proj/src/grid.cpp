#include "adsplit/grid.hpp"

#include <cmath>

#include "adsplit/errors.hpp"

namespace adsplit {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < 3) throw DimensionError("grid needs at least 3 points");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw DomainError("grid bounds must be finite with x_max > x_min");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

}  // namespace adsplit
