#pragma once

#include <cstddef>

namespace adsplit {

/// Uniform 1D grid with n >= 3 nodes including both end points.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t k) const noexcept { return x_min_ + static_cast<double>(k) * dx_; }

  bool operator==(const Grid1D& other) const noexcept {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

}  // namespace adsplit
