#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"

namespace testing {

inline adsplit::ModelSpec linear_model(std::size_t m, std::vector<double> matrix,
                                       std::vector<double> diffusion,
                                       std::vector<std::size_t> monitored = {}) {
  adsplit::ModelSpec spec;
  for (std::size_t j = 0; j < m; ++j) spec.names.push_back("u" + std::to_string(j));
  spec.diffusion = std::move(diffusion);
  spec.reaction = std::make_shared<adsplit::LinearReaction>(m, std::move(matrix));
  if (monitored.empty()) {
    for (std::size_t j = 0; j < m; ++j) monitored.push_back(j);
  }
  spec.monitored = std::move(monitored);
  return spec;
}

/// Smooth bump on every row, distinct per species.
inline adsplit::FieldState smooth_state(const adsplit::Grid1D& g, std::size_t m, double t = 0.0) {
  adsplit::FieldState s(g, m, t);
  const double mid = 0.5 * (g.x_min() + g.x_max());
  const double w = 0.15 * (g.x_max() - g.x_min());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double z = (g.x(k) - mid) / w;
      s(j, k) = 0.5 + (1.0 + 0.3 * j) * std::exp(-z * z);
    }
  }
  return s;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace testing
