#include "adsplit/field_state.hpp"

#include <cmath>
#include <string>

#include "adsplit/errors.hpp"

namespace adsplit {

FieldState::FieldState(Grid1D grid, std::size_t species, double t)
    : grid_(grid), m_(species), t_(t), values_(species * grid.size(), 0.0) {
  if (species == 0) throw DimensionError("a field needs at least one species");
}

FieldState::FieldState(Grid1D grid, std::size_t species, double t, std::vector<double> values)
    : grid_(grid), m_(species), t_(t), values_(std::move(values)) {
  if (species == 0) throw DimensionError("a field needs at least one species");
  if (values_.size() != species * grid.size()) {
    throw DimensionError("field values: expected " + std::to_string(species * grid.size()) +
                         " entries, got " + std::to_string(values_.size()));
  }
}

bool FieldState::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void FieldState::require_finite(const char* context) const {
  if (!all_finite()) throw NumericError(std::string(context) + ": non-finite value in field");
}

void require_same_shape(const FieldState& a, const FieldState& b) {
  if (!(a.grid() == b.grid()) || a.species() != b.species()) {
    throw DimensionError("field states differ in grid or species count");
  }
}

}  // namespace adsplit
