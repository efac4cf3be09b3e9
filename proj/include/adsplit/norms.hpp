#pragma once

#include <span>

#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"

namespace adsplit {

struct NormSpec {
  double floor = 1e-30;
};

/// sqrt(mean(v^2)), summed left to right.
double rms(std::span<const double> v);

/// rms(a - b) / max(rms(ref), floor).
double normalized_l2_diff(std::span<const double> a, std::span<const double> b,
                          std::span<const double> ref, const NormSpec& norm);

/// Largest normalized difference over the monitored species.
double monitored_err(const FieldState& a, const FieldState& b, const FieldState& ref,
                     const ModelSpec& model, const NormSpec& norm);

/// As monitored_err, but `reduced` holds only the monitored rows, in order.
double monitored_err_reduced(const FieldState& full, const FieldState& reduced,
                             const FieldState& ref, const ModelSpec& model, const NormSpec& norm);

}  // namespace adsplit
