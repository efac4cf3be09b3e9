#include "adsplit/norms.hpp"

#include <algorithm>
#include <cmath>

#include "adsplit/errors.hpp"

namespace adsplit {

namespace {

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError("norm of a non-finite vector");
  }
}

double rms_of_difference(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

double rms(std::span<const double> v) {
  if (v.empty()) throw DimensionError("rms of an empty vector");
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

double normalized_l2_diff(std::span<const double> a, std::span<const double> b,
                          std::span<const double> ref, const NormSpec& norm) {
  if (a.size() != b.size() || a.size() != ref.size()) {
    throw DimensionError("normalized_l2_diff: length mismatch");
  }
  if (a.empty()) throw DimensionError("normalized_l2_diff: empty vectors");
  if (!(norm.floor > 0.0)) throw ConfigError("norm floor must be positive");
  require_finite(a);
  require_finite(b);
  require_finite(ref);
  return rms_of_difference(a, b) / std::max(rms(ref), norm.floor);
}

double monitored_err(const FieldState& a, const FieldState& b, const FieldState& ref,
                     const ModelSpec& model, const NormSpec& norm) {
  require_same_shape(a, b);
  require_same_shape(a, ref);
  if (model.monitored.empty()) throw ConfigError("monitored species set is empty");
  double err = 0.0;
  for (std::size_t j : model.monitored) {
    if (j >= a.species()) throw DimensionError("monitored species index out of range");
    err = std::max(err, normalized_l2_diff(a.row(j), b.row(j), ref.row(j), norm));
  }
  return err;
}

double monitored_err_reduced(const FieldState& full, const FieldState& reduced,
                             const FieldState& ref, const ModelSpec& model,
                             const NormSpec& norm) {
  require_same_shape(full, ref);
  if (model.monitored.empty()) throw ConfigError("monitored species set is empty");
  if (reduced.species() != model.monitored.size() || !(reduced.grid() == full.grid())) {
    throw DimensionError("reduced state does not match the monitored set");
  }
  double err = 0.0;
  for (std::size_t r = 0; r < model.monitored.size(); ++r) {
    const std::size_t j = model.monitored[r];
    err = std::max(err, normalized_l2_diff(full.row(j), reduced.row(r), ref.row(j), norm));
  }
  return err;
}

}  // namespace adsplit
