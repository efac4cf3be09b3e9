#include <algorithm>
#include <cmath>

#include "adsplit/analysis.hpp"
#include "adsplit/diffusion.hpp"
#include "adsplit/errors.hpp"
#include "adsplit/splitting.hpp"

namespace adsplit {

namespace {

double increment_distance(const FieldState& a, const FieldState& b, const FieldState& u0,
                          const ModelSpec& model, const NormSpec& norm) {
  double e = 0.0;
  for (std::size_t j : model.monitored) {
    e = std::max(e, normalized_l2_diff(a.row(j), b.row(j), u0.row(j), norm));
  }
  return e;
}

}  // namespace

SweepResult local_error_sweep(const ModelSpec& model, const FieldState& u0,
                              const std::vector<double>& dts, double eps, const SweepConfig& cfg) {
  model.validate();
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0)) throw DomainError("local_error_sweep: steps must be positive");
    if (i > 0 && !(dts[i] > dts[i - 1])) throw DomainError("local_error_sweep: steps must increase");
  }
  const DiffusionOperator diffusion(u0.grid(), model.diffusion);
  const SplitContext ctx{model, diffusion, cfg.reaction};
  const SchemeId strang = SchemeId::make(SchemeKind::Strang2);
  const SchemeId shifted = SchemeId::make(SchemeKind::Strang2Shifted, eps);
  const FieldState zero(u0.grid(), u0.species(), u0.time());

  SweepResult out{eps, {}};
  for (double dt : dts) {
    const FieldState exact = reference_solve(model, zero, u0.time() + dt, cfg.reference, &u0);
    const FieldState s2 = apply_scheme(strang, zero, ctx, dt, &u0);
    const FieldState s2e = apply_scheme(shifted, zero, ctx, dt, &u0);
    out.rows.push_back({dt, increment_distance(exact, s2, u0, model, cfg.norm),
                        increment_distance(exact, s2e, u0, model, cfg.norm),
                        increment_distance(s2, s2e, u0, model, cfg.norm)});
  }
  return out;
}

std::optional<double> measure_dt_star(const SweepResult& sweep) {
  std::vector<std::pair<double, double>> pts;  // (log dt, log gap)
  for (const SweepRow& r : sweep.rows) {
    if (r.t_minus_strang > 0.0 && r.strang_minus_shifted > 0.0) {
      pts.emplace_back(std::log(r.dt), std::log(r.t_minus_strang) - std::log(r.strang_minus_shifted));
    }
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [x0, d0] = pts[i];
    const auto [x1, d1] = pts[i + 1];
    if (d0 < 0.0 && d1 >= 0.0) return std::exp(x0 + (x1 - x0) * (-d0) / (d1 - d0));
  }
  return std::nullopt;
}

double order_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DimensionError("order_slope: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [dt, e] : points) {
    if (!(dt > 0.0) || !(e > 0.0)) throw DomainError("order_slope: values must be positive");
    sx += std::log(dt);
    sy += std::log(e);
  }
  const double nn = static_cast<double>(points.size());
  const double mx = sx / nn, my = sy / nn;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [dt, e] : points) {
    const double dx = std::log(dt) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("order_slope: abscissae are degenerate");
  return sxy / sxx;
}

std::optional<double> level_crossing(const FieldState& state, std::size_t species, double level) {
  const auto u = state.row(species);
  const Grid1D& g = state.grid();
  for (std::size_t k = u.size() - 1; k-- > 0;) {
    const double a = u[k] - level, b = u[k + 1] - level;
    if (a == 0.0) return g.x(k);
    if ((a < 0.0) != (b < 0.0) && b != 0.0) return g.x(k) + g.dx() * a / (a - b);
  }
  return std::nullopt;
}

std::optional<double> front_speed(const std::vector<FieldState>& snapshots, std::size_t species,
                                  double level) {
  std::vector<std::pair<double, double>> pts;
  for (const FieldState& s : snapshots) {
    const auto x = level_crossing(s, species, level);
    if (!x) return std::nullopt;
    pts.emplace_back(s.time(), *x);
  }
  if (pts.size() < 2) return std::nullopt;
  double mt = 0.0, mx = 0.0;
  for (const auto& [t, x] : pts) {
    mt += t;
    mx += x;
  }
  mt /= static_cast<double>(pts.size());
  mx /= static_cast<double>(pts.size());
  double stt = 0.0, stx = 0.0;
  for (const auto& [t, x] : pts) {
    stt += (t - mt) * (t - mt);
    stx += (t - mt) * (x - mx);
  }
  if (!(stt > 0.0)) return std::nullopt;
  return stx / stt;
}

double max_gradient(const FieldState& state, std::size_t species) {
  const auto u = state.row(species);
  double g = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) g = std::max(g, std::abs(u[k + 1] - u[k]));
  return g / state.grid().dx();
}

}  // namespace adsplit
