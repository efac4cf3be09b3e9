#include "adsplit/reaction.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "adsplit/dense_lu.hpp"
#include "adsplit/errors.hpp"
#include "adsplit/radau5.hpp"

namespace adsplit {

void ReactionSolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("reaction tolerances must be positive");
  if (max_substeps < 1) throw ConfigError("reaction max_substeps must be >= 1");
}

namespace {

RadauOptions radau_options(const ReactionSolverConfig& cfg) {
  RadauOptions o;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  o.max_steps = cfg.max_substeps;
  return o;
}

// u' = f(t, x, base + w) for the increment w (base may be absent).
struct PointProblem {
  const ReactionModel* model;
  double x;
  const double* base;  // m values or nullptr
  std::vector<double> full;

  void rhs(double t, std::span<const double> w, std::span<double> out) {
    model->rates(t, x, shifted(w), out);
  }
  void jacobian(double t, std::span<const double> w, DenseBackend::Jacobian& jac) {
    model->jacobian(t, x, shifted(w), jac);
  }
  std::span<const double> shifted(std::span<const double> w) {
    if (!base) return w;
    for (std::size_t i = 0; i < w.size(); ++i) full[i] = base[i] + w[i];
    return full;
  }
};

// Main branch (m species) stacked over a reduced branch (monitored species),
// integrated in local time s with separate clock origins.
struct StackedProblem {
  const ReactionModel* model;
  const std::vector<std::size_t>* monitored;
  double x;
  double t_main;
  double t_reduced;
  std::size_t m;
  std::vector<double> emb, rate, jac;

  void rhs(double s, std::span<const double> y, std::span<double> out) {
    const std::size_t l = monitored->size();
    model->rates(t_main + s, x, y.first(m), out.first(m));
    std::fill(emb.begin(), emb.end(), 0.0);
    for (std::size_t r = 0; r < l; ++r) emb[(*monitored)[r]] = y[m + r];
    model->rates(t_reduced + s, x, emb, rate);
    for (std::size_t r = 0; r < l; ++r) out[m + r] = rate[(*monitored)[r]];
  }

  void jacobian(double s, std::span<const double> y, DenseBackend::Jacobian& out) {
    const std::size_t l = monitored->size();
    const std::size_t d = m + l;
    std::fill(out.begin(), out.end(), 0.0);
    model->jacobian(t_main + s, x, y.first(m), jac);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) out[i * d + j] = jac[i * m + j];
    }
    std::fill(emb.begin(), emb.end(), 0.0);
    for (std::size_t r = 0; r < l; ++r) emb[(*monitored)[r]] = y[m + r];
    model->jacobian(t_reduced + s, x, emb, jac);
    for (std::size_t r = 0; r < l; ++r) {
      for (std::size_t q = 0; q < l; ++q) {
        out[(m + r) * d + m + q] = jac[(*monitored)[r] * m + (*monitored)[q]];
      }
    }
  }
};

// Runs body(k, solver, work) over all points with one solver and one
// workspace per thread; the failure with the lowest point index is rethrown
// after the loop so the outcome does not depend on the thread schedule.
template <class Work, class MakeWork, class Body>
void for_each_point(std::size_t n, const DenseBackend& backend, const ReactionSolverConfig& cfg,
                    MakeWork make_work, Body body) {
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel
  {
    Radau5<DenseBackend> solver(backend, radau_options(cfg));
    Work work = make_work();
#pragma omp for schedule(dynamic, 64)
    for (std::size_t k = 0; k < n; ++k) {
      try {
        body(k, solver, work);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (k < failed_at) {
          failed_at = k;
          failure = std::current_exception();
        }
      }
    }
  }
  if (!failure) return;
  try {
    std::rethrow_exception(failure);
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (grid point " + std::to_string(failed_at) + ")");
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("reaction solve failed at grid point ") +
                               std::to_string(failed_at) + ": " + e.what(),
                           failed_at);
  }
}

struct PointWork {
  PointProblem prob;
  std::vector<double> y, base;
};

struct StackedWork {
  StackedProblem prob;
  std::vector<double> y;
};

}  // namespace

FieldState react_step(const FieldState& state, const ModelSpec& model, double tau,
                      const ReactionSolverConfig& cfg, const FieldState* anchor) {
  const std::size_t m = state.species();
  if (!model.reaction || model.reaction->species() != m) {
    throw DimensionError("react_step: model and state species differ");
  }
  if (anchor) require_same_shape(state, *anchor);
  if (!std::isfinite(tau)) throw DomainError("react_step: non-finite duration");
  FieldState out = state;
  out.set_time(state.time() + tau);
  if (tau == 0.0) return out;

  const std::size_t n = state.points();
  const double t0 = state.time();
  for_each_point<PointWork>(
      n, DenseBackend(m), cfg,
      [&] {
        return PointWork{{model.reaction.get(), 0.0, nullptr, std::vector<double>(m)},
                         std::vector<double>(m),
                         std::vector<double>(m)};
      },
      [&](std::size_t k, Radau5<DenseBackend>& solver, PointWork& w) {
        for (std::size_t j = 0; j < m; ++j) w.y[j] = state(j, k);
        w.prob.x = state.grid().x(k);
        if (anchor) {
          for (std::size_t j = 0; j < m; ++j) w.base[j] = (*anchor)(j, k);
          w.prob.base = w.base.data();
        }
        solver.integrate(w.prob, t0, t0 + tau, std::span<double>(w.y));
        for (std::size_t j = 0; j < m; ++j) out(j, k) = w.y[j];
      });
  out.require_finite("react_step");
  return out;
}

void react_pair_step(FieldState& main, FieldState& reduced, const ModelSpec& model, double tau,
                     const ReactionSolverConfig& cfg) {
  const std::size_t m = main.species();
  const std::size_t l = model.monitored.size();
  if (reduced.species() != l || !(reduced.grid() == main.grid())) {
    throw DimensionError("react_pair_step: reduced state does not match the monitored set");
  }
  if (tau == 0.0) return;
  const std::size_t n = main.points();
  const std::size_t d = m + l;
  const double t_main = main.time(), t_reduced = reduced.time();
  // The two branches are uncoupled, so the Newton matrix is block-diagonal.
  for_each_point<StackedWork>(
      n, DenseBackend(d, {m, l}), cfg,
      [&] {
        return StackedWork{{model.reaction.get(), &model.monitored, 0.0, t_main, t_reduced, m,
                            std::vector<double>(m), std::vector<double>(m),
                            std::vector<double>(m * m)},
                           std::vector<double>(d)};
      },
      [&](std::size_t k, Radau5<DenseBackend>& solver, StackedWork& w) {
        for (std::size_t j = 0; j < m; ++j) w.y[j] = main(j, k);
        for (std::size_t r = 0; r < l; ++r) w.y[m + r] = reduced(r, k);
        w.prob.x = main.grid().x(k);
        solver.integrate(w.prob, 0.0, tau, std::span<double>(w.y));
        for (std::size_t j = 0; j < m; ++j) main(j, k) = w.y[j];
        for (std::size_t r = 0; r < l; ++r) reduced(r, k) = w.y[m + r];
      });
  main.set_time(t_main + tau);
  reduced.set_time(t_reduced + tau);
  main.require_finite("react_pair_step");
  reduced.require_finite("react_pair_step");
}

}  // namespace adsplit
