#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adsplit/field_state.hpp"
#include "adsplit/model.hpp"
#include "adsplit/norms.hpp"
#include "adsplit/reaction.hpp"

namespace adsplit {

// ------------------------------------------------------ matrix exponential

/// e^{tM} by scaling and squaring around a degree-13 Pade approximant.
Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& m, double t = 1.0);

// ------------------------------------------------- linear commutator check

struct LinearSplitProblem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::VectorXd u0;
};

struct CommutatorCheck {
  Eigen::VectorXd lhs;      ///< e^{t(A+B)}u0 - e^{(1/2-e)tA} e^{tB} e^{(1/2+e)tA} u0
  Eigen::VectorXd leading;  ///< e t^2 [A,B] u0 + t^3/24 ([A,[A,B]] + 2[B,[A,B]]) u0
  double residual_norm;
};

CommutatorCheck commutator_expansion_residual(const LinearSplitProblem& p, double t, double eps);

// ------------------------------------------------ scalar leading-term theory

struct ProfileDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};

/// Fourth-order central differences, one-sided fourth-order closures at the
/// two points next to each end.
ProfileDerivatives profile_derivatives(std::span<const double> u, double dx);

/// Pointwise leading term of T^t u0 - S_eps^t u0 for u_t = D u_xx + k f(u),
/// `f` being the unscaled reaction (rates divided by k).
std::vector<double> leading_error_strang(std::span<const double> u0, double dx,
                                         const ScalarReaction& f, double k, double diffusion,
                                         double eps, double t);

struct MomentPair {
  double m1;
  double m2;
};

/// M1 = ||f''(u0) u0'^2||, M2 = ||(f'f''+f f''')/24 u0'^2 - f''''/12 u0'^4
///   - f'''/3 u0'^2 u0'' - f''/6 u0''^2||, L2 norms as sqrt(sum(.)^2 dx).
MomentPair compute_M1_M2(std::span<const double> u0, double dx, const ScalarReaction& f);

/// eps M1 / (k M2); +inf if M2 == 0.
double dt_star_theory(double m1, double m2, double eps, double k);

// ---------------------------------------------------------- reference solve

struct ReferenceConfig {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t max_steps = 1000000;
  double initial_step = 0.0;
};

/// Coupled method-of-lines integration (reaction and 3-point diffusion
/// together) with Radau IIA on the banded Jacobian. Restarts at the model's
/// breakpoints. With an anchor, `u0` holds increments (see react_step).
FieldState reference_solve(const ModelSpec& model, const FieldState& u0, double t_end,
                           const ReferenceConfig& cfg = {}, const FieldState* anchor = nullptr);

// ------------------------------------------------------------------ sweeps

struct SweepRow {
  double dt;
  double t_minus_strang;   ///< ||T - S2||
  double t_minus_shifted;  ///< ||T - S2,eps||
  double strang_minus_shifted;
};

struct SweepResult {
  double eps;
  std::vector<SweepRow> rows;
};

struct SweepConfig {
  ReactionSolverConfig reaction{1e-14, 1e-14, 1000000};
  ReferenceConfig reference{1e-14, 1e-14, 1000000, 0.0};
  NormSpec norm;
};

/// One step of S2, S2,eps and the coupled reference from u0 for every dt.
/// Differences are computed in increment form, so they stay accurate far
/// below the size of u0 itself. Norms are the maximum over monitored species
/// of rms differences relative to rms(u0).
SweepResult local_error_sweep(const ModelSpec& model, const FieldState& u0,
                              const std::vector<double>& dts, double eps,
                              const SweepConfig& cfg = {});

/// Crossing of ||T - S2|| and ||S2 - S2,eps|| by log-log interpolation;
/// the first crossing from below. nullopt if none.
std::optional<double> measure_dt_star(const SweepResult& sweep);

/// Least-squares slope of log(error) against log(dt).
double order_slope(const std::vector<std::pair<double, double>>& points);

/// Position of the right-most crossing of `level` by species `species`.
std::optional<double> level_crossing(const FieldState& state, std::size_t species, double level);
/// Slope of a least-squares line through (time, crossing position).
std::optional<double> front_speed(const std::vector<FieldState>& snapshots, std::size_t species,
                                  double level);

/// max_k |u_{k+1} - u_k| / dx over species `species`.
double max_gradient(const FieldState& state, std::size_t species);

}  // namespace adsplit
