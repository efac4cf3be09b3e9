#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "adsplit/field_state.hpp"
#include "adsplit/grid.hpp"
#include "adsplit/model.hpp"

namespace adsplit {

// ---------------------------------------------------------------- KPP
// u_t = D u_xx + k u^2 (1 - u)

struct KppParams {
  double k = 1.0;
  double diffusion = 1.0;
  double x_min = -70.0;
  double x_max = 70.0;
  std::size_t n = 5001;

  void validate() const;
  Grid1D grid() const { return Grid1D(x_min, x_max, n); }
};

/// {f, f', f'', f''', f''''} of k u^2 (1 - u).
std::array<double, 5> kpp_rhs(double u, const KppParams& p);

/// Exact traveling front 1 / (1 + exp((r - tau/sqrt 2)/sqrt 2)) with tau = k t
/// and r = sqrt(k/D) x, centered at x = 0 when t = 0.
double kpp_exact_front(double x, double t, const KppParams& p);

ModelSpec make_kpp_model(const KppParams& p);
FieldState kpp_initial_state(const KppParams& p, double t = 0.0);

// ---------------------------------------------------------------- BZ
// a' = (-q a - a b + f c)/mu, b' = (q a - a b + b (1 - b))/eps, c' = b - c

struct BzParams {
  double eps = 1e-2;
  double mu = 1e-5;
  double f = 3.0;
  double q = 2e-4;
  std::array<double, 3> diffusion{1.0, 1.0, 0.6};
  double x_min = 0.0;
  double x_max = 80.0;
  std::size_t n = 4001;
  /// Width of the excited strip at the left end, as a fraction of the domain.
  double excited_fraction = 0.05;
  double excited_b = 1.0;
  /// Unset means the rest value of c; a large c in the strip quenches the pulse.
  std::optional<double> excited_c;

  void validate() const;
  Grid1D grid() const { return Grid1D(x_min, x_max, n); }
};

std::array<double, 3> bz_rhs(double a, double b, double c, const BzParams& p);
/// Row-major 3 x 3.
std::array<double, 9> bz_jacobian(double a, double b, double c, const BzParams& p);
/// Stable homogeneous rest state (a*, b*, c*) with b* = c* > 0.
std::array<double, 3> bz_rest_state(const BzParams& p);

ModelSpec make_bz_model(const BzParams& p);
/// Rest state everywhere except a strip at the left end where b and c are
/// raised; a sits at its quasi-steady value f c / (q + b).
FieldState bz_initial_state(const BzParams& p);

// ---------------------------------------------------------- discharge
// Species n_e, n_p, n_n under a periodically pulsed field in a seed region.

enum class RecombinationSign { AsPrinted, Physical };

struct DischargeParams {
  double gap = 0.5;                 // cm
  double seed_begin = 0.0;          // cm
  double seed_end = 0.01;           // cm
  double field_pulse = 40.0;        // kV/cm
  double pulse_duration = 10e-9;    // s
  double period = 1e-6;             // s
  double diffusion = 50.0;          // cm^2/s
  std::size_t n = 1001;
  double ionization_prefactor = 1.1e8 * 148.4131591025766;  // 1/s, k_i
  double ionization_field = 200.0;  // kV/cm, E_i
  double attachment_rate = 1e7;     // 1/s at field_pulse
  double beta_ep = 2e-7;            // cm^3/s
  double beta_np = 2e-7;            // cm^3/s
  double seed_density = 1e10;       // 1/cm^3 peak
  double seed_width = 0.005;        // cm, Gaussian scale
  double background_density = 0.0;  // 1/cm^3
  RecombinationSign recombination = RecombinationSign::Physical;

  void validate() const;
  Grid1D grid() const { return Grid1D(0.0, gap, n); }
  double ionization(double field) const;
  double attachment(double field) const;
};

/// Rates (dn_e, dn_p, dn_n) at field E. Negative densities are clamped to 0
/// before evaluation.
std::array<double, 3> discharge_rhs(double ne, double np, double nn, double field,
                                    const DischargeParams& p);
std::array<double, 9> discharge_jacobian(double ne, double np, double nn, double field,
                                         const DischargeParams& p);
double field_profile(double x, double t, const DischargeParams& p);
/// Number of reaction evaluations that saw a negative density (all threads).
std::size_t discharge_clamp_count();

ModelSpec make_discharge_model(const DischargeParams& p, double t_end);
FieldState discharge_initial_state(const DischargeParams& p);

}  // namespace adsplit
