#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "adsplit/errors.hpp"
#include "adsplit/radau_tableau.hpp"

namespace adsplit {

struct RadauOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t max_steps = 100000;
  /// First trial step; 0 means "the whole interval".
  double initial_step = 0.0;
  double max_step = 0.0;
};

struct RadauStats {
  std::size_t steps = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Radau IIA (3 stages, order 5) with simplified Newton iterations in the
/// transformed variables and the classical embedded third-order error
/// estimate. Tolerances follow the usual Radau5 convention: the user rtol is
/// mapped to 0.1*rtol^(2/3) for the order-3 estimator.
///
/// Backend provides jacobian(), factor_real(s) / factor_complex(s) of
/// s*I - J, and the matching solves. Problem provides
///   rhs(t, span<const double> y, span<double> f)
///   jacobian(t, span<const double> y, Backend::Jacobian&)
/// Integration may run backwards (t1 < t0).
template <class Backend>
class Radau5 {
 public:
  Radau5(Backend backend, RadauOptions options)
      : lin_(std::move(backend)), opt_(options), n_(lin_.size()) {
    for (auto* v : {&z1_, &z2_, &z3_, &w1_, &w2_, &w3_, &f1_, &f2_, &f3_, &f0_, &scal_, &ytmp_,
                    &cont_, &dw1_}) {
      v->assign(n_, 0.0);
    }
    cw_.assign(n_, {0.0, 0.0});
  }

  const RadauOptions& options() const noexcept { return opt_; }
  void set_options(const RadauOptions& o) { opt_ = o; }

  template <class Problem>
  RadauStats integrate(Problem& p, double t0, double t1, std::span<double> y) {
    RadauStats st;
    if (t1 == t0) return st;
    const RadauTableau& tab = RadauTableau::get();
    constexpr double uround = 1e-16;
    constexpr int nit = 7;
    constexpr double safe = 0.9;
    constexpr double facl = 5.0;
    constexpr double facr = 0.125;
    const double posneg = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double rtol = std::max(0.1 * std::pow(opt_.rtol, 2.0 / 3.0), 10.0 * uround);
    const double atol = rtol * (opt_.atol / opt_.rtol);
    const double fnewt = std::max(10.0 * uround / rtol, std::min(0.03, std::sqrt(rtol)));
    const double hmax = opt_.max_step > 0.0 ? std::min(opt_.max_step, span) : span;
    double h = posneg * std::min(opt_.initial_step > 0.0 ? opt_.initial_step : span, hmax);
    const double nd = static_cast<double>(n_);

    double t = t0;
    bool first = true, reject = false, last = false;
    double faccon = 1.0;
    p.rhs(t, y, f0_);
    ++st.rhs_evals;
    require_finite(f0_);

    for (;;) {
      p.jacobian(t, y, lin_.jacobian());
      for (;;) {
        if (st.steps >= opt_.max_steps) {
          throw IntegrationError("Radau5: step limit reached at t=" + std::to_string(t));
        }
        if (std::abs(h) <= 10.0 * uround * std::max(std::abs(t), span)) {
          throw IntegrationError("Radau5: step size underflow at t=" + std::to_string(t));
        }
        if ((t + h * 1.0001 - t1) * posneg >= 0.0) {
          h = t1 - t;
          last = true;
        }
        const double fac1 = tab.gamma / h;
        const std::complex<double> cshift(tab.alpha / h, tab.beta / h);
        if (!lin_.factor_real(fac1) || !lin_.factor_complex(cshift)) {
          h *= 0.5;
          reject = true;
          last = false;
          continue;
        }
        ++st.steps;
        for (std::size_t i = 0; i < n_; ++i) scal_[i] = atol + rtol * std::abs(y[i]);

        // Simplified Newton from zero stage increments.
        std::fill(z1_.begin(), z1_.end(), 0.0);
        std::fill(z2_.begin(), z2_.end(), 0.0);
        std::fill(z3_.begin(), z3_.end(), 0.0);
        std::fill(w1_.begin(), w1_.end(), 0.0);
        std::fill(w2_.begin(), w2_.end(), 0.0);
        std::fill(w3_.begin(), w3_.end(), 0.0);
        faccon = std::pow(std::max(faccon, uround), 0.8);
        int newt = 0;
        double dynold = 0.0, thqold = 0.0;
        bool converged = false;
        double hhfac = 0.5;
        for (;;) {
          if (newt >= nit) break;
          stage_rhs(p, t, h, y, tab, st);
          const double an = tab.alpha / h, bn = tab.beta / h;
          for (std::size_t i = 0; i < n_; ++i) {
            const double g1 = tab.t_inv[0][0] * f1_[i] + tab.t_inv[0][1] * f2_[i] + tab.t_inv[0][2] * f3_[i];
            const double g2 = tab.t_inv[1][0] * f1_[i] + tab.t_inv[1][1] * f2_[i] + tab.t_inv[1][2] * f3_[i];
            const double g3 = tab.t_inv[2][0] * f1_[i] + tab.t_inv[2][1] * f2_[i] + tab.t_inv[2][2] * f3_[i];
            dw1_[i] = g1 - fac1 * w1_[i];
            cw_[i] = {g2 - (an * w2_[i] - bn * w3_[i]), g3 - (bn * w2_[i] + an * w3_[i])};
          }
          lin_.solve_real(dw1_);
          lin_.solve_complex(cw_);
          ++newt;
          double dyno = 0.0;
          for (std::size_t i = 0; i < n_; ++i) {
            const double s = 1.0 / scal_[i];
            const double a = dw1_[i] * s, b = cw_[i].real() * s, c = cw_[i].imag() * s;
            dyno += a * a + b * b + c * c;
          }
          dyno = std::sqrt(dyno / (3.0 * nd));
          if (!std::isfinite(dyno)) throw NumericError("Radau5: non-finite Newton update");
          if (newt > 1 && newt < nit) {
            const double thq = dyno / dynold;
            const double theta = newt == 2 ? thq : std::sqrt(thq * thqold);
            thqold = thq;
            if (theta < 0.99) {
              faccon = theta / (1.0 - theta);
              const double dyth = faccon * dyno * std::pow(theta, nit - 1 - newt) / fnewt;
              if (dyth >= 1.0) {
                const double qnewt = std::clamp(dyth, 1e-4, 20.0);
                hhfac = 0.8 * std::pow(qnewt, -1.0 / (4.0 + nit - 1 - newt));
                break;
              }
            } else {
              hhfac = 0.5;
              break;
            }
          }
          dynold = std::max(dyno, uround);
          for (std::size_t i = 0; i < n_; ++i) {
            w1_[i] += dw1_[i];
            w2_[i] += cw_[i].real();
            w3_[i] += cw_[i].imag();
            z1_[i] = tab.t[0][0] * w1_[i] + tab.t[0][1] * w2_[i] + tab.t[0][2] * w3_[i];
            z2_[i] = tab.t[1][0] * w1_[i] + tab.t[1][1] * w2_[i] + tab.t[1][2] * w3_[i];
            z3_[i] = tab.t[2][0] * w1_[i] + tab.t[2][1] * w2_[i] + tab.t[2][2] * w3_[i];
          }
          if (faccon * dyno <= fnewt) {
            converged = true;
            break;
          }
        }
        if (!converged) {
          h *= hhfac;
          reject = true;
          last = false;
          ++st.rejected;
          continue;
        }

        // Embedded error estimate.
        const double e1 = tab.dd[0] / h, e2 = tab.dd[1] / h, e3 = tab.dd[2] / h;
        for (std::size_t i = 0; i < n_; ++i) {
          f2_[i] = e1 * z1_[i] + e2 * z2_[i] + e3 * z3_[i];
          cont_[i] = f2_[i] + f0_[i];
        }
        lin_.solve_real(cont_);
        double err = scaled_norm(cont_);
        if (err >= 1.0 && (first || reject)) {
          for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + cont_[i];
          p.rhs(t, ytmp_, f1_);
          ++st.rhs_evals;
          for (std::size_t i = 0; i < n_; ++i) cont_[i] = f1_[i] + f2_[i];
          lin_.solve_real(cont_);
          err = scaled_norm(cont_);
        }
        if (!std::isfinite(err)) throw NumericError("Radau5: non-finite error estimate");

        const double fac = std::min(safe, safe * (1.0 + 2.0 * nit) / (newt + 2.0 * nit));
        const double quot = std::max(facr, std::min(facl, std::sqrt(std::sqrt(err)) / fac));
        double hnew = h / quot;
        if (err < 1.0) {
          first = false;
          ++st.accepted;
          for (std::size_t i = 0; i < n_; ++i) y[i] += z3_[i];
          t = last ? t1 : t + h;
          if (last) return st;
          p.rhs(t, y, f0_);
          ++st.rhs_evals;
          require_finite(f0_);
          if (std::abs(hnew) > hmax) hnew = posneg * hmax;
          if (reject) hnew = posneg * std::min(std::abs(hnew), std::abs(h));
          reject = false;
          h = hnew;
          break;
        }
        reject = true;
        last = false;
        ++st.rejected;
        h = first ? h * 0.1 : hnew;
      }
    }
  }

 private:
  template <class Problem>
  void stage_rhs(Problem& p, double t, double h, std::span<const double> y, const RadauTableau& tab,
                 RadauStats& st) {
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + z1_[i];
    p.rhs(t + tab.c[0] * h, ytmp_, f1_);
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + z2_[i];
    p.rhs(t + tab.c[1] * h, ytmp_, f2_);
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + z3_[i];
    p.rhs(t + h, ytmp_, f3_);
    st.rhs_evals += 3;
  }

  double scaled_norm(const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double q = v[i] / scal_[i];
      s += q * q;
    }
    return std::max(std::sqrt(s / static_cast<double>(n_)), 1e-10);
  }

  static void require_finite(const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) throw NumericError("Radau5: non-finite right-hand side");
    }
  }

  Backend lin_;
  RadauOptions opt_;
  std::size_t n_;
  std::vector<double> z1_, z2_, z3_, w1_, w2_, w3_, f1_, f2_, f3_, f0_, scal_, ytmp_, cont_, dw1_;
  std::vector<std::complex<double>> cw_;
};

}  // namespace adsplit
