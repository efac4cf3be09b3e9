#include <cmath>
#include <limits>

#include "adsplit/analysis.hpp"
#include "adsplit/errors.hpp"

namespace adsplit {

CommutatorCheck commutator_expansion_residual(const LinearSplitProblem& p, double t, double eps) {
  const auto& a = p.a;
  const auto& b = p.b;
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() ||
      p.u0.size() != a.rows()) {
    throw DimensionError("commutator_expansion_residual: dimension mismatch");
  }
  const Eigen::VectorXd exact = expm_dense(a + b, t) * p.u0;
  const Eigen::VectorXd split =
      expm_dense(a, (0.5 - eps) * t) * (expm_dense(b, t) * (expm_dense(a, (0.5 + eps) * t) * p.u0));
  const Eigen::MatrixXd ab = a * b - b * a;
  const Eigen::MatrixXd aab = a * ab - ab * a;
  const Eigen::MatrixXd bab = b * ab - ab * b;
  CommutatorCheck out;
  out.lhs = exact - split;
  out.leading = eps * t * t * (ab * p.u0) + (t * t * t / 24.0) * ((aab + 2.0 * bab) * p.u0);
  out.residual_norm = (out.lhs - out.leading).norm();
  return out;
}

ProfileDerivatives profile_derivatives(std::span<const double> u, double dx) {
  const std::size_t n = u.size();
  if (n < 6) throw DimensionError("profile_derivatives: need at least 6 points");
  ProfileDerivatives d{std::vector<double>(n), std::vector<double>(n)};
  const double i1 = 1.0 / (12.0 * dx), i2 = 1.0 / (12.0 * dx * dx);
  for (std::size_t k = 2; k + 2 < n; ++k) {
    d.first[k] = (-u[k + 2] + 8.0 * u[k + 1] - 8.0 * u[k - 1] + u[k - 2]) * i1;
    d.second[k] = (-u[k + 2] + 16.0 * u[k + 1] - 30.0 * u[k] + 16.0 * u[k - 1] - u[k - 2]) * i2;
  }
  // One-sided closures; the right end mirrors the left with a sign flip on u'.
  auto left = [&](auto at, double sign, std::size_t k0, std::size_t k1) {
    d.first[k0] = sign * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) * i1;
    d.first[k1] = sign * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) * i1;
    d.second[k0] = (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) -
                    10.0 * at(5)) * i2;
    d.second[k1] = (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5)) * i2;
  };
  left([&](std::size_t j) { return u[j]; }, 1.0, 0, 1);
  left([&](std::size_t j) { return u[n - 1 - j]; }, -1.0, n - 1, n - 2);
  return d;
}

std::vector<double> leading_error_strang(std::span<const double> u0, double dx,
                                         const ScalarReaction& f, double k, double diffusion,
                                         double eps, double t) {
  const ProfileDerivatives d = profile_derivatives(u0, dx);
  std::vector<double> out(u0.size());
  const double t2 = t * t, t3 = t2 * t;
  const double kd = k * diffusion, kkd = k * k * diffusion, kdd = k * diffusion * diffusion;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const auto fd = f.derivatives(u0[i]);
    const double g = d.first[i], g2 = g * g, h = d.second[i];
    out[i] = -eps * kd * t2 * fd[2] * g2 + (kkd * t3 / 24.0) * (fd[1] * fd[2] + fd[0] * fd[3]) * g2 -
             (kdd * t3 / 12.0) * fd[4] * g2 * g2 - (kdd * t3 / 3.0) * fd[3] * g2 * h -
             (kdd * t3 / 6.0) * fd[2] * h * h;
  }
  return out;
}

MomentPair compute_M1_M2(std::span<const double> u0, double dx, const ScalarReaction& f) {
  const ProfileDerivatives d = profile_derivatives(u0, dx);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const auto fd = f.derivatives(u0[i]);
    const double g = d.first[i], g2 = g * g, h = d.second[i];
    const double v1 = fd[2] * g2;
    const double v2 = (fd[1] * fd[2] + fd[0] * fd[3]) / 24.0 * g2 - fd[4] / 12.0 * g2 * g2 -
                      fd[3] / 3.0 * g2 * h - fd[2] / 6.0 * h * h;
    s1 += v1 * v1;
    s2 += v2 * v2;
  }
  return {std::sqrt(s1 * dx), std::sqrt(s2 * dx)};
}

double dt_star_theory(double m1, double m2, double eps, double k) {
  if (m2 == 0.0) return std::numeric_limits<double>::infinity();
  return eps * m1 / (k * m2);
}

}  // namespace adsplit
