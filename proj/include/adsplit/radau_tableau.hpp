#pragma once

namespace adsplit {

/// Constants of the 3-stage Radau IIA method (order 5) together with the
/// real Schur-like transformation that block-diagonalizes A^{-1}:
/// A^{-1} = T diag(gamma, [[alpha, -beta], [beta, alpha]]) T^{-1}.
struct RadauTableau {
  double c[3];
  double a[3][3];
  double t[3][3];
  double t_inv[3][3];
  double gamma;
  double alpha;
  double beta;
  /// Weights of the embedded third-order error estimate (scaled by 1/gamma0).
  double dd[3];

  static const RadauTableau& get();
};

}  // namespace adsplit
