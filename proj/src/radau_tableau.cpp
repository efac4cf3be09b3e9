#include "adsplit/radau_tableau.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace adsplit {

namespace {

RadauTableau build() {
  RadauTableau tab{};
  const double s6 = std::sqrt(6.0);
  tab.c[0] = (4.0 - s6) / 10.0;
  tab.c[1] = (4.0 + s6) / 10.0;
  tab.c[2] = 1.0;
  const double a[3][3] = {
      {(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0},
      {(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0},
      {(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0}};
  Eigen::Matrix3d A;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      tab.a[i][j] = a[i][j];
      A(i, j) = a[i][j];
    }
  }
  const Eigen::Matrix3d Ainv = A.inverse();

  Eigen::EigenSolver<Eigen::Matrix3d> es(Ainv);
  const auto vals = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  int real_idx = 0, cplx_idx = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(vals[k].imag()) < 1e-12) real_idx = k;
    else if (vals[k].imag() > 0.0) cplx_idx = k;
  }
  tab.gamma = vals[real_idx].real();
  tab.alpha = vals[cplx_idx].real();
  tab.beta = vals[cplx_idx].imag();
  Eigen::Matrix3d T;
  T.col(0) = vecs.col(real_idx).real();
  T.col(1) = vecs.col(cplx_idx).real();
  T.col(2) = -vecs.col(cplx_idx).imag();
  const Eigen::Matrix3d Tinv = T.inverse();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      tab.t[i][j] = T(i, j);
      tab.t_inv[i][j] = Tinv(i, j);
    }
  }

  // Embedded weights: bhat0 = gamma0 on f(t0, y0), then quadrature order 3.
  const double gamma0 = 1.0 / tab.gamma;
  Eigen::Matrix3d V;
  Eigen::Vector3d rhs(1.0 - gamma0, 0.5, 1.0 / 3.0);
  for (int j = 0; j < 3; ++j) {
    V(0, j) = 1.0;
    V(1, j) = tab.c[j];
    V(2, j) = tab.c[j] * tab.c[j];
  }
  const Eigen::Vector3d bhat = V.partialPivLu().solve(rhs);
  const Eigen::Vector3d b = A.row(2).transpose();
  const Eigen::Vector3d e = Ainv.transpose() * (bhat - b) / gamma0;
  for (int i = 0; i < 3; ++i) tab.dd[i] = e(i);
  return tab;
}

}  // namespace

const RadauTableau& RadauTableau::get() {
  static const RadauTableau tab = build();
  return tab;
}

}  // namespace adsplit
