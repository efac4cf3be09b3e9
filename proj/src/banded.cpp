#include "adsplit/banded.hpp"

#include <algorithm>

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab,
             int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb,
             int* info);
void zgbtrf_(const int* m, const int* n, const int* kl, const int* ku, std::complex<double>* ab,
             const int* ldab, int* ipiv, int* info);
void zgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const std::complex<double>* ab, const int* ldab, const int* ipiv,
             std::complex<double>* b, const int* ldb, int* info);
}

namespace adsplit {

BandedBackend::BandedBackend(std::size_t n, std::size_t kl, std::size_t ku)
    : jac_(n, kl, ku), ldab_(static_cast<int>(2 * kl + ku + 1)) {
  real_.assign(static_cast<std::size_t>(ldab_) * n, 0.0);
  cplx_.assign(static_cast<std::size_t>(ldab_) * n, {0.0, 0.0});
  piv_real_.assign(n, 0);
  piv_cplx_.assign(n, 0);
}

namespace {

// Fills LAPACK band storage (with kl extra rows for fill-in) with shift*I - J.
template <class Scalar>
void assemble(const BandMatrix& jac, Scalar shift, int ldab, std::vector<Scalar>& ab) {
  const std::size_t n = jac.size(), kl = jac.lower(), ku = jac.upper();
  std::fill(ab.begin(), ab.end(), Scalar(0));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i0 = j > ku ? j - ku : 0;
    const std::size_t i1 = std::min(n - 1, j + kl);
    for (std::size_t i = i0; i <= i1; ++i) {
      Scalar v = -jac.at(i, j);
      if (i == j) v += shift;
      ab[(kl + ku + i - j) + j * static_cast<std::size_t>(ldab)] = v;
    }
  }
}

}  // namespace

bool BandedBackend::factor_real(double shift) {
  assemble(jac_, shift, ldab_, real_);
  const int n = static_cast<int>(jac_.size()), kl = static_cast<int>(jac_.lower()),
            ku = static_cast<int>(jac_.upper());
  int info = 0;
  dgbtrf_(&n, &n, &kl, &ku, real_.data(), &ldab_, piv_real_.data(), &info);
  return info == 0;
}

bool BandedBackend::factor_complex(std::complex<double> shift) {
  assemble(jac_, shift, ldab_, cplx_);
  const int n = static_cast<int>(jac_.size()), kl = static_cast<int>(jac_.lower()),
            ku = static_cast<int>(jac_.upper());
  int info = 0;
  zgbtrf_(&n, &n, &kl, &ku, cplx_.data(), &ldab_, piv_cplx_.data(), &info);
  return info == 0;
}

void BandedBackend::solve_real(std::span<double> b) const {
  const int n = static_cast<int>(jac_.size()), kl = static_cast<int>(jac_.lower()),
            ku = static_cast<int>(jac_.upper()), nrhs = 1;
  int info = 0;
  const char trans = 'N';
  dgbtrs_(&trans, &n, &kl, &ku, &nrhs, real_.data(), &ldab_, piv_real_.data(), b.data(), &n, &info);
}

void BandedBackend::solve_complex(std::span<std::complex<double>> b) const {
  const int n = static_cast<int>(jac_.size()), kl = static_cast<int>(jac_.lower()),
            ku = static_cast<int>(jac_.upper()), nrhs = 1;
  int info = 0;
  const char trans = 'N';
  zgbtrs_(&trans, &n, &kl, &ku, &nrhs, cplx_.data(), &ldab_, piv_cplx_.data(), b.data(), &n, &info);
}

}  // namespace adsplit
