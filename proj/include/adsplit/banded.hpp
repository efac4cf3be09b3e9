#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace adsplit {

/// Band matrix with kl sub- and ku super-diagonals (compact storage).
class BandMatrix {
 public:
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), data_((kl + ku + 1) * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  /// Caller guarantees j - ku <= i <= j + kl.
  double& at(std::size_t i, std::size_t j) noexcept { return data_[(ku_ + i - j) + j * (kl_ + ku_ + 1)]; }
  double at(std::size_t i, std::size_t j) const noexcept {
    return data_[(ku_ + i - j) + j * (kl_ + ku_ + 1)];
  }
  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return i + ku_ >= j && j + kl_ >= i;
  }
  void zero() { std::fill(data_.begin(), data_.end(), 0.0); }

 private:
  std::size_t n_, kl_, ku_;
  std::vector<double> data_;
};

/// Linear-algebra backend for banded Jacobians, factored with LAPACK.
class BandedBackend {
 public:
  using Jacobian = BandMatrix;

  BandedBackend(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return jac_.size(); }
  Jacobian& jacobian() noexcept { return jac_; }

  bool factor_real(double shift);
  bool factor_complex(std::complex<double> shift);
  void solve_real(std::span<double> b) const;
  void solve_complex(std::span<std::complex<double>> b) const;

 private:
  Jacobian jac_;
  int ldab_;
  std::vector<double> real_;
  std::vector<std::complex<double>> cplx_;
  std::vector<int> piv_real_, piv_cplx_;
};

}  // namespace adsplit
