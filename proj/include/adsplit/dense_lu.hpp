#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace adsplit {

namespace detail {
inline double pivot_size(double v) { return std::abs(v); }
inline double pivot_size(std::complex<double> v) { return std::abs(v.real()) + std::abs(v.imag()); }
inline double reciprocal(double v) { return 1.0 / v; }
inline std::complex<double> reciprocal(std::complex<double> v) {
  const double d = v.real() * v.real() + v.imag() * v.imag();
  return {v.real() / d, -v.imag() / d};
}
}  // namespace detail

/// In-place LU with partial pivoting for small dense systems.
template <class Scalar>
class SmallLU {
 public:
  explicit SmallLU(std::size_t n = 0) { resize(n); }

  void resize(std::size_t n) {
    n_ = n;
    a_.assign(n * n, Scalar(0));
    inv_diag_.assign(n, Scalar(0));
    piv_.assign(n, 0);
  }

  std::size_t size() const noexcept { return n_; }
  /// Row-major storage; fill before factor().
  Scalar* data() noexcept { return a_.data(); }

  bool factor() {
    const std::size_t n = n_;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = detail::pivot_size(a_[k * n + k]);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = detail::pivot_size(a_[i * n + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv_[k] = p;
      if (best == 0.0 || !std::isfinite(best)) return false;
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a_[k * n + j], a_[p * n + j]);
      }
      const Scalar inv = detail::reciprocal(a_[k * n + k]);
      inv_diag_[k] = inv;
      for (std::size_t i = k + 1; i < n; ++i) {
        const Scalar l = a_[i * n + k] * inv;
        a_[i * n + k] = l;
        if (l == Scalar(0)) continue;
        for (std::size_t j = k + 1; j < n; ++j) a_[i * n + j] -= l * a_[k * n + j];
      }
    }
    return true;
  }

  void solve(std::span<Scalar> b) const {
    const std::size_t n = n_;
    for (std::size_t k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    }
    for (std::size_t i = 1; i < n; ++i) {
      Scalar s = b[i];
      for (std::size_t j = 0; j < i; ++j) s -= a_[i * n + j] * b[j];
      b[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      Scalar s = b[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= a_[i * n + j] * b[j];
      b[i] = s * inv_diag_[i];
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> a_;
  std::vector<Scalar> inv_diag_;
  std::vector<std::size_t> piv_;
};

/// Linear-algebra backend for small dense Jacobians (pointwise reaction
/// solves). An optional block partition marks the Jacobian block-diagonal;
/// each block is then factored on its own.
class DenseBackend {
 public:
  using Jacobian = std::vector<double>;  // row-major n x n

  explicit DenseBackend(std::size_t n, std::vector<std::size_t> blocks = {})
      : n_(n), jac_(n * n, 0.0) {
    if (blocks.empty()) blocks.push_back(n);
    std::size_t off = 0;
    for (std::size_t b : blocks) {
      blocks_.push_back({off, b, SmallLU<double>(b), SmallLU<std::complex<double>>(b)});
      off += b;
    }
  }

  std::size_t size() const noexcept { return n_; }
  Jacobian& jacobian() noexcept { return jac_; }

  /// Factors shift*I - J.
  bool factor_real(double shift) {
    for (Block& b : blocks_) {
      fill(b, b.real.data(), shift);
      if (!b.real.factor()) return false;
    }
    return true;
  }

  bool factor_complex(std::complex<double> shift) {
    for (Block& b : blocks_) {
      fill(b, b.cplx.data(), shift);
      if (!b.cplx.factor()) return false;
    }
    return true;
  }

  void solve_real(std::span<double> v) const {
    for (const Block& b : blocks_) b.real.solve(v.subspan(b.offset, b.size));
  }
  void solve_complex(std::span<std::complex<double>> v) const {
    for (const Block& b : blocks_) b.cplx.solve(v.subspan(b.offset, b.size));
  }

 private:
  struct Block {
    std::size_t offset;
    std::size_t size;
    SmallLU<double> real;
    SmallLU<std::complex<double>> cplx;
  };

  template <class Scalar>
  void fill(const Block& b, Scalar* a, Scalar shift) const {
    for (std::size_t i = 0; i < b.size; ++i) {
      const double* row = jac_.data() + (b.offset + i) * n_ + b.offset;
      for (std::size_t j = 0; j < b.size; ++j) a[i * b.size + j] = -row[j];
      a[i * b.size + i] += shift;
    }
  }

  std::size_t n_;
  Jacobian jac_;
  std::vector<Block> blocks_;
};

}  // namespace adsplit
