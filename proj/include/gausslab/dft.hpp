#pragma once

// Arbitrary-length discrete Fourier transforms over Eigen complex vectors.
//
// Convention: X[j] = sum_k x[k] * exp(sign * 2 pi i j k / N), no normalization.
// Lengths below kDirectThreshold use the O(N^2) sum; larger lengths use the
// chirp transform with a power-of-two inner convolution.

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace gausslab {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using ComplexVectorXd = ComplexVector<double>;

inline constexpr std::size_t kDirectThreshold = 512;

/// exp(2 pi i num / den) with num reduced into [0, den) before the cast.
template <typename Scalar>
std::complex<Scalar> unit_root(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t r = num % den;
  const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(r) / Scalar(den);
  return std::polar(Scalar(1), angle);
}

/// Table of the N-th roots of unity; lookup by exponent mod N.
template <typename Scalar>
class RootTable {
 public:
  explicit RootTable(std::uint64_t order) : roots_(order) {
    if (order == 0) throw std::invalid_argument("root table of order zero");
    for (std::uint64_t k = 0; k < order; ++k) roots_[k] = unit_root<Scalar>(k, order);
  }
  std::uint64_t order() const { return roots_.size(); }
  const std::complex<Scalar>& operator()(std::uint64_t k) const { return roots_[k % roots_.size()]; }

 private:
  std::vector<std::complex<Scalar>> roots_;
};

/// Pairwise (tree) summation in index order; deterministic for a given length.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 8) {
    T acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::MatrixBase<Derived>& v) {
  using T = typename Derived::Scalar;
  const auto& eval = v.derived().eval();
  return pairwise_sum(std::span<const T>(eval.data(), static_cast<std::size_t>(eval.size())));
}

/// O(N^2) transform with exact exponent reduction; reference implementation.
template <typename Scalar>
ComplexVector<Scalar> dft_direct(const ComplexVector<Scalar>& x, int sign = 1) {
  const auto n = static_cast<std::uint64_t>(x.size());
  ComplexVector<Scalar> out(x.size());
  if (n == 0) return out;
  const RootTable<Scalar> roots(n);
  std::vector<std::complex<Scalar>> terms(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    for (std::uint64_t k = 0; k < n; ++k) {
      std::uint64_t e = j * k % n;
      if (sign < 0 && e != 0) e = n - e;
      terms[k] = x[static_cast<Eigen::Index>(k)] * roots(e);
    }
    out[static_cast<Eigen::Index>(j)] = pairwise_sum(std::span<const std::complex<Scalar>>(terms));
  }
  return out;
}

namespace detail {

/// In-place iterative radix-2 transform; size must be a power of two.
template <typename Scalar>
void fft_pow2(std::vector<std::complex<Scalar>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const RootTable<Scalar> roots(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::size_t e = k * step;
        const auto w = sign > 0 ? roots(e) : roots((n - e) % n);
        const auto u = a[start + k];
        const auto v = a[start + k + len / 2] * w;
        a[start + k] = u + v;
        a[start + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

/// Chirp-transform evaluation of the length-N DFT for any N.
template <typename Scalar>
ComplexVector<Scalar> dft_chirp(const ComplexVector<Scalar>& x, int sign = 1) {
  const auto n = static_cast<std::uint64_t>(x.size());
  ComplexVector<Scalar> out(x.size());
  if (n == 0) return out;
  std::size_t size = 1;
  while (size < 2 * n - 1) size <<= 1;

  // chirp[k] = exp(sign * pi i k^2 / N), exponent reduced mod 2N.
  const std::uint64_t two_n = 2 * n;
  std::vector<std::complex<Scalar>> chirp(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    std::uint64_t e = k * k % two_n;
    if (sign < 0 && e != 0) e = two_n - e;
    chirp[k] = unit_root<Scalar>(e, two_n);
  }

  std::vector<std::complex<Scalar>> a(size);
  std::vector<std::complex<Scalar>> b(size);
  for (std::uint64_t k = 0; k < n; ++k) a[k] = x[static_cast<Eigen::Index>(k)] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::uint64_t k = 1; k < n; ++k) b[k] = b[size - k] = std::conj(chirp[k]);

  detail::fft_pow2(a, 1);
  detail::fft_pow2(b, 1);
  for (std::size_t i = 0; i < size; ++i) a[i] *= b[i];
  detail::fft_pow2(a, -1);
  const Scalar scale = Scalar(1) / Scalar(size);
  for (std::uint64_t j = 0; j < n; ++j) {
    out[static_cast<Eigen::Index>(j)] = a[j] * scale * chirp[j];
  }
  return out;
}

template <typename Scalar>
ComplexVector<Scalar> dft(const ComplexVector<Scalar>& x, int sign = 1) {
  if (static_cast<std::size_t>(x.size()) < kDirectThreshold) return dft_direct(x, sign);
  return dft_chirp(x, sign);
}

/// c[k] = sum_i a[i] b[(k - i) mod N], direct summation.
template <typename Scalar>
ComplexVector<Scalar> cyclic_convolve_direct(const ComplexVector<Scalar>& a, const ComplexVector<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("convolution length mismatch");
  const auto n = a.size();
  ComplexVector<Scalar> out(n);
  std::vector<std::complex<Scalar>> terms(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) terms[static_cast<std::size_t>(i)] = a[i] * b[(k - i + n) % n];
    out[k] = pairwise_sum(std::span<const std::complex<Scalar>>(terms));
  }
  return out;
}

/// Cyclic convolution through the DFT; falls back to direct summation for short inputs.
template <typename Scalar>
ComplexVector<Scalar> cyclic_convolve(const ComplexVector<Scalar>& a, const ComplexVector<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("convolution length mismatch");
  if (static_cast<std::size_t>(a.size()) < kDirectThreshold / 4) return cyclic_convolve_direct(a, b);
  const ComplexVector<Scalar> fa = dft(a, -1);
  const ComplexVector<Scalar> fb = dft(b, -1);
  const ComplexVector<Scalar> prod = fa.cwiseProduct(fb);
  return dft(prod, 1) / Scalar(a.size());
}

}  // namespace gausslab
