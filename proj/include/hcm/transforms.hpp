#pragma once

// Hadamard matrix construction and the fast transforms (Walsh-Hadamard and
// radix-2 DFT) shared by the modems.

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hcm {

inline bool is_power_of_two(std::size_t n) {
  return n >= 2 && std::has_single_bit(n);
}

// Order of a Sylvester Hadamard matrix; must be 2^k, k >= 1.
struct HadamardOrder {
  std::size_t n;

  explicit HadamardOrder(std::size_t order) : n(order) {
    if (!is_power_of_two(order))
      throw std::invalid_argument("Hadamard order must be a power of two >= 2");
  }
};

// {0,1} Hadamard matrix in Sylvester (natural) row order: entry (i,j) is
// 1 when popcount(i & j) is even. Row 0 and column 0 are all ones; every
// other row has weight n/2.
struct BinaryHadamard {
  std::size_t n;
  std::vector<std::uint8_t> bits;  // row-major, n*n

  std::uint8_t at(std::size_t i, std::size_t j) const {
    return bits[i * n + j];
  }
  // Bipolar entry of S = H - complement(H); always +-1.
  int sign(std::size_t i, std::size_t j) const {
    return bits[i * n + j] ? 1 : -1;
  }
};

inline BinaryHadamard build_binary_hadamard(HadamardOrder order) {
  BinaryHadamard h;
  h.n = order.n;
  h.bits.resize(order.n * order.n);
  for (std::size_t i = 0; i < order.n; ++i)
    for (std::size_t j = 0; j < order.n; ++j)
      h.bits[i * order.n + j] =
          (std::popcount(i & j) % 2 == 0) ? std::uint8_t{1} : std::uint8_t{0};
  return h;
}

// In-place unnormalized Walsh-Hadamard transform: v <- v * S, where S is
// the bipolar Sylvester matrix. Self-inverse up to a factor of N.
inline void fwht_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("fwht: length must be a power of two >= 2");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        double a = v[j];
        double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

inline std::vector<double> fwht(std::vector<double> v) {
  fwht_inplace(v);
  return v;
}

// Inverse transform: ifwht(fwht(v)) == v.
inline void ifwht_inplace(std::span<double> v) {
  fwht_inplace(v);
  const double inv = 1.0 / static_cast<double>(v.size());
  for (double& x : v) x *= inv;
}

inline std::vector<double> ifwht(std::vector<double> v) {
  ifwht_inplace(v);
  return v;
}

namespace detail {

inline void fft_radix2(std::span<std::complex<double>> v, bool inverse) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("dft: length must be a power of two >= 2");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> a = v[i + j];
        std::complex<double> b = v[i + j + len / 2] * w;
        v[i + j] = a + b;
        v[i + j + len / 2] = a - b;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

// Forward DFT: X_k = sum_n x_n e^{-2 pi j k n / N} (no scaling).
inline std::vector<std::complex<double>> dft(
    std::vector<std::complex<double>> v) {
  detail::fft_radix2(v, false);
  return v;
}

// Inverse DFT with 1/N scaling, so dft(idft(u)) == u.
inline std::vector<std::complex<double>> idft(
    std::vector<std::complex<double>> v) {
  detail::fft_radix2(v, true);
  const double inv = 1.0 / static_cast<double>(v.size());
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace hcm
