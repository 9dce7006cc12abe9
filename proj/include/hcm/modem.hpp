#pragma once

// HCM symbol processing: PAM mapping, the FWHT encoder/decoder, per-symbol
// DC removal, chip interleaving and the cyclic prefix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcm/transforms.hpp"

namespace hcm {

inline std::size_t ilog2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// Gray code helpers shared by the PAM and QAM mappers. Level index i
// carries label i ^ (i >> 1), so adjacent amplitudes differ in one bit.
inline std::uint32_t gray_encode(std::uint32_t i) { return i ^ (i >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t b = g;
  while (g >>= 1) b ^= g;
  return b;
}

// M equally spaced amplitudes {0, 1/(M-1), ..., 1}, Gray labeled.
class PamConstellation {
 public:
  explicit PamConstellation(std::size_t m) : m_(m) {
    if (!is_power_of_two(m))
      throw std::invalid_argument("PAM order must be a power of two >= 2");
    bits_ = ilog2(m);
  }

  std::size_t order() const { return m_; }
  std::size_t bits_per_symbol() const { return bits_; }

  double level(std::size_t index) const {
    return static_cast<double>(index) / static_cast<double>(m_ - 1);
  }

  // Amplitude for a Gray label read MSB-first from `bits`.
  double amplitude(std::span<const std::uint8_t> bits) const {
    std::uint32_t g = 0;
    for (std::size_t b = 0; b < bits_; ++b) g = (g << 1) | (bits[b] & 1u);
    return level(gray_decode(g));
  }

  // Nearest-level slicing (midpoint thresholds) of a soft amplitude.
  std::size_t slice(double soft) const {
    long idx = std::lround(soft * static_cast<double>(m_ - 1));
    return static_cast<std::size_t>(
        std::clamp(idx, 0l, static_cast<long>(m_ - 1)));
  }

  void append_bits(std::size_t index, std::vector<std::uint8_t>& out) const {
    std::uint32_t g = gray_encode(static_cast<std::uint32_t>(index));
    for (std::size_t b = bits_; b-- > 0;)
      out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
  }

 private:
  std::size_t m_;
  std::size_t bits_;
};

// Bits -> data vector u of length N. Component 0 is reserved (always 0);
// components 1..N-1 carry Gray-mapped PAM amplitudes in [0, 1].
inline std::vector<double> pam_map(std::span<const std::uint8_t> bits,
                                   std::size_t n,
                                   const PamConstellation& pam) {
  if (bits.size() != (n - 1) * pam.bits_per_symbol())
    throw std::invalid_argument("pam_map: bit count must be (N-1)*log2(M)");
  std::vector<double> u(n, 0.0);
  for (std::size_t k = 1; k < n; ++k)
    u[k] = pam.amplitude(bits.subspan((k - 1) * pam.bits_per_symbol(),
                                      pam.bits_per_symbol()));
  return u;
}

// Soft data estimates (component 0 ignored) -> bits.
inline std::vector<std::uint8_t> pam_demap(std::span<const double> soft,
                                           const PamConstellation& pam) {
  std::vector<std::uint8_t> bits;
  bits.reserve((soft.size() - 1) * pam.bits_per_symbol());
  for (std::size_t k = 1; k < soft.size(); ++k)
    pam.append_bits(pam.slice(soft[k]), bits);
  return bits;
}

// HCM encoder: x = (1/sqrt(N)) (u H + (1-u) Hbar), computed as the FWHT of
// u plus the constant (sqrt(N)/2)[0,1,...,1]. All chips are nonnegative;
// max(x) - min(x) <= sqrt(N)/2 for data in [0, 1].
inline std::vector<double> hcm_encode(std::span<const double> u) {
  const std::size_t n = u.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("hcm_encode: N must be a power of two >= 2");
  if (u[0] != 0.0)
    throw std::invalid_argument("hcm_encode: component 0 is reserved (must be 0)");
  for (double c : u)
    if (c < 0.0 || c > 1.0)
      throw std::out_of_range("hcm_encode: data components must be in [0, 1]");
  std::vector<double> x(u.begin(), u.end());
  fwht_inplace(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double offset = std::sqrt(static_cast<double>(n)) / 2.0;
  x[0] *= scale;
  for (std::size_t j = 1; j < n; ++j) x[j] = x[j] * scale + offset;
  return x;
}

// HCM decoder: v = (1/sqrt(N)) y S^T, one FWHT. In a noiseless ideal
// channel v_k = u_k - 1/2 for k >= 1; v_0 absorbs any DC offset and is
// discarded downstream.
inline std::vector<double> hcm_decode(std::span<const double> y) {
  std::vector<double> v(y.begin(), y.end());
  fwht_inplace(v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (double& c : v) c *= scale;
  return v;
}

// DC-removed HCM: subtract the per-symbol minimum so min(x) == 0. The
// decoder output for k >= 1 is unchanged.
inline std::vector<double> dcr_encode(std::span<const double> u) {
  std::vector<double> x = hcm_encode(u);
  const double lo = *std::min_element(x.begin(), x.end());
  for (double& c : x) c -= lo;
  return x;
}

// Intra-symbol chip permutation. sent[i] = x[perm[i]].
struct Interleaver {
  std::vector<std::size_t> perm;
  std::vector<std::size_t> inverse;

  static Interleaver identity(std::size_t n) {
    Interleaver il;
    il.perm.resize(n);
    std::iota(il.perm.begin(), il.perm.end(), std::size_t{0});
    il.inverse = il.perm;
    return il;
  }

  static Interleaver from_permutation(std::vector<std::size_t> perm) {
    Interleaver il;
    il.inverse.assign(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] >= perm.size() || il.inverse[perm[i]] != perm.size())
        throw std::invalid_argument("Interleaver: not a permutation");
      il.inverse[perm[i]] = i;
    }
    il.perm = std::move(perm);
    return il;
  }

  std::size_t size() const { return perm.size(); }
};

inline std::vector<double> interleave(std::span<const double> x,
                                      const Interleaver& il) {
  if (x.size() != il.size())
    throw std::invalid_argument("interleave: length mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[il.perm[i]];
  return out;
}

inline std::vector<double> deinterleave(std::span<const double> y,
                                        const Interleaver& il) {
  if (y.size() != il.size())
    throw std::invalid_argument("deinterleave: length mismatch");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[il.perm[i]] = y[i];
  return out;
}

// Prepend the last L chips of x.
inline std::vector<double> add_cyclic_prefix(std::span<const double> x,
                                             std::size_t cp_len) {
  if (cp_len >= x.size())
    throw std::invalid_argument("add_cyclic_prefix: need 0 <= L < N");
  std::vector<double> out;
  out.reserve(x.size() + cp_len);
  out.insert(out.end(), x.end() - cp_len, x.end());
  out.insert(out.end(), x.begin(), x.end());
  return out;
}

inline std::vector<double> strip_cyclic_prefix(std::span<const double> y,
                                               std::size_t cp_len) {
  if (cp_len >= y.size())
    throw std::invalid_argument("strip_cyclic_prefix: L out of range");
  return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(cp_len),
                             y.end());
}

}  // namespace hcm
