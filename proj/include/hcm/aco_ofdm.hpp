#pragma once

// ACO-OFDM baseline: square-QAM mapping, odd-subcarrier Hermitian spectrum,
// IDFT, negative clipping and the FFT receiver.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcm/modem.hpp"
#include "hcm/transforms.hpp"

namespace hcm {

// Square M-QAM with unit average symbol energy and Gray labeling per axis.
class QamConstellation {
 public:
  explicit QamConstellation(std::size_t m) : m_(m) {
    side_ = static_cast<std::size_t>(std::lround(std::sqrt(double(m))));
    if (side_ * side_ != m || !is_power_of_two(m) || m < 4)
      throw std::invalid_argument("QAM order must be an even power of two");
    bits_ = ilog2(m);
    // Odd-integer axis coordinates scaled to unit average energy:
    // E = 2 (M-1)/3 * d^2 = 1.
    d_ = std::sqrt(3.0 / (2.0 * static_cast<double>(m - 1)));
  }

  std::size_t order() const { return m_; }
  std::size_t bits_per_symbol() const { return bits_; }
  std::size_t side() const { return side_; }

  double axis_level(std::size_t index) const {
    return (2.0 * static_cast<double>(index) -
            static_cast<double>(side_ - 1)) * d_;
  }

  std::complex<double> point(std::size_t i_index, std::size_t q_index) const {
    return {axis_level(i_index), axis_level(q_index)};
  }

  // First half of the label selects the I axis, second half the Q axis,
  // each Gray decoded MSB-first.
  std::complex<double> map(std::span<const std::uint8_t> bits) const {
    const std::size_t half = bits_ / 2;
    auto axis = [&](std::size_t off) {
      std::uint32_t g = 0;
      for (std::size_t b = 0; b < half; ++b) g = (g << 1) | (bits[off + b] & 1u);
      return static_cast<std::size_t>(gray_decode(g));
    };
    return point(axis(0), axis(half));
  }

  std::size_t slice_axis(double soft) const {
    long idx = std::lround((soft / d_ + static_cast<double>(side_ - 1)) / 2.0);
    return static_cast<std::size_t>(
        std::clamp(idx, 0l, static_cast<long>(side_ - 1)));
  }

  void append_bits(std::complex<double> soft,
                   std::vector<std::uint8_t>& out) const {
    const std::size_t half = bits_ / 2;
    auto push = [&](std::size_t index) {
      std::uint32_t g = gray_encode(static_cast<std::uint32_t>(index));
      for (std::size_t b = half; b-- > 0;)
        out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
    };
    push(slice_axis(soft.real()));
    push(slice_axis(soft.imag()));
  }

 private:
  std::size_t m_;
  std::size_t side_;
  std::size_t bits_;
  double d_;
};

inline std::vector<std::complex<double>> qam_map(
    std::span<const std::uint8_t> bits, const QamConstellation& qam) {
  if (bits.size() % qam.bits_per_symbol() != 0)
    throw std::invalid_argument("qam_map: bit count must be a multiple of log2(M)");
  std::vector<std::complex<double>> out;
  out.reserve(bits.size() / qam.bits_per_symbol());
  for (std::size_t i = 0; i < bits.size(); i += qam.bits_per_symbol())
    out.push_back(qam.map(bits.subspan(i, qam.bits_per_symbol())));
  return out;
}

inline std::vector<std::uint8_t> qam_demap(
    std::span<const std::complex<double>> softs, const QamConstellation& qam) {
  std::vector<std::uint8_t> bits;
  bits.reserve(softs.size() * qam.bits_per_symbol());
  for (auto s : softs) qam.append_bits(s, bits);
  return bits;
}

// N/4 data symbols -> length-N spectrum with data on odd subcarriers and
// Hermitian symmetry, so the time signal is real and its negative half can
// be clipped without touching the data.
inline std::vector<std::complex<double>> aco_map(
    std::span<const std::complex<double>> data, std::size_t n) {
  if (n % 4 != 0 || !is_power_of_two(n))
    throw std::invalid_argument("aco_map: N must be a power of two divisible by 4");
  if (data.size() != n / 4)
    throw std::invalid_argument("aco_map: need N/4 data symbols");
  std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
  for (std::size_t k = 0; k < n / 4; ++k) {
    spectrum[2 * k + 1] = data[k];
    spectrum[n - (2 * k + 1)] = std::conj(data[k]);
  }
  return spectrum;
}

// Amplitude that scales the unit-energy IDFT output to a pre-clipping
// standard deviation of sigma: each time sample has variance 1/(2N) before
// scaling (N/2 active unit-energy subcarriers, 1/N IDFT normalization).
inline double aco_time_scale(double sigma, std::size_t n) {
  return sigma * std::sqrt(2.0 * static_cast<double>(n));
}

// Spectrum -> nonnegative optical waveform with pre-clipping std sigma.
inline std::vector<double> aco_modulate(
    std::span<const std::complex<double>> spectrum, double sigma) {
  std::vector<std::complex<double>> t =
      idft(std::vector<std::complex<double>>(spectrum.begin(), spectrum.end()));
  const double a = aco_time_scale(sigma, spectrum.size());
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double s = t[i].real() * a;
    x[i] = s > 0.0 ? s : 0.0;
  }
  return x;
}

// FFT receiver: odd bins of the DFT, compensated for the factor-1/2 ACO
// attenuation and the transmit scale. One-tap equalization against a known
// channel is available but off by default.
inline std::vector<std::complex<double>> aco_demodulate(
    std::span<const double> y, double sigma,
    std::span<const double> equalizer_taps = {}) {
  const std::size_t n = y.size();
  if (n % 4 != 0 || !is_power_of_two(n))
    throw std::invalid_argument("aco_demodulate: bad length");
  std::vector<std::complex<double>> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = {y[i], 0.0};
  std::vector<std::complex<double>> spec = dft(std::move(in));
  const double gain = 2.0 / aco_time_scale(sigma, n);
  std::vector<std::complex<double>> softs(n / 4);
  for (std::size_t k = 0; k < n / 4; ++k) {
    std::complex<double> s = spec[2 * k + 1] * gain;
    if (!equalizer_taps.empty()) {
      std::complex<double> h(0.0, 0.0);
      for (std::size_t d = 0; d < equalizer_taps.size(); ++d) {
        double ang = -2.0 * std::numbers::pi *
                     static_cast<double>((2 * k + 1) * d) /
                     static_cast<double>(n);
        h += equalizer_taps[d] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      s /= h;
    }
    softs[k] = s;
  }
  return softs;
}

}  // namespace hcm
