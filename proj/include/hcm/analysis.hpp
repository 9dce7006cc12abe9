#pragma once

// Closed-form link analysis: clipped-Gaussian statistics of ACO-OFDM,
// SNR, analytic bit error rates, PAPR and rate accounting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hcm {

// Gaussian tail probability Q(x) = P(Z > x).
inline double q_function(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// Average optical power of ACO-OFDM with pre-clipping std sigma through a
// peak limiter at p0:
//   P = sigma/sqrt(2 pi) (1 - exp(-p0^2 / 2 sigma^2)) + p0 Q(p0/sigma).
inline double aco_average_power(double sigma, double p0) {
  if (sigma <= 0.0 || p0 <= 0.0)
    throw std::invalid_argument("aco_average_power: inputs must be positive");
  const double r = p0 / sigma;
  return sigma / std::sqrt(2.0 * std::numbers::pi) *
             (1.0 - std::exp(-0.5 * r * r)) +
         p0 * q_function(r);
}

// Variance of the upper-clipping noise:
//   sigma_uc^2 = (p0^2 + sigma^2) Q(p0/sigma)
//              - p0 sigma / sqrt(2 pi) exp(-p0^2 / 2 sigma^2).
// Lower clipping is orthogonal to the data (sigma_lc^2 = 0).
inline double aco_clip_variance(double sigma, double p0) {
  if (sigma <= 0.0 || p0 < 0.0)
    throw std::invalid_argument("aco_clip_variance: bad inputs");
  const double r = p0 / sigma;
  double v = (p0 * p0 + sigma * sigma) * q_function(r) -
             p0 * sigma / std::sqrt(2.0 * std::numbers::pi) *
                 std::exp(-0.5 * r * r);
  return v > 0.0 ? v : 0.0;
}

// SNR = sigma^2 / (noise_var + clip variance), stated at the transmit
// signal. Gain convention: the FFT receiver compensates the factor-1/2
// clipping attenuation of the data but not of the channel noise, so the
// SNR it realizes on the sliced symbols is half this value.
inline double aco_snr(double sigma, double p0, double noise_var) {
  if (noise_var <= 0.0)
    throw std::invalid_argument("aco_snr: noise variance must be > 0");
  return sigma * sigma / (noise_var + aco_clip_variance(sigma, p0));
}

// Square M-QAM OFDM bit error rate at a given SNR.
inline double ber_ofdm_analytic(std::size_t m, double snr) {
  const double sqm = std::sqrt(static_cast<double>(m));
  if (std::lround(sqm) * std::lround(sqm) != static_cast<long>(m))
    throw std::invalid_argument("ber_ofdm_analytic: M must be square");
  return 2.0 * (sqm - 1.0) / (sqm * std::log2(sqm)) *
         q_function(std::sqrt(3.0 * snr / static_cast<double>(m - 1)));
}

// M-PAM HCM bit error rate in an ideal channel. `sigma` is the per-chip
// standard deviation of the data-bearing (AC) part of the transmitted
// waveform; the decoder sees independent Gaussian noise of std noise_std
// on each data component.
inline double ber_hcm_analytic(std::size_t m, double sigma, double noise_std) {
  if (noise_std <= 0.0)
    throw std::invalid_argument("ber_hcm_analytic: noise std must be > 0");
  const double md = static_cast<double>(m);
  return 2.0 * (md - 1.0) / (md * std::log2(md)) *
         q_function(std::sqrt(3.0 / (md * md - 1.0)) * sigma / noise_std);
}

// AC standard deviation of an M-PAM HCM chip stream whose average optical
// power is avg_power. Bridges the power-sweep axis to ber_hcm_analytic:
// gain g = 2 P sqrt(N) / (N-1), per-component deviation g * sd(PAM level).
inline double hcm_signal_sigma(double avg_power, std::size_t n, std::size_t m) {
  const double g = 2.0 * avg_power * std::sqrt(static_cast<double>(n)) /
                   static_cast<double>(n - 1);
  const double md = static_cast<double>(m);
  return g * std::sqrt((md + 1.0) / (12.0 * (md - 1.0)));
}

// Invert aco_average_power in sigma by bisection. The reachable range is
// (0, p0/2): the average saturates at p0/2 as sigma grows.
inline double aco_sigma_for_power(double target_avg, double p0,
                                  double rel_tol = 1e-9) {
  if (target_avg <= 0.0 || p0 <= 0.0)
    throw std::invalid_argument("aco_sigma_for_power: inputs must be positive");
  if (target_avg >= 0.5 * p0 * (1.0 - 1e-12))
    throw std::domain_error(
        "aco_sigma_for_power: average power must be below P0/2");
  double lo = 1e-12, hi = p0;
  while (aco_average_power(hi, p0) < target_avg) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > rel_tol * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (aco_average_power(mid, p0) < target_avg ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Peak-to-ensemble-average power ratio of a waveform ensemble.
inline double papr(std::span<const double> chips) {
  if (chips.empty()) throw std::invalid_argument("papr: empty ensemble");
  double peak = 0.0, sum = 0.0;
  for (double c : chips) {
    peak = std::max(peak, c);
    sum += c;
  }
  if (sum <= 0.0) throw std::invalid_argument("papr: zero ensemble mean");
  return peak / (sum / static_cast<double>(chips.size()));
}

// Bits per chip of M-PAM HCM.
inline double hcm_rate(std::size_t n, std::size_t m) {
  return static_cast<double>(n - 1) / static_cast<double>(n) *
         std::log2(static_cast<double>(m));
}

}  // namespace hcm
