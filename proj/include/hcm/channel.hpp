#pragma once

// Optical channel pieces: average-power normalization, the ideal hard
// limiter (peak-power LED), FIR dispersion and AWGN.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcm/rng.hpp"

namespace hcm {

inline double dbm_to_linear(double dbm) {
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double linear_to_dbm(double value) {
  return 10.0 * std::log10(value) + 30.0;
}

// Ensemble mean chip of a unit-scale HCM waveform. Holds for any PAM order
// with symmetric levels in [0, 1] and u_0 = 0.
inline double hcm_mean_chip(std::size_t n) {
  return static_cast<double>(n - 1) / (2.0 * std::sqrt(static_cast<double>(n)));
}

// Scale x so its long-run ensemble mean hits target_avg; `ensemble_mean`
// is the mean of the unscaled ensemble (analytic where available). Returns
// the applied gain for receiver calibration.
inline double power_normalize(std::span<double> x, double target_avg,
                              double ensemble_mean) {
  if (ensemble_mean <= 0.0)
    throw std::invalid_argument("power_normalize: zero or negative signal");
  if (target_avg <= 0.0)
    throw std::invalid_argument("power_normalize: target must be positive");
  const double gain = target_avg / ensemble_mean;
  for (double& c : x) c *= gain;
  return gain;
}

// Ideal peak-power limited source: clamp to [0, P0].
struct HardLimiter {
  double p0;

  explicit HardLimiter(double peak) : p0(peak) {
    if (peak <= 0.0) throw std::invalid_argument("HardLimiter: P0 must be > 0");
  }

  void apply(std::span<double> x) const {
    for (double& c : x) c = std::clamp(c, 0.0, p0);
  }
};

// Linear convolution with state carried across calls, so a chip stream can
// be fed symbol by symbol.
class FirChannel {
 public:
  explicit FirChannel(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw std::invalid_argument("FirChannel: empty taps");
    history_.assign(taps_.size() - 1, 0.0);
  }

  bool is_identity() const { return taps_.size() == 1 && taps_[0] == 1.0; }
  const std::vector<double>& taps() const { return taps_; }

  void reset() { std::fill(history_.begin(), history_.end(), 0.0); }

  void process(std::span<double> x) {
    if (taps_.size() == 1) {
      if (taps_[0] != 1.0)
        for (double& c : x) c *= taps_[0];
      return;
    }
    for (double& c : x) {
      double in = c;
      double out = taps_[0] * in;
      for (std::size_t d = 1; d < taps_.size(); ++d)
        out += taps_[d] * history_[d - 1];
      history_.insert(history_.begin(), in);
      history_.pop_back();
      c = out;
    }
  }

 private:
  std::vector<double> taps_;
  std::vector<double> history_;  // most recent input first
};

// Reproducible AWGN: i.i.d. zero-mean Gaussian with the configured
// variance, drawn from a caller-owned counter-based stream.
struct AwgnSource {
  double variance;

  explicit AwgnSource(double var) : variance(var) {
    if (var < 0.0) throw std::invalid_argument("AwgnSource: variance must be >= 0");
  }

  void apply(std::span<double> x, CounterRng& rng) const {
    if (variance == 0.0) return;
    const double sd = std::sqrt(variance);
    for (double& c : x) c += sd * rng.gaussian();
  }
};

}  // namespace hcm
