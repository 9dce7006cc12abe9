#pragma once

// Monte Carlo engine: end-to-end bit pipelines for HCM, DCR-HCM,
// interleaved HCM and ACO-OFDM, with deterministic trial-parallel BER
// estimation.
//
// Determinism contract: every trial draws from a counter-based stream
// keyed by (base_seed + point_index, trial_index), trials are scheduled in
// rounds whose sizes depend only on accumulated deterministic counts, and
// error counting is a plain sum. Results are therefore invariant to the
// worker count.
//
// FIR state is carried across the symbols of a trial. Trials start with a
// cleared delay line; with cp_len >= taps-1 the stripped data chips are
// unaffected by the boundary, so trials are exactly independent.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hcm/aco_ofdm.hpp"
#include "hcm/analysis.hpp"
#include "hcm/channel.hpp"
#include "hcm/interleaver_opt.hpp"
#include "hcm/modem.hpp"
#include "hcm/rng.hpp"
#include "hcm/transforms.hpp"

namespace hcm {

enum class Scheme { Hcm, DcrHcm, InterleavedHcm, AcoOfdm };

inline std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Hcm: return "hcm";
    case Scheme::DcrHcm: return "dcr-hcm";
    case Scheme::InterleavedHcm: return "interleaved-hcm";
    case Scheme::AcoOfdm: return "aco-ofdm";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& name) {
  if (name == "hcm") return Scheme::Hcm;
  if (name == "dcr-hcm") return Scheme::DcrHcm;
  if (name == "interleaved-hcm") return Scheme::InterleavedHcm;
  if (name == "aco-ofdm") return Scheme::AcoOfdm;
  throw std::invalid_argument("unknown scheme: " + name);
}

struct SweepSpec {
  Scheme scheme = Scheme::Hcm;
  std::size_t n = 128;
  std::size_t m = 2;  // PAM order (HCM family) or QAM order (ACO-OFDM)
  std::size_t cp_len = 0;
  std::vector<double> taps{1.0};
  double noise_dbm = -30.0;
  std::vector<double> power_dbm;  // ascending grid of average optical powers
  std::uint64_t min_errors = 200;
  std::uint64_t max_bits = 20'000'000;
  std::uint64_t base_seed = 0x686d63u;
  double p0 = 0.5;                // LED peak power, watts
  std::size_t workers = 1;        // 0 = hardware concurrency
  double data_rate_mbps = 100.0;  // metadata only; simulation is rate-agnostic
  std::optional<Interleaver> interleaver;  // InterleavedHcm only
  std::size_t interleaver_budget = 20'000;  // annealing budget when no file given

  void validate() const {
    if (!is_power_of_two(n)) throw std::invalid_argument("N must be a power of two");
    if (cp_len >= n) throw std::invalid_argument("cyclic prefix out of range");
    if (power_dbm.empty()) throw std::invalid_argument("empty power grid");
    if (!std::is_sorted(power_dbm.begin(), power_dbm.end()))
      throw std::invalid_argument("power grid must be ascending");
    if (taps.empty()) throw std::invalid_argument("empty channel taps");
    if (scheme == Scheme::AcoOfdm) {
      QamConstellation check(m);
      if (n % 4 != 0) throw std::invalid_argument("ACO-OFDM needs N divisible by 4");
    } else {
      PamConstellation check(m);
    }
    if (interleaver && interleaver->size() != n)
      throw std::invalid_argument("interleaver size does not match N");
  }
};

struct BerPoint {
  double power_dbm = 0.0;
  double ber = 0.0;
  double ci95 = 0.0;  // Wald 95% half-width
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  bool reached_min_errors = false;
};

namespace detail {

// Ensemble mean chip of a unit-scale DCR-HCM waveform, estimated once per
// (N, M) from a fixed-key stream.
inline double dcr_mean_chip(std::size_t n, std::size_t m) {
  PamConstellation pam(m);
  CounterRng rng(mix_key(0xdc2aeaau, n, m));
  const std::size_t symbols = 4096;
  std::vector<std::uint8_t> bits((n - 1) * pam.bits_per_symbol());
  double sum = 0.0;
  for (std::size_t s = 0; s < symbols; ++s) {
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    std::vector<double> x = dcr_encode(pam_map(bits, n, pam));
    for (double c : x) sum += c;
  }
  return sum / static_cast<double>(symbols * n);
}

class HcmPipeline {
 public:
  HcmPipeline(const SweepSpec& spec, double power_w)
      : spec_(spec), pam_(spec.m) {
    const bool interleaved = spec.scheme == Scheme::InterleavedHcm;
    il_ = interleaved ? (spec.interleaver
                             ? *spec.interleaver
                             : optimize_interleaver(spec.taps, spec.n,
                                                    spec.interleaver_budget,
                                                    spec.base_seed))
                      : Interleaver::identity(spec.n);
    const double unit_mean = spec.scheme == Scheme::DcrHcm
                                 ? dcr_mean_chip(spec.n, spec.m)
                                 : hcm_mean_chip(spec.n);
    gain_ = power_w / unit_mean;
    if (spec.taps.size() > 1 && spec.cp_len + 1 < spec.taps.size())
      throw std::invalid_argument("cyclic prefix shorter than channel memory");
    // The receiver knows the transmit gain and the channel DC response,
    // nothing else: plain FWHT + slicer. Any per-component bias or gain
    // spread a dispersive channel introduces is taken as-is; spreading it
    // is the interleaver's job.
    double dc = 0.0;
    for (double t : spec.taps) dc += t;
    rx_scale_ = gain_ * dc;
  }

  std::size_t bits_per_symbol() const {
    return (spec_.n - 1) * pam_.bits_per_symbol();
  }

  // One trial: nsym symbols through the full chain; returns bit errors.
  std::uint64_t run_trial(CounterRng& rng, std::size_t nsym) const {
    const std::size_t n = spec_.n;
    HardLimiter limiter(spec_.p0);
    AwgnSource awgn(dbm_to_linear(spec_.noise_dbm));
    FirChannel fir(spec_.taps);
    std::vector<std::uint8_t> bits(bits_per_symbol());
    std::uint64_t errors = 0;
    for (std::size_t s = 0; s < nsym; ++s) {
      for (auto& b : bits) b = rng.bit() ? 1 : 0;
      std::vector<double> u = pam_map(bits, n, pam_);
      std::vector<double> x = spec_.scheme == Scheme::DcrHcm ? dcr_encode(u)
                                                             : hcm_encode(u);
      for (double& c : x) c *= gain_;
      if (spec_.scheme == Scheme::InterleavedHcm) x = interleave(x, il_);
      std::vector<double> tx =
          spec_.cp_len > 0 ? add_cyclic_prefix(x, spec_.cp_len) : std::move(x);
      limiter.apply(tx);
      fir.process(tx);
      awgn.apply(tx, rng);
      std::vector<double> y =
          spec_.cp_len > 0 ? strip_cyclic_prefix(tx, spec_.cp_len)
                           : std::move(tx);
      if (spec_.scheme == Scheme::InterleavedHcm) y = deinterleave(y, il_);
      std::vector<double> v = hcm_decode(y);
      for (std::size_t k = 1; k < n; ++k) {
        std::size_t idx = pam_.slice(v[k] / rx_scale_ + 0.5);
        std::uint32_t g = gray_encode(static_cast<std::uint32_t>(idx));
        std::uint32_t want = 0;
        const std::size_t off = (k - 1) * pam_.bits_per_symbol();
        for (std::size_t b = 0; b < pam_.bits_per_symbol(); ++b)
          want = (want << 1) | bits[off + b];
        errors += static_cast<std::uint64_t>(std::popcount(g ^ want));
      }
    }
    return errors;
  }

  const Interleaver& interleaver() const { return il_; }
  double gain() const { return gain_; }

 private:
  const SweepSpec& spec_;
  PamConstellation pam_;
  Interleaver il_;
  double gain_ = 1.0;
  double rx_scale_ = 1.0;  // gain_ times the channel DC response
};

class AcoPipeline {
 public:
  AcoPipeline(const SweepSpec& spec, double power_w)
      : spec_(spec), qam_(spec.m) {
    sigma_ = aco_sigma_for_power(power_w, spec.p0);
  }

  std::size_t bits_per_symbol() const {
    return (spec_.n / 4) * qam_.bits_per_symbol();
  }

  std::uint64_t run_trial(CounterRng& rng, std::size_t nsym) const {
    HardLimiter limiter(spec_.p0);
    AwgnSource awgn(dbm_to_linear(spec_.noise_dbm));
    FirChannel fir(spec_.taps);
    std::vector<std::uint8_t> bits(bits_per_symbol());
    std::uint64_t errors = 0;
    std::vector<std::uint8_t> rx;
    for (std::size_t s = 0; s < nsym; ++s) {
      for (auto& b : bits) b = rng.bit() ? 1 : 0;
      std::vector<std::complex<double>> data = qam_map(bits, qam_);
      std::vector<double> x = aco_modulate(aco_map(data, spec_.n), sigma_);
      std::vector<double> tx =
          spec_.cp_len > 0 ? add_cyclic_prefix(x, spec_.cp_len) : std::move(x);
      limiter.apply(tx);
      fir.process(tx);
      awgn.apply(tx, rng);
      std::vector<double> y =
          spec_.cp_len > 0 ? strip_cyclic_prefix(tx, spec_.cp_len)
                           : std::move(tx);
      // Plain FFT slicing; no equalizer in figure-reproduction runs.
      std::vector<std::complex<double>> softs = aco_demodulate(y, sigma_);
      rx.clear();
      for (auto sft : softs) qam_.append_bits(sft, rx);
      for (std::size_t i = 0; i < bits.size(); ++i)
        errors += bits[i] != rx[i];
    }
    return errors;
  }

  double sigma() const { return sigma_; }

 private:
  const SweepSpec& spec_;
  QamConstellation qam_;
  double sigma_ = 0.0;
};

template <class Pipeline>
inline BerPoint run_point_impl(const SweepSpec& spec, std::size_t point_idx,
                               double power_dbm) {
  const double power_w = dbm_to_linear(power_dbm);
  Pipeline pipe(spec, power_w);
  const std::size_t sym_per_trial = 32;
  const std::uint64_t bits_per_trial =
      static_cast<std::uint64_t>(sym_per_trial) * pipe.bits_per_symbol();
  const std::uint64_t point_seed = spec.base_seed + point_idx;
  const std::uint64_t max_trials =
      (spec.max_bits + bits_per_trial - 1) / bits_per_trial;
  std::size_t workers = spec.workers == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : spec.workers;

  std::uint64_t done_trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t round_size = 4;
  while (done_trials < max_trials && errors < spec.min_errors) {
    const std::uint64_t count =
        std::min<std::uint64_t>(round_size, max_trials - done_trials);
    if (workers <= 1 || count < 2) {
      for (std::uint64_t t = done_trials; t < done_trials + count; ++t) {
        CounterRng rng(mix_key(point_seed, 0x7121a1u, t));
        errors += pipe.run_trial(rng, sym_per_trial);
      }
    } else {
      const std::size_t nw = std::min<std::uint64_t>(workers, count);
      std::vector<std::uint64_t> partial(nw, 0);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < nw; ++w) {
        const std::uint64_t lo = done_trials + count * w / nw;
        const std::uint64_t hi = done_trials + count * (w + 1) / nw;
        pool.emplace_back([&pipe, &partial, w, lo, hi, point_seed] {
          std::uint64_t e = 0;
          for (std::uint64_t t = lo; t < hi; ++t) {
            CounterRng rng(mix_key(point_seed, 0x7121a1u, t));
            e += pipe.run_trial(rng, 32);
          }
          partial[w] = e;
        });
      }
      for (auto& th : pool) th.join();
      for (std::uint64_t e : partial) errors += e;  // fixed-order reduction
    }
    done_trials += count;
    round_size *= 2;
  }

  BerPoint pt;
  pt.power_dbm = power_dbm;
  pt.bits = done_trials * bits_per_trial;
  pt.errors = errors;
  pt.ber = pt.bits ? static_cast<double>(errors) / static_cast<double>(pt.bits)
                   : 0.0;
  pt.ci95 = pt.bits ? 1.96 * std::sqrt(pt.ber * (1.0 - pt.ber) /
                                       static_cast<double>(pt.bits))
                    : 0.0;
  pt.reached_min_errors = errors >= spec.min_errors;
  return pt;
}

}  // namespace detail

inline BerPoint run_point(const SweepSpec& spec, std::size_t point_idx,
                          double power_dbm) {
  spec.validate();
  if (spec.scheme == Scheme::AcoOfdm)
    return detail::run_point_impl<detail::AcoPipeline>(spec, point_idx,
                                                       power_dbm);
  return detail::run_point_impl<detail::HcmPipeline>(spec, point_idx,
                                                     power_dbm);
}

using BerCurve = std::vector<BerPoint>;

inline BerCurve run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepSpec resolved = spec;
  if (resolved.scheme == Scheme::InterleavedHcm && !resolved.interleaver)
    resolved.interleaver = optimize_interleaver(
        resolved.taps, resolved.n, resolved.interleaver_budget,
        resolved.base_seed);
  BerCurve curve;
  curve.reserve(resolved.power_dbm.size());
  for (std::size_t i = 0; i < resolved.power_dbm.size(); ++i)
    curve.push_back(run_point(resolved, i, resolved.power_dbm[i]));
  return curve;
}

}  // namespace hcm
