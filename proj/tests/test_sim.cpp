#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hcm/analysis.hpp"
#include "hcm/channel.hpp"
#include "hcm/sim.hpp"

namespace {

hcm::SweepSpec quick_spec() {
  hcm::SweepSpec spec;
  spec.n = 32;
  spec.m = 2;
  spec.noise_dbm = -20.0;
  spec.power_dbm = {16.0};
  spec.min_errors = 100;
  spec.max_bits = 500'000;
  return spec;
}

}  // namespace

TEST_CASE("scheme names") {
  for (auto s : {hcm::Scheme::Hcm, hcm::Scheme::DcrHcm,
                 hcm::Scheme::InterleavedHcm, hcm::Scheme::AcoOfdm})
    CHECK(hcm::scheme_from_name(hcm::scheme_name(s)) == s);
  CHECK_THROWS_AS(hcm::scheme_from_name("ofdm"), std::invalid_argument);
}

TEST_CASE("spec validation") {
  hcm::SweepSpec spec = quick_spec();
  CHECK_NOTHROW(spec.validate());

  spec.n = 48;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.power_dbm.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.power_dbm = {20.0, 18.0};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.m = 3;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.scheme = hcm::Scheme::AcoOfdm;
  spec.m = 8;  // not a square QAM order
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.taps.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("runs are deterministic and worker-count invariant") {
  hcm::SweepSpec spec = quick_spec();
  hcm::BerPoint a = hcm::run_point(spec, 0, 16.0);
  hcm::BerPoint b = hcm::run_point(spec, 0, 16.0);
  CHECK(a.errors == b.errors);
  CHECK(a.bits == b.bits);
  CHECK(a.ber == b.ber);

  spec.workers = 2;
  hcm::BerPoint c = hcm::run_point(spec, 0, 16.0);
  CHECK(c.errors == a.errors);
  CHECK(c.bits == a.bits);

  spec.workers = 1;
  spec.base_seed = 99;
  hcm::BerPoint d = hcm::run_point(spec, 0, 16.0);
  CHECK(d.errors != a.errors);
}

TEST_CASE("HCM simulation tracks the OOK closed form") {
  // Ideal channel OOK: BER = Q(g / (2 sigma_n)) with g the chip gain.
  hcm::SweepSpec spec = quick_spec();
  spec.n = 128;
  spec.min_errors = 400;
  spec.max_bits = 5'000'000;
  for (double p_dbm : {18.0, 19.0}) {
    hcm::BerPoint pt = hcm::run_point(spec, 0, p_dbm);
    const double p = hcm::dbm_to_linear(p_dbm);
    const double g = 2.0 * p * std::sqrt(128.0) / 127.0;
    const double sigma_n = std::sqrt(hcm::dbm_to_linear(spec.noise_dbm));
    const double expect = hcm::q_function(g / (2.0 * sigma_n));
    REQUIRE(pt.reached_min_errors);
    CHECK(std::abs(pt.ber - expect) < 3.0 * pt.ci95 + 0.1 * expect);
  }
}

TEST_CASE("BER decreases with power and hits zero errors when noiseless") {
  hcm::SweepSpec spec = quick_spec();
  spec.power_dbm = {14.0, 18.0};
  hcm::BerCurve curve = hcm::run_sweep(spec);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].ber > curve[1].ber);

  spec.noise_dbm = -120.0;
  spec.power_dbm = {18.0};
  spec.max_bits = 100'000;
  hcm::BerPoint quiet = hcm::run_point(spec, 0, 18.0);
  CHECK(quiet.errors == 0);
  CHECK(quiet.ber == 0.0);
  CHECK_FALSE(quiet.reached_min_errors);
  CHECK(quiet.bits >= 100'000);
}

TEST_CASE("DCR-HCM outperforms plain HCM at equal average power") {
  hcm::SweepSpec spec = quick_spec();
  spec.n = 128;
  spec.min_errors = 150;
  spec.max_bits = 2'000'000;
  hcm::BerPoint plain = hcm::run_point(spec, 0, 14.0);
  spec.scheme = hcm::Scheme::DcrHcm;
  hcm::BerPoint dcr = hcm::run_point(spec, 0, 14.0);
  REQUIRE(plain.reached_min_errors);
  CHECK(dcr.ber < plain.ber);
}

TEST_CASE("ACO-OFDM pipeline runs and tracks its closed form") {
  hcm::SweepSpec spec = quick_spec();
  spec.scheme = hcm::Scheme::AcoOfdm;
  spec.n = 128;
  spec.m = 16;
  spec.min_errors = 300;
  spec.max_bits = 4'000'000;
  // Clipping-free regime (sigma << p0), where the Gaussian clip-noise
  // closed form is tight.
  spec.noise_dbm = -10.0;
  const double p_dbm = 14.0;
  hcm::BerPoint pt = hcm::run_point(spec, 0, p_dbm);
  REQUIRE(pt.reached_min_errors);

  const double sigma = hcm::aco_sigma_for_power(hcm::dbm_to_linear(p_dbm),
                                                spec.p0);
  const double snr =
      hcm::aco_snr(sigma, spec.p0, hcm::dbm_to_linear(spec.noise_dbm));
  // The receiver realizes half the transmit-side SNR (see aco_snr).
  const double expect = hcm::ber_ofdm_analytic(16, snr / 2.0);
  CHECK(std::abs(pt.ber - expect) < 3.0 * pt.ci95 + 0.25 * expect);
}

TEST_CASE("dispersive channel needs a covering cyclic prefix") {
  hcm::SweepSpec spec = quick_spec();
  spec.taps = {0.9, 0.1};
  spec.cp_len = 0;
  CHECK_THROWS_AS(hcm::run_point(spec, 0, 16.0), std::invalid_argument);

  spec.cp_len = 2;
  spec.n = 128;
  spec.min_errors = 100;
  spec.max_bits = 2'000'000;
  hcm::BerPoint pt = hcm::run_point(spec, 0, 19.0);
  CHECK(pt.bits > 0);
  REQUIRE(pt.reached_min_errors);

  // The interleaved variant on the same channel is no worse.
  spec.scheme = hcm::Scheme::InterleavedHcm;
  spec.interleaver_budget = 800;
  hcm::BerPoint il = hcm::run_point(spec, 0, 19.0);
  CHECK(il.ber <= pt.ber + 3.0 * (il.ci95 + pt.ci95));
}
