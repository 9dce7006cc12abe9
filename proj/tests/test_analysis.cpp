#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hcm/analysis.hpp"

namespace {

double normal_pdf(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) /
         (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Composite Simpson integration of f over [a, b].
template <typename F>
double simpson(F f, double a, double b, int panels) {
  double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// E[clip(X)] for X ~ N(0, sigma^2), clip to [0, p0], by quadrature.
double mean_oracle(double sigma, double p0) {
  double body = simpson([&](double x) { return x * normal_pdf(x, sigma); },
                        0.0, p0, 4000);
  double tail =
      simpson([&](double x) { return normal_pdf(x, sigma); }, p0,
              p0 + 14.0 * sigma, 4000);
  return body + p0 * tail;
}

// E[(X - p0)^2 ; X > p0], the upper-clip distortion, by quadrature.
double clip_var_oracle(double sigma, double p0) {
  return simpson(
      [&](double x) { return (x - p0) * (x - p0) * normal_pdf(x, sigma); },
      p0, p0 + 14.0 * sigma, 8000);
}

}  // namespace

TEST_CASE("q_function") {
  CHECK(hcm::q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hcm::q_function(1.0) == doctest::Approx(0.158655253931).epsilon(1e-10));
  CHECK(hcm::q_function(2.0) == doctest::Approx(0.022750131948).epsilon(1e-10));
  for (double x : {0.3, 1.7, 2.9})
    CHECK(hcm::q_function(-x) ==
          doctest::Approx(1.0 - hcm::q_function(x)).epsilon(1e-12));
}

TEST_CASE("aco_average_power against quadrature") {
  const double p0 = 0.5;
  for (double sigma : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    double got = hcm::aco_average_power(sigma, p0);
    double expect = mean_oracle(sigma, p0);
    CHECK(std::abs(got - expect) < 1e-8);
  }
  // sigma << p0: clipping above is negligible, mean -> sigma/sqrt(2 pi).
  CHECK(hcm::aco_average_power(0.01, p0) ==
        doctest::Approx(0.01 / std::sqrt(2.0 * std::numbers::pi))
            .epsilon(1e-9));
  // sigma >> p0: mean saturates just below p0/2.
  double near = hcm::aco_average_power(50.0, p0);
  CHECK(near < 0.25);
  CHECK(near > 0.249);
  CHECK_THROWS_AS(hcm::aco_average_power(-0.1, p0), std::invalid_argument);
}

TEST_CASE("aco_clip_variance against quadrature") {
  const double p0 = 0.5;
  for (double sigma : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    double got = hcm::aco_clip_variance(sigma, p0);
    double expect = clip_var_oracle(sigma, p0);
    CHECK(std::abs(got - expect) < 1e-8);
  }
  CHECK(hcm::aco_clip_variance(0.02, p0) < 1e-12);
  // No upper limit means no upper-clip distortion... p0 = 0 clips all of
  // the positive half instead: E[X^2; X > 0] = sigma^2 / 2.
  CHECK(hcm::aco_clip_variance(0.4, 0.0) ==
        doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("aco_snr combines thermal and clipping noise") {
  const double p0 = 0.5, nv = 1e-5;
  double snr = hcm::aco_snr(0.1, p0, nv);
  CHECK(snr == doctest::Approx(0.01 / (nv + hcm::aco_clip_variance(0.1, p0)))
                   .epsilon(1e-12));
  // Monotone in sigma while clipping is negligible.
  CHECK(hcm::aco_snr(0.05, p0, nv) < hcm::aco_snr(0.1, p0, nv));
  CHECK_THROWS_AS(hcm::aco_snr(0.1, p0, 0.0), std::invalid_argument);
}

TEST_CASE("ber_ofdm_analytic") {
  // 4-QAM reduces to Q(sqrt(snr)).
  CHECK(hcm::ber_ofdm_analytic(4, 4.0) ==
        doctest::Approx(hcm::q_function(2.0)).epsilon(1e-12));
  CHECK(hcm::ber_ofdm_analytic(16, 10.0) ==
        doctest::Approx(0.75 * hcm::q_function(std::sqrt(2.0)))
            .epsilon(1e-12));
  CHECK_THROWS_AS(hcm::ber_ofdm_analytic(8, 1.0), std::invalid_argument);
}

TEST_CASE("ber_hcm_analytic and the power-axis bridge") {
  // OOK reduces to Q(sigma / noise_std).
  CHECK(hcm::ber_hcm_analytic(2, 0.3, 0.1) ==
        doctest::Approx(hcm::q_function(3.0)).epsilon(1e-12));
  CHECK(hcm::ber_hcm_analytic(4, 0.3, 0.1) ==
        doctest::Approx(0.75 * hcm::q_function(std::sqrt(3.0 / 15.0) * 3.0))
            .epsilon(1e-12));
  CHECK_THROWS_AS(hcm::ber_hcm_analytic(2, 0.3, 0.0), std::invalid_argument);

  // OOK bridge: sigma = P sqrt(N) / (N - 1).
  CHECK(hcm::hcm_signal_sigma(1e-3, 128, 2) ==
        doctest::Approx(1e-3 * std::sqrt(128.0) / 127.0).epsilon(1e-12));
  // 4-PAM has a per-component std of g sqrt(5/36).
  CHECK(hcm::hcm_signal_sigma(2.0, 16, 4) ==
        doctest::Approx(2.0 * 2.0 * 4.0 / 15.0 * std::sqrt(5.0 / 36.0))
            .epsilon(1e-12));
}

TEST_CASE("aco_sigma_for_power inverts aco_average_power") {
  const double p0 = 0.5;
  for (double target : {0.01, 0.05, 0.1, 0.2, 0.24}) {
    double sigma = hcm::aco_sigma_for_power(target, p0);
    CHECK(hcm::aco_average_power(sigma, p0) ==
          doctest::Approx(target).epsilon(1e-7));
  }
  CHECK_THROWS_AS(hcm::aco_sigma_for_power(0.25, p0), std::domain_error);
  CHECK_THROWS_AS(hcm::aco_sigma_for_power(0.3, p0), std::domain_error);
  CHECK_THROWS_AS(hcm::aco_sigma_for_power(-1.0, p0), std::invalid_argument);
}

TEST_CASE("papr and rate") {
  std::vector<double> flat(8, 0.7);
  CHECK(hcm::papr(flat) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> spiky{0.0, 0.0, 0.0, 4.0};
  CHECK(hcm::papr(spiky) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(hcm::papr(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(hcm::papr(std::vector<double>{0.0, 0.0}),
                  std::invalid_argument);

  CHECK(hcm::hcm_rate(128, 2) == doctest::Approx(127.0 / 128.0).epsilon(1e-15));
  CHECK(hcm::hcm_rate(16, 4) == doctest::Approx(15.0 / 8.0).epsilon(1e-15));
}
