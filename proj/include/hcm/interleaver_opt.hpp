#pragma once

// Search for the chip permutation that best spreads intra-symbol ISI at
// the HCM decoder for a given FIR channel: exhaustive for small N,
// simulated annealing over transpositions otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcm/modem.hpp"
#include "hcm/rng.hpp"
#include "hcm/transforms.hpp"

namespace hcm {

struct IsiCostReport {
  Interleaver interleaver;
  double cost = 0.0;  // max |off-diagonal leakage| over data components
  // leakage[k][j]: decoder output on component j for unit data on
  // component k, through permute -> circular convolve -> depermute ->
  // decode (linear part only). Row/column 0 and the diagonal are excluded
  // from the cost.
  std::vector<std::vector<double>> leakage;
};

namespace detail {

// Leakage of the permuted chain. With interleave(x)[i] = x[perm[i]] and a
// circular delay of d chips on the channel input, the deinterleaved chip j
// receives x[perm[(inverse[j] - d) mod N]]; each tap therefore contributes
// h_d * (1/N) S P_d S, a Hadamard conjugation of a permutation matrix.
inline std::vector<std::vector<double>> leakage_matrix(
    const Interleaver& il, std::span<const double> taps) {
  const std::size_t n = il.size();
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  std::vector<double> col(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  BinaryHadamard had = build_binary_hadamard(HadamardOrder(n));
  for (std::size_t d = 0; d < taps.size(); ++d) {
    if (taps[d] == 0.0) continue;
    if (d == 0) {
      for (std::size_t k = 0; k < n; ++k) b[k][k] += taps[0];
      continue;
    }
    // chip map for delay d: source[j] = perm[(inverse[j] - d) mod N]
    std::vector<std::size_t> src(n);
    for (std::size_t j = 0; j < n; ++j)
      src[j] = il.perm[(il.inverse[j] + n - (d % n)) % n];
    // B_d[i][k] = (1/N) sum_j S[k][j] S[i][src[j]]; one FWHT per data row i.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        col[j] = static_cast<double>(had.sign(i, src[j]));
      fwht_inplace(col);
      for (std::size_t k = 0; k < n; ++k) b[i][k] += taps[d] * col[k] * inv_n;
    }
  }
  return b;
}

inline double cost_from_leakage(const std::vector<std::vector<double>>& b) {
  double cost = 0.0;
  for (std::size_t k = 1; k < b.size(); ++k)
    for (std::size_t j = 1; j < b.size(); ++j)
      if (j != k) cost = std::max(cost, std::abs(b[k][j]));
  return cost;
}

}  // namespace detail

inline IsiCostReport isi_cost(const Interleaver& il,
                              std::span<const double> taps) {
  if (il.size() < 2 || !is_power_of_two(il.size()))
    throw std::invalid_argument("isi_cost: N must be a power of two >= 2");
  IsiCostReport report;
  report.interleaver = il;
  report.leakage = detail::leakage_matrix(il, taps);
  report.cost = detail::cost_from_leakage(report.leakage);
  return report;
}

namespace detail {

inline double perm_cost(const Interleaver& il, std::span<const double> taps) {
  return cost_from_leakage(leakage_matrix(il, taps));
}

inline Interleaver exhaustive_best(std::span<const double> taps,
                                   std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best_perm = perm;
  double best = perm_cost(Interleaver::from_permutation(perm), taps);
  while (std::next_permutation(perm.begin(), perm.end())) {
    double c = perm_cost(Interleaver::from_permutation(perm), taps);
    if (c < best) {
      best = c;
      best_perm = perm;
    }
  }
  return Interleaver::from_permutation(best_perm);
}

}  // namespace detail

// Simulated annealing over random transpositions (geometric cooling,
// ratio 0.995). Never worse than the identity permutation and
// bit-reproducible for a fixed seed.
inline Interleaver anneal_interleaver(std::span<const double> taps,
                                      std::size_t n, std::size_t budget,
                                      std::uint64_t seed = 1) {
  Interleaver identity = Interleaver::identity(n);
  const double identity_cost = detail::perm_cost(identity, taps);
  if (identity_cost == 0.0) return identity;

  CounterRng rng(mix_key(seed, 0x1507e2, n));
  auto random_perm = [&] {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(p[i], p[rng.uniform_below(static_cast<std::uint32_t>(i + 1))]);
    return p;
  };

  // Initial temperature from the cost spread of 100 random permutations.
  double lo = identity_cost, hi = identity_cost;
  for (int i = 0; i < 100; ++i) {
    double c = detail::perm_cost(Interleaver::from_permutation(random_perm()),
                                 taps);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  double temp = std::max(hi - lo, 1e-6);

  std::vector<std::size_t> cur = identity.perm;
  double cur_cost = identity_cost;
  std::vector<std::size_t> best = cur;
  double best_cost = cur_cost;
  for (std::size_t it = 0; it < budget; ++it) {
    std::size_t a = rng.uniform_below(static_cast<std::uint32_t>(n));
    std::size_t b = rng.uniform_below(static_cast<std::uint32_t>(n));
    if (a == b) continue;
    std::swap(cur[a], cur[b]);
    double c = detail::perm_cost(Interleaver::from_permutation(cur), taps);
    if (c <= cur_cost || rng.uniform() < std::exp((cur_cost - c) / temp)) {
      cur_cost = c;
      if (c < best_cost) {
        best_cost = c;
        best = cur;
      }
    } else {
      std::swap(cur[a], cur[b]);  // reject
    }
    temp *= 0.995;
  }
  if (best_cost <= identity_cost) return Interleaver::from_permutation(best);
  return identity;
}

// Best permutation found within the budget: exhaustive for N <= 8,
// annealing otherwise.
inline Interleaver optimize_interleaver(std::span<const double> taps,
                                        std::size_t n, std::size_t budget,
                                        std::uint64_t seed = 1) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("optimize_interleaver: N must be a power of two");
  if (budget < 1) throw std::invalid_argument("optimize_interleaver: budget >= 1");
  if (n <= 8) {
    Interleaver identity = Interleaver::identity(n);
    if (detail::perm_cost(identity, taps) == 0.0) return identity;
    return detail::exhaustive_best(taps, n);
  }
  return anneal_interleaver(taps, n, budget, seed);
}

// Text serialization: first line N, second line the permutation indices.
inline void save_interleaver(const Interleaver& il, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write interleaver file: " + path);
  out << il.size() << "\n";
  for (std::size_t i = 0; i < il.size(); ++i)
    out << il.perm[i] << (i + 1 == il.size() ? "\n" : " ");
}

inline Interleaver load_interleaver(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read interleaver file: " + path);
  std::size_t n = 0;
  in >> n;
  if (!in || n == 0) throw std::runtime_error("bad interleaver file: " + path);
  std::vector<std::size_t> perm(n);
  for (auto& p : perm)
    if (!(in >> p)) throw std::runtime_error("bad interleaver file: " + path);
  return Interleaver::from_permutation(std::move(perm));
}

}  // namespace hcm
