// Command-line front end: Monte Carlo BER sweeps, closed-form link
// analysis, interleaver optimization and PAPR measurement.
//
// Exit codes: 0 ok, 1 config/flag parse failure, 2 invalid spec,
// 3 stop rule unreachable at one or more sweep points.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hcm/aco_ofdm.hpp"
#include "hcm/analysis.hpp"
#include "hcm/channel.hpp"
#include "hcm/interleaver_opt.hpp"
#include "hcm/io.hpp"
#include "hcm/modem.hpp"
#include "hcm/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSpec = 2;
constexpr int kExitStopRule = 3;

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct SimulateArgs {
  std::string config_path;
  std::string scheme = "hcm";
  std::size_t n = 128;
  std::size_t m = 2;
  std::size_t cp = 0;
  std::string taps = "1";
  double noise_dbm = -30.0;
  std::string power = "14:23:0.5";
  std::uint64_t seed = 0x686d63u;
  std::uint64_t min_errors = 200;
  std::uint64_t max_bits = 20'000'000;
  double p0 = 0.5;
  std::size_t workers = 1;
  std::string interleaver_path;
  std::string preset;
  std::string out = "sweep.csv";
};

// Config file values fill in any flag the user did not pass on the command
// line; flags win.
void apply_config(const std::map<std::string, std::string>& kv,
                  const CLI::App* cmd, SimulateArgs& a) {
  auto unset = [&](const std::string& flag) {
    return cmd->get_option(flag)->count() == 0;
  };
  const std::map<std::string, std::string> flag_of = {
      {"scheme", "--scheme"},         {"n", "--n"},
      {"m", "--m"},                   {"cp", "--cp"},
      {"taps", "--taps"},             {"noise_dbm", "--noise-dbm"},
      {"power", "--power"},           {"seed", "--seed"},
      {"min_errors", "--min-errors"}, {"max_bits", "--max-bits"},
      {"p0", "--p0"},                 {"workers", "--workers"},
      {"interleaver", "--interleaver"}, {"out", "--out"}};
  for (const auto& [key, value] : kv) {
    if (key == "data_rate_mbps") continue;  // metadata only
    auto it = flag_of.find(key);
    if (it == flag_of.end())
      throw std::runtime_error("unknown config key: " + key);
    if (!unset(it->second)) continue;  // flag wins
    if (key == "scheme") a.scheme = value;
    else if (key == "n") a.n = std::stoul(value);
    else if (key == "m") a.m = std::stoul(value);
    else if (key == "cp") a.cp = std::stoul(value);
    else if (key == "taps") a.taps = value;
    else if (key == "noise_dbm") a.noise_dbm = std::stod(value);
    else if (key == "power") a.power = value;
    else if (key == "seed") a.seed = std::stoull(value);
    else if (key == "min_errors") a.min_errors = std::stoull(value);
    else if (key == "max_bits") a.max_bits = std::stoull(value);
    else if (key == "p0") a.p0 = std::stod(value);
    else if (key == "workers") a.workers = std::stoul(value);
    else if (key == "interleaver") a.interleaver_path = value;
    else if (key == "out") a.out = value;
  }
}

hcm::SweepSpec build_spec(const SimulateArgs& a) {
  hcm::SweepSpec spec;
  spec.scheme = hcm::scheme_from_name(a.scheme);
  spec.n = a.n;
  spec.m = a.m;
  spec.cp_len = a.cp;
  spec.taps = hcm::parse_taps(a.taps);
  spec.noise_dbm = a.noise_dbm;
  spec.power_dbm = hcm::parse_power_grid(a.power);
  spec.base_seed = a.seed;
  spec.min_errors = a.min_errors;
  spec.max_bits = a.max_bits;
  spec.p0 = a.p0;
  spec.workers = a.workers;
  if (!a.interleaver_path.empty())
    spec.interleaver = hcm::load_interleaver(a.interleaver_path);
  return spec;
}

int write_sweep(const hcm::SweepSpec& spec, const std::string& csv_path) {
  hcm::BerCurve curve = hcm::run_sweep(spec);
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) {
    std::cerr << "cannot write " << csv_path << "\n";
    return kExitSpec;
  }
  csv << hcm::curve_to_csv(curve);
  csv.close();

  nlohmann::json manifest = hcm::make_manifest(spec, utc_timestamp());
  manifest["csv"] = csv_path;
  std::ofstream mf(csv_path + ".manifest.json");
  mf << manifest.dump(2) << "\n";

  bool flagged = false;
  for (const auto& p : curve) {
    std::cout << hcm::scheme_name(spec.scheme) << " " << p.power_dbm
              << " dBm  ber=" << p.ber << "  errors=" << p.errors << "/"
              << p.bits << (p.reached_min_errors ? "" : "  [below min-errors]")
              << "\n";
    if (!p.reached_min_errors) flagged = true;
  }
  return flagged ? kExitStopRule : kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
  if (!args.preset.empty()) {
    // Figure-reproduction presets; --out is used as a filename prefix.
    std::vector<hcm::SweepSpec> sweeps;
    if (args.preset == "fig6") {
      for (double noise : {-30.0, -20.0}) {
        for (auto scheme :
             {hcm::Scheme::Hcm, hcm::Scheme::DcrHcm, hcm::Scheme::AcoOfdm}) {
          hcm::SweepSpec spec;
          spec.scheme = scheme;
          spec.n = 128;
          spec.m = scheme == hcm::Scheme::AcoOfdm ? 16 : 2;
          spec.noise_dbm = noise;
          spec.power_dbm = hcm::parse_power_grid("10:23.5:0.5");
          spec.base_seed = args.seed;
          spec.min_errors = args.min_errors;
          spec.max_bits = args.max_bits;
          spec.workers = args.workers;
          sweeps.push_back(spec);
        }
      }
    } else if (args.preset == "fig7") {
      for (auto scheme : {hcm::Scheme::Hcm, hcm::Scheme::InterleavedHcm,
                          hcm::Scheme::AcoOfdm}) {
        hcm::SweepSpec spec;
        spec.scheme = scheme;
        spec.n = 128;
        spec.m = scheme == hcm::Scheme::AcoOfdm ? 16 : 2;
        spec.cp_len = 4;
        spec.taps = {0.9, 0.1};
        spec.noise_dbm = -20.0;
        spec.power_dbm = hcm::parse_power_grid("17:23:0.5");
        spec.base_seed = args.seed;
        spec.min_errors = args.min_errors;
        spec.max_bits = args.max_bits;
        spec.workers = args.workers;
        sweeps.push_back(spec);
      }
    } else {
      std::cerr << "unknown preset: " << args.preset << "\n";
      return kExitSpec;
    }
    int rc = kExitOk;
    std::string prefix = args.out;
    if (prefix.size() > 4 && prefix.substr(prefix.size() - 4) == ".csv")
      prefix.resize(prefix.size() - 4);
    for (const auto& spec : sweeps) {
      char noise[16];
      std::snprintf(noise, sizeof(noise), "%g", spec.noise_dbm);
      std::string path = prefix + "_" + hcm::scheme_name(spec.scheme) +
                         "_noise" + noise + "dbm.csv";
      int r = write_sweep(spec, path);
      if (r != kExitOk) rc = r;
    }
    return rc;
  }
  return write_sweep(build_spec(args), args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hadamard coded modulation / ACO-OFDM simulator"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a Monte Carlo BER sweep and write CSV + manifest");
  sim->add_option("--config", sim_args.config_path, "key = value config file");
  sim->add_option("--scheme", sim_args.scheme,
                  "hcm | dcr-hcm | interleaved-hcm | aco-ofdm");
  sim->add_option("--n", sim_args.n, "transform size N (power of two)");
  sim->add_option("--m", sim_args.m, "PAM (HCM) or QAM (ACO-OFDM) order");
  sim->add_option("--cp", sim_args.cp, "cyclic prefix length");
  sim->add_option("--taps", sim_args.taps, "channel impulse response, comma separated");
  sim->add_option("--noise-dbm", sim_args.noise_dbm, "noise variance in dBm");
  sim->add_option("--power", sim_args.power, "average optical power grid start:stop:step (dBm)");
  sim->add_option("--seed", sim_args.seed, "base seed");
  sim->add_option("--min-errors", sim_args.min_errors, "stop after this many bit errors");
  sim->add_option("--max-bits", sim_args.max_bits, "bit budget per point");
  sim->add_option("--p0", sim_args.p0, "LED peak power in watts");
  sim->add_option("--workers", sim_args.workers, "worker threads (0 = auto)");
  sim->add_option("--interleaver", sim_args.interleaver_path, "permutation file");
  sim->add_option("--preset", sim_args.preset, "fig6 | fig7");
  sim->add_option("--out", sim_args.out, "output CSV path (prefix for presets)");

  // analyze <quantity> evaluates the closed forms and prints JSON.
  CLI::App* analyze = app.add_subcommand("analyze", "Evaluate closed-form expressions");
  analyze->require_subcommand(1);
  double an_sigma = 1.0, an_p0 = 0.5, an_noise_var = 1e-6, an_noise_std = 1e-3,
         an_snr = 10.0, an_x = 0.0, an_power = 0.1;
  std::size_t an_m = 16, an_n = 128;
  auto emit = [](const char* name, double value) {
    nlohmann::json j;
    j[name] = value;
    std::cout << j.dump() << "\n";
  };
  CLI::App* a_pow = analyze->add_subcommand("aco-power", "average optical power of ACO-OFDM");
  a_pow->add_option("--sigma", an_sigma)->required();
  a_pow->add_option("--p0", an_p0);
  a_pow->callback([&] { emit("aco_power_w", hcm::aco_average_power(an_sigma, an_p0)); });
  CLI::App* a_clip = analyze->add_subcommand("clip-variance", "upper-clipping noise variance");
  a_clip->add_option("--sigma", an_sigma)->required();
  a_clip->add_option("--p0", an_p0);
  a_clip->callback([&] { emit("clip_variance_w2", hcm::aco_clip_variance(an_sigma, an_p0)); });
  CLI::App* a_snr = analyze->add_subcommand("snr", "ACO-OFDM receiver SNR");
  a_snr->add_option("--sigma", an_sigma)->required();
  a_snr->add_option("--p0", an_p0);
  a_snr->add_option("--noise-var", an_noise_var);
  a_snr->callback([&] { emit("snr", hcm::aco_snr(an_sigma, an_p0, an_noise_var)); });
  CLI::App* a_bo = analyze->add_subcommand("ber-ofdm", "analytic M-QAM OFDM BER");
  a_bo->add_option("--m", an_m);
  a_bo->add_option("--snr", an_snr)->required();
  a_bo->callback([&] { emit("ber", hcm::ber_ofdm_analytic(an_m, an_snr)); });
  CLI::App* a_bh = analyze->add_subcommand("ber-hcm", "analytic M-PAM HCM BER");
  a_bh->add_option("--m", an_m);
  a_bh->add_option("--sigma", an_sigma)->required();
  a_bh->add_option("--noise-std", an_noise_std)->required();
  a_bh->callback([&] { emit("ber", hcm::ber_hcm_analytic(an_m, an_sigma, an_noise_std)); });
  CLI::App* a_rate = analyze->add_subcommand("rate", "bits per chip of M-PAM HCM");
  a_rate->add_option("--n", an_n);
  a_rate->add_option("--m", an_m);
  a_rate->callback([&] { emit("rate", hcm::hcm_rate(an_n, an_m)); });
  CLI::App* a_q = analyze->add_subcommand("q", "Gaussian Q-function");
  a_q->add_option("--x", an_x)->required();
  a_q->callback([&] { emit("q", hcm::q_function(an_x)); });
  CLI::App* a_sig = analyze->add_subcommand(
      "aco-sigma", "pre-clipping std for a target average power");
  a_sig->add_option("--power", an_power)->required();
  a_sig->add_option("--p0", an_p0);
  a_sig->callback([&] { emit("sigma", hcm::aco_sigma_for_power(an_power, an_p0)); });

  // optimize-interleaver
  std::string oi_taps = "0.9,0.1", oi_out = "interleaver.txt";
  std::size_t oi_n = 128, oi_budget = 100000;
  std::uint64_t oi_seed = 1;
  CLI::App* oi = app.add_subcommand("optimize-interleaver",
                                    "Search for an ISI-spreading permutation");
  oi->add_option("--taps", oi_taps, "channel impulse response");
  oi->add_option("--n", oi_n, "transform size");
  oi->add_option("--budget", oi_budget, "iteration budget");
  oi->add_option("--seed", oi_seed, "annealing seed");
  oi->add_option("--out", oi_out, "output permutation file");

  // papr
  std::string papr_scheme = "hcm";
  std::size_t papr_n = 128, papr_m = 2, papr_symbols = 10000;
  std::uint64_t papr_seed = 1;
  CLI::App* papr_cmd = app.add_subcommand("papr", "Measure waveform PAPR");
  papr_cmd->add_option("--scheme", papr_scheme, "hcm | dcr-hcm | aco-ofdm");
  papr_cmd->add_option("--n", papr_n);
  papr_cmd->add_option("--m", papr_m);
  papr_cmd->add_option("--symbols", papr_symbols);
  papr_cmd->add_option("--seed", papr_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const std::exception& e) {
    // Analyze callbacks run during parse; their domain errors are spec errors.
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpec;
  }

  try {
    if (sim->parsed()) {
      if (!sim_args.config_path.empty()) {
        try {
          apply_config(hcm::parse_config_file(sim_args.config_path), sim,
                       sim_args);
        } catch (const std::exception& e) {
          std::cerr << "config error: " << e.what() << "\n";
          return kExitConfig;
        }
      }
      return cmd_simulate(sim_args);
    }
    if (oi->parsed()) {
      hcm::Interleaver best = hcm::optimize_interleaver(
          hcm::parse_taps(oi_taps), oi_n, oi_budget, oi_seed);
      hcm::save_interleaver(best, oi_out);
      hcm::IsiCostReport report = hcm::isi_cost(best, hcm::parse_taps(oi_taps));
      nlohmann::json j;
      j["n"] = oi_n;
      j["cost"] = report.cost;
      j["out"] = oi_out;
      std::cout << j.dump() << "\n";
      return kExitOk;
    }
    if (papr_cmd->parsed()) {
      hcm::CounterRng rng(hcm::mix_key(papr_seed, 0x9a92u));
      std::vector<double> chips;
      chips.reserve(papr_n * papr_symbols);
      std::vector<double> per_symbol;
      if (papr_scheme == "aco-ofdm") {
        hcm::QamConstellation qam(papr_m < 4 ? 16 : papr_m);
        std::vector<std::uint8_t> bits((papr_n / 4) * qam.bits_per_symbol());
        for (std::size_t s = 0; s < papr_symbols; ++s) {
          for (auto& b : bits) b = rng.bit() ? 1 : 0;
          auto x = hcm::aco_modulate(
              hcm::aco_map(hcm::qam_map(bits, qam), papr_n), 1.0);
          chips.insert(chips.end(), x.begin(), x.end());
        }
      } else if (papr_scheme == "hcm" || papr_scheme == "dcr-hcm") {
        hcm::PamConstellation pam(papr_m);
        std::vector<std::uint8_t> bits((papr_n - 1) * pam.bits_per_symbol());
        for (std::size_t s = 0; s < papr_symbols; ++s) {
          for (auto& b : bits) b = rng.bit() ? 1 : 0;
          auto u = hcm::pam_map(bits, papr_n, pam);
          auto x = papr_scheme == "dcr-hcm" ? hcm::dcr_encode(u)
                                            : hcm::hcm_encode(u);
          chips.insert(chips.end(), x.begin(), x.end());
        }
      } else {
        std::cerr << "unknown scheme: " << papr_scheme << "\n";
        return kExitSpec;
      }
      double peak = *std::max_element(chips.begin(), chips.end());
      double mean = 0.0;
      for (double c : chips) mean += c;
      mean /= static_cast<double>(chips.size());
      std::vector<double> sorted = chips;
      std::sort(sorted.begin(), sorted.end());
      auto pct = [&](double q) {
        return sorted[static_cast<std::size_t>(q * (sorted.size() - 1))] / mean;
      };
      nlohmann::json j;
      j["scheme"] = papr_scheme;
      j["n"] = papr_n;
      j["symbols"] = papr_symbols;
      j["max_chip"] = peak;
      j["mean_chip"] = mean;
      j["papr"] = peak / mean;
      j["chip_over_mean_p99"] = pct(0.99);
      j["chip_over_mean_p999"] = pct(0.999);
      std::cout << j.dump() << "\n";
      return kExitOk;
    }
    return kExitOk;  // analyze handled via callbacks
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpec;
  }
}
