#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#ifndef HCMSIM_PATH
#error "HCMSIM_PATH must point at the hcmsim binary"
#endif

namespace {

int run(const std::string& args, std::string* out_path = nullptr) {
  std::string cmd = std::string(HCMSIM_PATH) + " " + args;
  if (out_path) cmd += " > " + *out_path + " 2>/dev/null";
  else cmd += " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json run_json(const std::string& args) {
  std::string tmp = "cli_out.json";
  REQUIRE(run(args, &tmp) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(tmp));
  std::remove(tmp.c_str());
  return j;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("no-such-command") == 1);
  CHECK(run("simulate --scheme bogus --power 16 --max-bits 100000") == 2);
  CHECK(run("simulate --n 48 --power 16 --max-bits 100000") == 2);
  // Stop rule unreachable: essentially noiseless, zero errors.
  CHECK(run("simulate --n 32 --power 20 --noise-dbm -120 --max-bits 100000 "
            "--out cli_quiet.csv") == 3);
  std::remove("cli_quiet.csv");
  std::remove("cli_quiet.csv.manifest.json");
}

TEST_CASE("simulate writes the CSV contract and a manifest") {
  const std::string csv = "cli_sweep.csv";
  CHECK(run("simulate --n 32 --power 15:16:0.5 --noise-dbm -20 "
            "--min-errors 50 --max-bits 400000 --out " + csv) == 0);
  std::string text = slurp(csv);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "power_dbm,ber,ci95,bits,errors");
  int rows = 0;
  std::string row;
  while (std::getline(lines, row)) {
    if (row.empty()) continue;
    ++rows;
    int commas = 0;
    for (char c : row) commas += c == ',';
    CHECK(commas == 4);
  }
  CHECK(rows == 3);

  nlohmann::json manifest =
      nlohmann::json::parse(slurp(csv + ".manifest.json"));
  CHECK(manifest["spec"]["n"] == 32);
  CHECK(manifest["spec"]["scheme"] == "hcm");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("tool_version"));

  // Byte-identical rerun.
  const std::string csv2 = "cli_sweep2.csv";
  CHECK(run("simulate --n 32 --power 15:16:0.5 --noise-dbm -20 "
            "--min-errors 50 --max-bits 400000 --out " + csv2) == 0);
  CHECK(slurp(csv2) == text);

  std::remove(csv.c_str());
  std::remove((csv + ".manifest.json").c_str());
  std::remove(csv2.c_str());
  std::remove((csv2 + ".manifest.json").c_str());
}

TEST_CASE("config file fills unset flags and flags win") {
  std::ofstream cfg("cli_cfg.ini");
  cfg << "# test config\n"
      << "[link]\n"
      << "n = 32\n"
      << "noise_dbm = -20\n"
      << "power = 15:16:1\n"
      << "min_errors = 50\n"
      << "max_bits = 400000\n"
      << "out = cli_cfg_a.csv\n";
  cfg.close();
  CHECK(run("simulate --config cli_cfg.ini") == 0);
  nlohmann::json a =
      nlohmann::json::parse(slurp("cli_cfg_a.csv.manifest.json"));
  CHECK(a["spec"]["n"] == 32);

  // --power on the command line overrides the config value.
  CHECK(run("simulate --config cli_cfg.ini --power 16 --out cli_cfg_b.csv") == 0);
  nlohmann::json b =
      nlohmann::json::parse(slurp("cli_cfg_b.csv.manifest.json"));
  CHECK(b["spec"]["power_dbm"].size() == 1);
  CHECK(b["spec"]["power_dbm"][0] == 16.0);

  std::ofstream bad("cli_bad.ini");
  bad << "nonsense_key = 1\n";
  bad.close();
  CHECK(run("simulate --config cli_bad.ini") == 1);

  std::remove("cli_cfg.ini");
  std::remove("cli_bad.ini");
  for (const char* f : {"cli_cfg_a.csv", "cli_cfg_a.csv.manifest.json",
                        "cli_cfg_b.csv", "cli_cfg_b.csv.manifest.json"})
    std::remove(f);
}

TEST_CASE("analyze prints closed forms as JSON") {
  CHECK(run_json("analyze q --x 0")["q"] == 0.5);
  double p = run_json("analyze aco-power --sigma 0.1 --p0 0.5")["aco_power_w"];
  CHECK(p == doctest::Approx(0.0398942).epsilon(1e-4));
  double r = run_json("analyze rate --n 128 --m 2")["rate"];
  CHECK(r == doctest::Approx(127.0 / 128.0).epsilon(1e-12));
  CHECK(run_json("analyze ber-hcm --m 2 --sigma 0.3 --noise-std 0.1")["ber"] ==
        doctest::Approx(0.0013499).epsilon(1e-3));
  // Out-of-domain request is a spec error (exit 2).
  CHECK(run("analyze aco-sigma --power 0.3 --p0 0.5") == 2);
}

TEST_CASE("optimize-interleaver writes a loadable permutation file") {
  const std::string perm = "cli_perm.txt";
  std::string out = "cli_oi.json";
  REQUIRE(run("optimize-interleaver --taps 0.9,0.1 --n 16 --budget 300 "
              "--seed 3 --out " + perm, &out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["n"] == 16);
  CHECK(j["cost"].get<double>() >= 0.0);
  std::remove(out.c_str());

  std::ifstream in(perm);
  std::size_t n = 0;
  in >> n;
  CHECK(n == 16);

  // The file feeds back into an interleaved sweep.
  CHECK(run("simulate --scheme interleaved-hcm --n 16 --cp 2 --taps 0.9,0.1 "
            "--noise-dbm -20 --power 16 --min-errors 20 --max-bits 200000 "
            "--interleaver " + perm + " --out cli_il.csv") == 0);
  std::remove(perm.c_str());
  std::remove("cli_il.csv");
  std::remove("cli_il.csv.manifest.json");
}

TEST_CASE("papr reports the bounded HCM peak") {
  nlohmann::json j = run_json("papr --scheme hcm --n 64 --m 2 --symbols 500");
  CHECK(j["papr"].get<double>() <= 2.0 + 1e-9);
  CHECK(j["mean_chip"].get<double>() > 0.0);
  nlohmann::json d =
      run_json("papr --scheme dcr-hcm --n 64 --m 2 --symbols 500");
  CHECK(d["mean_chip"].get<double>() < j["mean_chip"].get<double>());
}
