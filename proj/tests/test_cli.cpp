// End-to-end checks of the command line binary: exit codes, artifact shape,
// determinism, and the config-hash round trip. The binary path comes from
// the build via ZOMEGA_CLI_PATH.

#include "doctest.h"
#include "json.hpp"

#include "zomega/scan.hpp"
#include "zomega/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace zomega;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(ZOMEGA_CLI_PATH) + " " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  return {WEXITSTATUS(st), out};
}

// independent reprint of the canonical artifact layout: sorted keys (the
// parser's natural order), two-space indent, floats as %.17g
std::string reprint(const nlohmann::json& j, int indent = 0) {
  std::string pad(size_t(indent) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) return "{}";
    std::string s = "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) s += ",\n";
      first = false;
      s += pad + "  " + nlohmann::json(it.key()).dump() + ": " + reprint(it.value(), indent + 1);
    }
    return s + "\n" + pad + "}";
  }
  if (j.is_array()) {
    if (j.empty()) return "[]";
    std::string s = "[\n";
    bool first = true;
    for (const auto& e : j) {
      if (!first) s += ",\n";
      first = false;
      s += pad + "  " + reprint(e, indent + 1);
    }
    return s + "\n" + pad + "]";
  }
  if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    return buf;
  }
  return j.dump();
}

void check_hash_round_trip(const std::string& artifact_text) {
  nlohmann::json doc = nlohmann::json::parse(artifact_text);
  REQUIRE(doc.contains("config"));
  REQUIRE(doc.contains("config_hash"));
  std::string expect = hex_u64(fnv1a64(reprint(doc["config"])));
  CHECK(doc["config_hash"].get<std::string>() == expect);
}

}  // namespace

TEST_CASE("cli evaluates zeta at two with a certified bound") {
  CliResult r = run_cli("zeta --s 2 --format json");
  REQUIRE(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  double re = doc["result"]["re"].get<double>();
  CHECK(std::abs(re - 1.644934066848226436) <= 1e-12);
  CHECK(doc["result"]["im"].get<double>() == 0.0);
  CHECK(doc["result"]["error_bound"].get<double>() <= 1e-12);
  check_hash_round_trip(r.out);

  CliResult table = run_cli("zeta --s 2");
  CHECK(table.out.find("1.6449340668") != std::string::npos);
}

TEST_CASE("cli zeta respects conjugate symmetry through the text path") {
  CliResult a = run_cli("zeta --s 1.5+3i --n 1 --format json");
  CliResult b = run_cli("zeta --s 1.5-3i --n 1 --format json");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  nlohmann::json da = nlohmann::json::parse(a.out), db = nlohmann::json::parse(b.out);
  CHECK(da["result"]["re"].get<double>() == db["result"]["re"].get<double>());
  CHECK(da["result"]["im"].get<double>() == -db["result"]["im"].get<double>());
}

TEST_CASE("cli csv honors the digits flag") {
  CliResult r = run_cli("zeta --s 2 --format csv --digits 5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("re,im,error_bound,terms_used") == 0);
  CHECK(r.out.find("\n1.6449,") != std::string::npos);
}

TEST_CASE("cli perron check reproduces the exact smoothed sums") {
  CliResult ones = run_cli("perron-check --series ones --x 50.5 --b 2 --T 1e4 --format json");
  REQUIRE(ones.exit_code == 0);
  nlohmann::json d1 = nlohmann::json::parse(ones.out);
  CHECK(d1["result"]["lhs"].get<double>() == 1250.0);
  CHECK(d1["result"]["ratio"].get<double>() <= 1.0);
  check_hash_round_trip(ones.out);

  CliResult delta = run_cli("perron-check --series delta --x 10 --format json");
  REQUIRE(delta.exit_code == 0);
  nlohmann::json d2 = nlohmann::json::parse(delta.out);
  CHECK(d2["result"]["lhs"].get<double>() == 9.0);
}

TEST_CASE("cli lower bound example verdict holds") {
  CliResult r = run_cli("lower-bound --x 1e4 --case 3 --A 2 --format json");
  REQUIRE(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["result"]["k"].get<int64_t>() >= 2);
  CHECK(doc["result"]["lower_bound"].get<double>() <=
        doc["result"]["log_sup"].get<double>());
  CHECK(doc["result"]["holds"].get<bool>());
  check_hash_round_trip(r.out);
}

TEST_CASE("cli upper bound accepts the canonical curve and rejects a high constant") {
  CliResult ok = run_cli("upper-bound --x 1e6 --family exponential --format json");
  REQUIRE(ok.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(ok.out);
  CHECK(doc["result"]["bound"].get<double>() > 0.0);

  CliResult bad = run_cli("upper-bound --x 1e6 --family exponential --sigma-const 0.999", true);
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("contract violation") != std::string::npos);
}

TEST_CASE("cli conjugate matches the closed form for the exponential") {
  CliResult r = run_cli("conjugate --family exponential --y 5 --format json");
  REQUIRE(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  double v = doc["result"]["points"][0]["value"].get<double>();
  double expect = 5 * std::log(5.0) - 5;
  CHECK(std::abs(v - expect) <= 1e-9);
  CHECK(std::abs(doc["result"]["points"][0]["argmax_x"].get<double>() - std::log(5.0)) <= 1e-6);
}

TEST_CASE("cli mf-eval verifies the envelope bound on both scales") {
  CliResult r = run_cli("mf-eval --family exponential --z 2+1i --format json");
  REQUIRE(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["result"]["bound_satisfied"].get<bool>());
  CHECK(doc["result"]["log_abs"].get<double>() <=
        doc["result"]["log_bound"].get<double>() + 1e-9);

  // past e^709 the linear fields must drop out instead of printing inf
  CliResult big = run_cli("mf-eval --family case3_z --A 2 --z 100 --format json");
  REQUIRE(big.exit_code == 0);
  nlohmann::json bd = nlohmann::json::parse(big.out);
  CHECK(bd["result"]["overflows_double"].get<bool>());
  CHECK(!bd["result"].contains("re"));
  CHECK(bd["result"]["bound_satisfied"].get<bool>());
  check_hash_round_trip(big.out);  // exercises the nested growth object
}

TEST_CASE("cli coeffs emits the lossless table") {
  CliResult r = run_cli("coeffs --n 1 --cutoff 10 --no-cache --format csv");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("index,coefficient") == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);  // header
  std::getline(lines, line);
  CHECK(line.substr(0, 2) == "1,");
  std::getline(lines, line);
  REQUIRE(line.substr(0, 2) == "2,");
  CHECK(std::abs(std::stod(line.substr(2)) - std::log(2.0)) <= 1e-15);
}

TEST_CASE("cli scan artifact is deterministic and round-trips its spec") {
  const std::string flags = "scan --preset zaitsev --T 2000 --t-points 5 --sigma-points 3";
  CliResult a = run_cli(flags + " --format json");
  CliResult b = run_cli(flags + " --format json");
  CliResult c = run_cli(flags + " --format json --workers 3");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  nlohmann::json doc = nlohmann::json::parse(a.out);
  CHECK(doc["sup_ratio"].get<double>() > 0.0);
  CHECK(doc["complete"].get<bool>());
  CHECK(a.out.find("elapsed") == std::string::npos);

  // the embedded spec reconstructs the exact scan identity
  RegionSpec rs = RegionSpec::from_json(doc["spec"]);
  RegionSpec direct = preset_region("zaitsev", 2000.0, 0);
  direct.grid.t_points = 5;
  direct.grid.sigma_points = 3;
  double target = doc["target_error"].get<double>();
  CHECK(spec_hash(rs, target) == spec_hash(direct, target));

  CliResult table = run_cli(flags);
  CHECK(table.out.find("sup_ratio") != std::string::npos);
}

TEST_CASE("cli config files reproduce the flag run in both formats") {
  const std::string flags =
      "scan --preset zaitsev --T 2000 --t-points 5 --sigma-points 3 --format json";
  CliResult ref = run_cli(flags);
  REQUIRE(ref.exit_code == 0);

  {
    std::ofstream f("cli_test_cfg.toml");
    f << "[scan]\npreset=\"zaitsev\"\nT=2000\nt-points=5\nsigma-points=3\nformat=\"json\"\n";
  }
  CliResult toml = run_cli("scan --config cli_test_cfg.toml");
  CHECK(toml.exit_code == 0);
  CHECK(toml.out == ref.out);

  {
    std::ofstream f("cli_test_cfg.json");
    f << "{\"scan\":{\"preset\":\"zaitsev\",\"T\":2000,\"t-points\":5,"
         "\"sigma-points\":3,\"format\":\"json\"}}";
  }
  CliResult js = run_cli("scan --config cli_test_cfg.json");
  CHECK(js.exit_code == 0);
  CHECK(js.out == ref.out);

  // command line flags outrank the file
  CliResult over = run_cli("scan --config cli_test_cfg.toml --t-points 9");
  nlohmann::json doc = nlohmann::json::parse(over.out);
  CHECK(doc["spec"]["grid"]["t_points"].get<int>() == 9);

  std::remove("cli_test_cfg.toml");
  std::remove("cli_test_cfg.json");
}

TEST_CASE("cli writes the artifact to a requested path") {
  CliResult direct = run_cli("zeta --s 2 --format json");
  CliResult filed = run_cli("zeta --s 2 --format json --out cli_test_out.json");
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  std::ifstream f("cli_test_out.json");
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(content == direct.out);
  std::remove("cli_test_out.json");

  CliResult bad = run_cli("zeta --s 2 --out /nonexistent_dir/x.json", true);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cli scan writes a checkpoint file when asked") {
  std::remove("cli_test_ckpt.bin");
  CliResult r = run_cli(
      "scan --preset zaitsev --T 2000 --t-points 5 --sigma-points 3 "
      "--checkpoint cli_test_ckpt.bin --format json");
  REQUIRE(r.exit_code == 0);
  std::ifstream f("cli_test_ckpt.bin", std::ios::binary);
  CHECK(f.good());
  std::remove("cli_test_ckpt.bin");
}

TEST_CASE("cli exit codes separate contract violations from numerical failures") {
  CHECK(run_cli("zeta --s 1", true).exit_code == 2);          // pole
  CHECK(run_cli("zeta", true).exit_code == 2);                // missing required flag
  CHECK(run_cli("nonsense", true).exit_code == 2);            // unknown subcommand
  CHECK(run_cli("", true).exit_code == 2);                    // no subcommand
  CHECK(run_cli("zeta --s abc", true).exit_code == 2);        // unparseable complex
  CHECK(run_cli("zeta --s 2 --n 9", true).exit_code == 2);    // order out of range
  CHECK(run_cli("scan --preset case9", true).exit_code == 2); // unknown preset
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("zeta --help").exit_code == 0);

  CliResult pole = run_cli("zeta --s 1", true);
  CHECK(pole.out.find("contract violation") != std::string::npos);
}

TEST_CASE("cli echoes the resolved config to the log") {
  CliResult r = run_cli("zeta --s 2 --format json --out /dev/null", true);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("config ") != std::string::npos);
  CHECK(r.out.find("\"subcommand\":\"zeta\"") != std::string::npos);
}
