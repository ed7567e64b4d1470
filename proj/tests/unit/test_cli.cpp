#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "cusploc/harness/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CUSPLOC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path write_config(const std::string& name, const std::string& json) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << json;
  return p;
}

}  // namespace

TEST_CASE("cli: gamma prints the model constants") {
  const Run r = run("gamma --kappa 0");
  REQUIRE(r.code == 0);
  const auto doc = cusploc::harness::parse_csv(r.out);
  REQUIRE(doc.rows.size() == 1);
  CHECK(doc.numbers("gamma_star")[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("cli: configuration and usage errors exit with 2") {
  CHECK(run("gamma --kappa 0.7").code == 2);
  CHECK(run("--no-such-flag").code == 2);
  CHECK(run("--config /nonexistent.json rates").code == 2);
  const fs::path bad = write_config("cusploc_cli_bad.json", R"({"version":1,"model":{},"replicates":3})");
  CHECK(run("--config " + bad.string() + " rates").code == 2);
  fs::remove(bad);
}

TEST_CASE("cli: a failed slope check exits with 4") {
  const fs::path out = fs::temp_directory_path() / "cusploc_cli_rates";
  fs::remove_all(out);
  const fs::path cfg = write_config(
      "cusploc_cli_rates.json",
      R"({"version":1,"model":{"kappa":0.25},"grid":[0.1,0.05,0.025],"replications":50,"seed":3,)"
      R"("thresholds":{"slope_target":10,"slope_tolerance":0.01}})");
  const Run r = run("--config " + cfg.string() + " --out " + out.string() + " --workers 1 rates");
  CHECK(r.code == 4);
  CHECK(fs::exists(out / "rates.csv"));
  fs::remove(cfg);
  fs::remove_all(out);
}
