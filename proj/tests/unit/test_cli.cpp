#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tfdw/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tfdw_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stdout and stderr captured in the work directory.
int cli(const std::string& args) {
  const char* exe = std::getenv("TFDW_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "TFDW_CLI must point at the tfdw binary");
  const std::string cmd = "cd \"" + work_dir().string() + "\" && \"" + exe + "\" " + args +
                          " > last.out 2> last.err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const std::string& dir) {
  return nlohmann::json::parse(slurp(work_dir() / dir / "manifest.json"));
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli("") == 2);
  CHECK(cli("no-such-command") == 2);
  CHECK(cli("drop --volume 0") == 2);
  CHECK(cli("tfdw --box 4") == 2);
  CHECK(slurp(work_dir() / "last.err").find("Usage") != std::string::npos);
  CHECK(cli("psi-decay --mass 0") == 2);
  CHECK(cli("drop --volume 3 --kind manhattan") == 2);
  CHECK(cli("drop --volume 3 --config missing.json") == 2);
  std::ofstream(work_dir() / "bad.json") << R"({"volume": 3, "bogus": 1})";
  CHECK(cli("drop --config bad.json") == 2);
  CHECK(cli("drop-scaling --volumes 16,8") == 2);
  CHECK(cli("tfdw-scan --splits 0.7") == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("drop matches the oracle") {
  REQUIRE(cli("drop --volume 5 --out d5") == 0);
  const auto m = manifest("d5");
  CHECK(m["status"] == "passed");
  CHECK(m["exit_code"] == 0);
  CHECK(m["config"]["volume"] == 5);
  CHECK(m["results"]["total"].get<double>() == doctest::Approx(17.0 + 5.0 / 6));
  const std::string drop = slurp(work_dir() / "d5" / "drop.txt");
  CHECK(drop.rfind("TFDW-DROP 1\nkind: euclidean\ncount: 5\n", 0) == 0);
  const std::string csv = slurp(work_dir() / "d5" / "drop.csv");
  CHECK(csv.find("\r\n") != std::string::npos);
  const auto rows = tfdw::parse_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "V");
  CHECK(rows[1][0] == "5");
}

TEST_CASE("config file values and flag overrides") {
  std::ofstream(work_dir() / "drop.json") << R"({"volume": 4, "kind": "graph", "seed": 9})";
  REQUIRE(cli("drop --config drop.json --volume 3 --out cfg") == 0);
  const auto m = manifest("cfg");
  CHECK(m["config"]["volume"] == 3);
  CHECK(m["config"]["kind"] == "graph");
  CHECK(m["config"]["seed"] == 9);
}

TEST_CASE("manifest round trip and determinism") {
  REQUIRE(cli("drop --volume 12 --seed 4 --sweeps 20 --out a") == 0);
  REQUIRE(cli("drop --config a/manifest.json --out b") == 0);
  for (const char* f : {"drop.txt", "drop.csv", "pair_counts.csv"})
    CHECK(slurp(work_dir() / "a" / f) == slurp(work_dir() / "b" / f));
  auto ma = manifest("a"), mb = manifest("b");
  CHECK(ma["config"] == mb["config"]);
  CHECK(ma["results"] == mb["results"]);
}

TEST_CASE("verify-lemmas") {
  const std::string small = "--lp-instances 500 --hls-instances 200 --truncation-instances 50";
  CHECK(cli("verify-lemmas " + small + " --out v") == 0);
  CHECK(cli("verify-lemmas " + small + " --kind graph --out vg") == 0);
  const auto rows = tfdw::parse_csv(slurp(work_dir() / "v" / "lemmas.csv"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"check", "instances", "violations", "max_ratio", "seed"});
  CHECK(rows[1][0] == "ball_formulas");
  CHECK(rows[1][2] == "0");
  CHECK(cli("verify-lemmas " + small + " --inject-fault ball-volume --out vf") == 1);
  const std::string err = slurp(work_dir() / "last.err");
  CHECK(err.find("ball volume formula") != std::string::npos);
  CHECK(manifest("vf")["status"] == "violations");
}

TEST_CASE("psi-decay") {
  REQUIRE(cli("psi-decay --n-max 2 --out p2") == 0);
  const auto rows = tfdw::parse_csv(slurp(work_dir() / "p2" / "psi_decay.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "n");
  CHECK(rows[1][1] == "36");
  REQUIRE(cli("psi-decay --n-max 12 --out p12") == 0);
  CHECK(slurp(work_dir() / "p12" / "psi_decay.svg").find("<svg") != std::string::npos);
}

TEST_CASE("tfdw single run") {
  REQUIRE(cli("tfdw --mass 0.5 --box 6 --out t") == 0);
  const auto m = manifest("t");
  CHECK(m["results"]["termination"] == "converged");
  CHECK(m["results"]["residual"].get<double>() <= 1e-6);
  for (const char* f : {"trajectory.csv", "field.txt", "profile.csv"}) CHECK(fs::exists(work_dir() / "t" / f));
  CHECK(slurp(work_dir() / "t" / "field.txt").rfind("TFDW-FIELD 1\n", 0) == 0);
  // Restart from the saved field.
  CHECK(cli("tfdw --mass 0.5 --box 6 --init file --init-file t/field.txt --out t2") == 0);
  CHECK(manifest("t2")["results"]["iterations"].get<int>() <= 2);
  // A budget that cannot converge is an assertion failure.
  CHECK(cli("tfdw --mass 0.5 --box 6 --max-iters 3 --out t3") == 1);
}

TEST_CASE("tfdw-scan and drop-scaling") {
  REQUIRE(cli("tfdw-scan --box 4 --masses 0.5,2 --splits 0.1 --fractions 0.5 --out s") == 0);
  for (const char* f : {"subadditivity.csv", "splitting.csv", "phase.svg"}) CHECK(fs::exists(work_dir() / "s" / f));
  CHECK(tfdw::parse_csv(slurp(work_dir() / "s" / "splitting.csv")).size() == 3);

  REQUIRE(cli("drop-scaling --volumes 8,16 --pairs 4:4 --sweeps 40 --out ds") == 0);
  for (const char* f : {"scaling.csv", "scaling.svg", "drop_subadditivity.csv", "shapes/V8.txt"})
    CHECK(fs::exists(work_dir() / "ds" / f));
  CHECK(cli("drop-scaling --volumes 8,16 --pairs 4-4") == 2);
}
