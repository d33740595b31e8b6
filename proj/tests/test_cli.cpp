#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "rdot/dataset.hpp"
#include "rdot/io_util.hpp"
#include "rdot/transform.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      "\"" + testutil::cli_path() + "\" " + args + " > " + q(log) + " 2>&1";
  return testutil::run_command(cmd);
}

}  // namespace

TEST_CASE("cli gen-data writes deterministic RSD1 files and a manifest line") {
  REQUIRE(!testutil::cli_path().empty());
  auto dir = testutil::scratch_dir("cli_gen");
  auto log = dir / "log.txt";

  const std::string args = "gen-data --modes V,D_45 --blocks 40 --size 4 --seed 9 --out-dir ";
  CHECK(run_cli(args + q(dir / "a"), log) == 0);
  fs::create_directories(dir / "b");
  CHECK(run_cli(args + q(dir / "b"), dir / "log2.txt") == 0);

  for (const char* name : {"V.rsd", "D_45.rsd"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / "a" / name));
    CHECK(rdot::io::read_file(dir / "a" / name) == rdot::io::read_file(dir / "b" / name));
  }
  auto ds = rdot::read_dataset(dir / "a" / "V.rsd");
  CHECK(ds.block_size == 4);
  CHECK(ds.blocks.size() == 40);
  CHECK(ds.mode == rdot::ModeLabel::kV);

  const std::string manifest = testutil::read_text_file(log);
  CHECK(manifest.find("mode=V") != std::string::npos);
  CHECK(manifest.find("blocks=40") != std::string::npos);
  CHECK(manifest.find("size=4") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli gen-data rejects unsupported block sizes with exit code 2") {
  auto dir = testutil::scratch_dir("cli_gen_bad");
  CHECK(run_cli("gen-data --size 7 --out-dir " + q(dir), dir / "log.txt") == 2);
  CHECK(run_cli("gen-data --modes NOPE --out-dir " + q(dir), dir / "log2.txt") == 2);
  CHECK(run_cli("definitely-not-a-subcommand", dir / "log3.txt") == 2);
  CHECK(run_cli("", dir / "log4.txt") == 2);  // a subcommand is required
  fs::remove_all(dir);
}

TEST_CASE("cli train produces a loadable bank and a five-key report") {
  auto dir = testutil::scratch_dir("cli_train");
  auto log = dir / "log.txt";
  REQUIRE(run_cli("gen-data --modes H --blocks 60 --size 4 --seed 5 --out-dir " + q(dir), log) ==
          0);

  const fs::path data = dir / "H.rsd";
  const fs::path bank_path = dir / "h.tbk";
  CHECK(run_cli("train " + q(data) + " " + q(bank_path) + " --qp 29 --max-iter 3", log) == 0);

  auto bank = rdot::load_bank(bank_path);
  CHECK(bank.block_size == 4);
  CHECK(bank.mode_label == "H");

  const fs::path report = dir / "h.report.json";  // default: output stem + .report.json
  REQUIRE(fs::exists(report));
  auto j = json::parse(testutil::read_text_file(report));
  CHECK(j.size() == 5);
  CHECK(j.contains("iterations"));
  CHECK(j.contains("cluster_sizes"));
  CHECK(j.contains("converged"));
  CHECK(j["qp"].get<int>() == 29);
  CHECK(j["iterations"].size() <= 3);

  const std::string out = testutil::read_text_file(log);
  CHECK(out.find("RD_Total=") != std::string::npos);

  // Explicit report path and tree method.
  CHECK(run_cli("train " + q(data) + " " + q(dir / "h2.tbk") + " --method tree --max-iter 2" +
                    " --report " + q(dir / "custom.json"),
                log) == 0);
  CHECK(fs::exists(dir / "custom.json"));

  // Bad method name is a usage error.
  CHECK(run_cli("train " + q(data) + " " + q(dir / "h3.tbk") + " --method magic", log) == 2);
  // Missing input file is a runtime error.
  CHECK(run_cli("train " + q(dir / "absent.rsd") + " " + q(dir / "h4.tbk"), log) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cli eval writes two pinned-header CSVs and a bd json") {
  auto dir = testutil::scratch_dir("cli_eval");
  auto log = dir / "log.txt";
  REQUIRE(run_cli("gen-data --modes D_67 --blocks 60 --size 4 --seed 2 --out-dir " + q(dir),
                  log) == 0);
  REQUIRE(run_cli("train " + q(dir / "D_67.rsd") + " " + q(dir / "d.tbk") + " --max-iter 2", log) ==
          0);

  CHECK(run_cli("eval " + q(dir / "d.tbk") + " " + q(dir / "D_67.rsd") + " " + q(dir / "out") +
                    " --label joint_spgt --qps 26,27,28,29",
                log) == 0);

  const std::string bank_csv = testutil::read_text_file(dir / "out.bank.csv");
  const std::string base_csv = testutil::read_text_file(dir / "out.baseline.csv");
  CHECK(bank_csv.rfind("qp,bits_per_block,psnr,sse\n", 0) == 0);
  CHECK(base_csv.rfind("qp,bits_per_block,psnr,sse\n", 0) == 0);
  // Header plus one row per QP.
  CHECK(std::count(bank_csv.begin(), bank_csv.end(), '\n') == 5);
  CHECK(std::count(base_csv.begin(), base_csv.end(), '\n') == 5);
  CHECK(bank_csv.find("\n26,") != std::string::npos);
  CHECK(bank_csv.find("\n29,") != std::string::npos);

  auto j = json::parse(testutil::read_text_file(dir / "out.bd.json"));
  CHECK(j["mode"].get<std::string>() == "D_67");
  CHECK(j["label"].get<std::string>() == "joint_spgt");
  CHECK(j.contains("bd_rate_percent"));
  CHECK(j.contains("psnr_low"));
  CHECK(j.contains("psnr_high"));

  // Fewer than 4 QPs is a usage error (exit 2) even with valid files.
  CHECK(run_cli("eval " + q(dir / "d.tbk") + " " + q(dir / "D_67.rsd") + " " + q(dir / "x") +
                    " --qps 28",
                log) == 2);
  // Missing bank is a runtime error.
  CHECK(run_cli("eval " + q(dir / "none.tbk") + " " + q(dir / "D_67.rsd") + " " + q(dir / "y"),
                log) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cli report merges inputs, fills NA cells, and round-trips its grid") {
  auto dir = testutil::scratch_dir("cli_report");
  auto log = dir / "log.txt";
  REQUIRE(run_cli("gen-data --modes V --blocks 60 --size 4 --seed 3 --out-dir " + q(dir), log) ==
          0);
  REQUIRE(run_cli("train " + q(dir / "V.rsd") + " " + q(dir / "v.tbk") + " --max-iter 2", log) ==
          0);
  REQUIRE(run_cli("eval " + q(dir / "v.tbk") + " " + q(dir / "V.rsd") + " " + q(dir / "v") +
                      " --label joint_spgt --qps 26,27,28,29",
                  log) == 0);

  auto err = dir / "err.txt";
  const std::string cmd = "\"" + testutil::cli_path() + "\" report " + q(dir / "summary") + " " +
                          q(dir / "v.bd.json") + " " + q(dir / "v.report.json") + " > " +
                          q(dir / "out.txt") + " 2> " + q(err);
  CHECK(testutil::run_command(cmd) == 0);

  auto j = json::parse(testutil::read_text_file(dir / "summary.grid.json"));
  REQUIRE(j.contains("modes"));
  CHECK(j["modes"].size() == 12);
  CHECK(j["modes"][0].get<std::string>() == "DC");
  REQUIRE(j["grid"].contains("joint_spgt"));
  CHECK(j["grid"]["joint_spgt"]["V"].is_number());
  CHECK(j["grid"]["joint_spgt"]["DC"].is_null());
  CHECK(j["series"].contains("v.report"));

  // Missing cells are NA in the CSV and warned about on stderr.
  const std::string csv = testutil::read_text_file(dir / "summary.grid.csv");
  CHECK(csv.rfind("method,DC,V,H,D_45,D_135,D_113,D_157,D_203,D_67,S,S_V,S_H\n", 0) == 0);
  CHECK(csv.find("joint_spgt") != std::string::npos);
  CHECK(csv.find(",NA") != std::string::npos);
  CHECK(testutil::read_text_file(err).find("warning:") != std::string::npos);

  // Feeding the grid back in reproduces it identically.
  CHECK(run_cli("report " + q(dir / "again") + " " + q(dir / "summary.grid.json"), log) == 0);
  CHECK(testutil::read_text_file(dir / "again.grid.json") ==
        testutil::read_text_file(dir / "summary.grid.json"));
  CHECK(testutil::read_text_file(dir / "again.grid.csv") ==
        testutil::read_text_file(dir / "summary.grid.csv"));

  // An unrecognized JSON input is a runtime error.
  rdot::io::atomic_write(dir / "junk.json", std::string("{\"x\": 1}\n"));
  CHECK(run_cli("report " + q(dir / "z") + " " + q(dir / "junk.json"), log) == 1);
  fs::remove_all(dir);
}

TEST_CASE("cli reads options from an INI config file") {
  auto dir = testutil::scratch_dir("cli_cfg");
  auto log = dir / "log.txt";
  const std::string cfg = "[gen-data]\nmodes = \"S\"\nblocks = 25\nsize = 4\nseed = 8\nout-dir = \"" +
                          dir.string() + "\"\n";
  rdot::io::atomic_write(dir / "run.ini", cfg);

  CHECK(run_cli("--config " + q(dir / "run.ini") + " gen-data", log) == 0);
  REQUIRE(fs::exists(dir / "S.rsd"));
  auto ds = rdot::read_dataset(dir / "S.rsd");
  CHECK(ds.blocks.size() == 25);
  CHECK(ds.block_size == 4);

  // The same invocation with explicit flags must agree byte-for-byte.
  fs::create_directories(dir / "flat");
  CHECK(run_cli("gen-data --modes S --blocks 25 --size 4 --seed 8 --out-dir " + q(dir / "flat"),
                log) == 0);
  CHECK(rdot::io::read_file(dir / "S.rsd") == rdot::io::read_file(dir / "flat" / "S.rsd"));
  fs::remove_all(dir);
}

TEST_CASE("cli artifacts are identical for any RDOT_THREADS value") {
  auto dir = testutil::scratch_dir("cli_threads");
  auto log = dir / "log.txt";
  for (int t : {1, 4}) {
    const auto sub = dir / ("t" + std::to_string(t));
    fs::create_directories(sub);
    const std::string env = "RDOT_THREADS=" + std::to_string(t) + " ";
    const std::string cli = "\"" + testutil::cli_path() + "\"";
    REQUIRE(testutil::run_command(env + cli + " gen-data --modes D_135 --blocks 50 --size 4" +
                                  " --seed 6 --out-dir " + q(sub) + " > " + q(log) + " 2>&1") ==
            0);
    REQUIRE(testutil::run_command(env + cli + " train " + q(sub / "D_135.rsd") + " " +
                                  q(sub / "d.tbk") + " --max-iter 3 > " + q(log) + " 2>&1") == 0);
  }
  CHECK(rdot::io::read_file(dir / "t1" / "D_135.rsd") ==
        rdot::io::read_file(dir / "t4" / "D_135.rsd"));
  CHECK(rdot::io::read_file(dir / "t1" / "d.tbk") == rdot::io::read_file(dir / "t4" / "d.tbk"));
  CHECK(testutil::read_text_file(dir / "t1" / "d.report.json") ==
        testutil::read_text_file(dir / "t4" / "d.report.json"));
  fs::remove_all(dir);
}
