#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "lxh/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = LXH_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string(LXH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "lxh_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(run("") != 0);
    CHECK(run("no-such-command") == 2);
    CHECK(run("train --dataset /nonexistent.csv --method FineKNN --config I --out /tmp/x.json") == 2);
    CHECK(run("fit-lux --samples x.csv --class daylight --degree 7 --out y.json") == 2);
  }

  TEST_CASE("dataset, training, surface and classification") {
    const auto dir = scratch();
    const auto scen = (kData / "scenarios/bright_office.json").string();
    const auto ds = (dir / "ds.csv").string();
    const auto model = (dir / "model.json").string();
    REQUIRE(run("generate-dataset --scenario " + scen + " --seed 1 --out " + ds) == 0);
    CHECK(lxh::csv::read(ds).rows.size() == 126);
    REQUIRE(run("train --dataset " + ds + " --method FineKNN --config I --norm b --out " + model) == 0);
    CHECK(run("train --dataset " + ds + " --method FineKNN --config O --norm b --out " + model + ".bad") == 2);
    CHECK(run("surface --model " + model + " --bounds -1,1,-1,1 --res 10 --out " + (dir / "s.csv").string()) == 0);
    CHECK(lxh::csv::read(dir / "s.csv").rows.size() == 100);
    CHECK(run("surface --model " + model + " --bounds 1,-1,-1,1 --res 10 --out " + (dir / "s2.csv").string()) != 0);
    const auto timeline = (dir / "timeline.csv").string();
    REQUIRE(run("simulate --scenario " + scen + " --days 0.25 --seed 3 --out " + timeline) == 0);
    REQUIRE(run("classify --model " + model + " --input " + timeline + " --out " + (dir / "c.csv").string()) == 0);
    CHECK(lxh::csv::read(dir / "c.csv").rows.size() == lxh::csv::read(timeline).rows.size());
    fs::remove_all(dir);
  }

  TEST_CASE("lux fit") {
    const auto dir = scratch();
    lxh::csv::write_text(dir / "samples.csv", "raw_lux,reference_lux\n10,12.5\n20,25\n40,50\n");
    CHECK(run("fit-lux --samples " + (dir / "samples.csv").string() + " --class daylight --degree 1 --out " +
              (dir / "c.json").string()) == 0);
    CHECK(lxh::csv::read_text(dir / "c.json").find("daylight") != std::string::npos);
    lxh::csv::write_text(dir / "flat.csv", "raw_lux,reference_lux\n10,12\n10,13\n10,14\n");
    CHECK(run("fit-lux --samples " + (dir / "flat.csv").string() + " --class daylight --degree 2 --out " +
              (dir / "d.json").string()) == 3);
    fs::remove_all(dir);
  }
}
