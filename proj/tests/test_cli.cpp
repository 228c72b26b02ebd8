// Copyright 2026 The pathtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pathtomo/records.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef PATHTOMO_CLI_PATH
#error "PATHTOMO_CLI_PATH must point at the pathtomo binary"
#endif

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PATHTOMO_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pathtomo_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kConfig = R"({
  "homReflectivity": 0.508,
  "bs1Reflectivity": 0.5,
  "bs2Reflectivity": 0.5,
  "eta0": 0.6, "eta1": 0.6, "eta2": 0.6,
  "phaseArm": "upper"
})";

std::string campaign_plan(bool noiseless, const std::string& convention,
                          const std::string& state = "\"ideal\"") {
  json plan{{"durationSeconds", 4000.0}, {"fluxPerPulse", 2e-8},
            {"binCount", 20},            {"seed", 7},
            {"noiseless", noiseless},    {"convention", convention}};
  plan["state"] = json::parse(state);
  return plan.dump();
}

// Bin centers used by a 20-bin campaign.
double center(int b) { return (b + 0.5) * M_PI / 20.0; }

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("simulate writes reproducible records plus a manifest") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan.json"), campaign_plan(false, "normalized"));

  const std::string cmd = "simulate --config " + dir.file("cfg.json") + " --plan " +
                          dir.file("plan.json") + " --out " + dir.file("records.csv");
  REQUIRE(run_cli(cmd) == 0);
  const auto records = pathtomo::read_records_csv(dir.file("records.csv"));
  CHECK(records.size() >= 9);
  CHECK(records.size() <= 83);

  const json manifest = json::parse(read_text(dir.file("records.csv.manifest.json")));
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.at("outputs").at(0) == dir.file("records.csv"));

  const std::string first = read_text(dir.file("records.csv"));
  REQUIRE(run_cli(cmd) == 0);
  CHECK(read_text(dir.file("records.csv")) == first);

  // A different seed gives different bytes.
  REQUIRE(run_cli(cmd + " --seed 8") == 0);
  CHECK(read_text(dir.file("records.csv")) != first);
}

TEST_CASE("simulate rejects malformed configuration") {
  TempDir dir;
  write_text(dir.file("cfg.json"), "{ not json");
  write_text(dir.file("plan.json"), campaign_plan(false, "normalized"));
  CHECK(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                dir.file("plan.json") + " --out " + dir.file("r.csv")) == 2);

  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan2.json"), R"({"binCount": 1, "state": "ideal"})");
  CHECK(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                dir.file("plan2.json") + " --out " + dir.file("r.csv")) == 2);
}

TEST_CASE("linear tomography on noiseless raw records") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan.json"), campaign_plan(true, "raw"));
  REQUIRE(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                  dir.file("plan.json") + " --out " + dir.file("records.csv")) == 0);

  // Bin centers 2 and 7 sit pi/4 apart.
  std::ostringstream cmd;
  cmd.precision(17);
  cmd << "tomo --records " << dir.file("records.csv") << " --config "
      << dir.file("cfg.json") << " --mode linear --phi1 " << center(2) << " --phi2 "
      << center(7) << " --out " << dir.file("rho.json");
  REQUIRE(run_cli(cmd.str()) == 0);
  const json rho = json::parse(read_text(dir.file("rho.json")));
  CHECK(rho.at("mode") == "linear");
  CHECK(std::abs(rho.at("fidelityToNoon").get<double>() - 1.0) < 1e-6);
  CHECK(std::abs(rho.at("rawTrace").get<double>() - 1.0) < 1e-6);

  // Equal phases are a singular design.
  std::ostringstream bad;
  bad.precision(17);
  bad << "tomo --records " << dir.file("records.csv") << " --config "
      << dir.file("cfg.json") << " --mode linear --phi1 " << center(2) << " --phi2 "
      << center(2) << " --out " << dir.file("rho2.json");
  CHECK(run_cli(bad.str()) == 4);
}

TEST_CASE("mle tomography on a sampled campaign") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan.json"), campaign_plan(false, "normalized"));
  REQUIRE(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                  dir.file("plan.json") + " --out " + dir.file("records.csv")) == 0);
  REQUIRE(run_cli("tomo --records " + dir.file("records.csv") + " --config " +
                  dir.file("cfg.json") + " --mode mle --out " + dir.file("fit.json")) ==
          0);
  const json fit = json::parse(read_text(dir.file("fit.json")));
  CHECK(fit.at("converged").get<bool>());
  const double fid = fit.at("fidelityToNoon").get<double>();
  CHECK(fid > 0.9);
  CHECK(fid <= 1.0 + 1e-9);
  CHECK(std::abs(fit.at("trace").get<double>() - 1.0) < 1e-9);
}

TEST_CASE("vis tomography reports the antisymmetric population") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan.json"),
             campaign_plan(true, "normalized",
                           R"({"homSourceVis": {"reflectivity": 0.5, "overlap": 0.95}})"));
  REQUIRE(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                  dir.file("plan.json") + " --out " + dir.file("records.csv")) == 0);
  REQUIRE(run_cli("tomo --records " + dir.file("records.csv") + " --config " +
                  dir.file("cfg.json") + " --mode vis --out " + dir.file("vis.json")) ==
          0);
  const json fit = json::parse(read_text(dir.file("vis.json")));
  CHECK(std::abs(fit.at("antisymPop").get<double>() - 0.025) < 1e-3);
}

TEST_CASE("curves emits the documented columns") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  REQUIRE(run_cli("curves --state ideal --config " + dir.file("cfg.json") + " --out " +
                  dir.file("ideal.csv")) == 0);
  auto rows = read_csv(dir.file("ideal.csv"));
  REQUIRE(rows.size() == 65);
  CHECK(rows[0] == std::vector<std::string>{"phi", "R00", "R01", "R11", "R33", "R34",
                                            "R35", "R45"});
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][2]) == 0.0);  // R01 of the ideal state

  REQUIRE(run_cli("curves --state mixed --config " + dir.file("cfg.json") + " --out " +
                  dir.file("mixed.csv")) == 0);
  rows = read_csv(dir.file("mixed.csv"));
  const double first = std::stod(rows[1][5]);
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][5]) == doctest::Approx(first).epsilon(1e-12));

  // The R45 fringe of the reference coherent state peaks near -pi/4 (mod 2pi).
  REQUIRE(run_cli("curves --state dashed-theta=0.2 --config " + dir.file("cfg.json") +
                  " --out " + dir.file("dashed.csv")) == 0);
  rows = read_csv(dir.file("dashed.csv"));
  double best_phi = 0.0, best_value = -1.0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double value = std::stod(rows[i][7]);
    if (value > best_value) {
      best_value = value;
      best_phi = std::stod(rows[i][0]);
    }
  }
  CHECK(std::abs(best_phi - (2 * M_PI - M_PI / 4)) < 2 * M_PI / 64 + 1e-9);

  CHECK(run_cli("curves --state nonsense --config " + dir.file("cfg.json") + " --out " +
                dir.file("x.csv")) == 2);
}

TEST_CASE("scan grid output with flagged singular cells") {
  TempDir dir;
  write_text(dir.file("cfg.json"), kConfig);
  write_text(dir.file("plan.json"), campaign_plan(true, "normalized"));
  REQUIRE(run_cli("simulate --config " + dir.file("cfg.json") + " --plan " +
                  dir.file("plan.json") + " --out " + dir.file("records.csv")) == 0);
  REQUIRE(run_cli("scan --records " + dir.file("records.csv") + " --config " +
                  dir.file("cfg.json") + " --grid 4x4 --jobs 2 --out " +
                  dir.file("scan.csv")) == 0);
  const auto rows = read_csv(dir.file("scan.csv"));
  int grid_rows = 0, singular = 0, summary_rows = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] == "grid") {
      ++grid_rows;
      if (rows[i][4] == "singular")
        ++singular;
      else
        CHECK(std::stod(rows[i][3]) > 0.99);
    } else if (rows[i][0] == "summary") {
      ++summary_rows;
    }
  }
  CHECK(grid_rows == 16);
  CHECK(singular >= 4);
  CHECK(summary_rows >= 1);

  // An empty grid still produces a well-formed file.
  REQUIRE(run_cli("scan --records " + dir.file("records.csv") + " --config " +
                  dir.file("cfg.json") + " --grid 0x0 --out " + dir.file("empty.csv")) ==
          0);
  CHECK(read_csv(dir.file("empty.csv")).size() == 1);
}
