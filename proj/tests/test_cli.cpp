#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "manifold_interp/trajectory.hpp"

using namespace minterp;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "minterp_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path small_config() {
  const auto path = work_dir() / "small.json";
  std::ofstream out(path);
  out << R"({
  "curve_lengths": [300],
  "curves_per_length": 2,
  "loss_ratios": [0.1, 0.3],
  "methods": ["lli", "linear", "spline"],
  "k": 5,
  "noise_sigma": 2.0,
  "master_seed": 99,
  "repetitions": 3
})";
  return path;
}

}  // namespace

TEST_CASE("cli: missing config file exits 2 and names the path") {
  const auto out = work_dir() / "gen_missing";
  const auto log = work_dir() / "gen_missing.log";
  const int code =
      run("generate --config /nonexistent/nope.json --out " + out.string() +
          " 2> " + log.string());
  CHECK(code == 2);
  CHECK(read_file(log).find("/nonexistent/nope.json") != std::string::npos);
}

TEST_CASE("cli: generate writes a deterministic corpus") {
  const auto cfg = small_config();
  const auto out1 = work_dir() / "gen1";
  const auto out2 = work_dir() / "gen2";
  REQUIRE(run("generate --config " + cfg.string() + " --out " + out1.string() +
              " > /dev/null 2>&1") == 0);
  REQUIRE(run("generate --config " + cfg.string() + " --out " + out2.string() +
              " > /dev/null 2>&1") == 0);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(out1)) {
    files.push_back(entry.path().filename());
  }
  CHECK(files.size() == 2 * (1 + 2));  // per curve: 1 trajectory + 2 masks
  for (const auto& name : files) {
    CHECK(read_file(out1 / name) == read_file(out2 / name));
  }
}

TEST_CASE("cli: interpolate fills a line gap exactly and keeps row count") {
  const auto dir = work_dir();
  const auto traj_path = dir / "line.csv";
  const auto mask_path = dir / "line_mask.csv";
  {
    Trajectory traj;
    for (int i = 0; i < 30; ++i) {
      traj.points.push_back({i, 2.0 * i + 1.0, -1.0 * i + 40.0});
    }
    write_trajectory_csv(traj, traj_path);
    write_mask_csv(MissingMask(std::vector<std::int64_t>{15}), mask_path);
  }
  const auto out_path = dir / "line_filled.csv";
  REQUIRE(run("interpolate " + traj_path.string() + " " + mask_path.string() +
              " --method lli --sigma 1e-12 --out " + out_path.string()) == 0);

  std::ifstream out(out_path);
  std::string header;
  std::getline(out, header);
  CHECK(header == "t,x,y,source");
  int rows = 0;
  int interpolated = 0;
  std::string row;
  while (std::getline(out, row)) {
    ++rows;
    if (row.find("interpolated") != std::string::npos) {
      ++interpolated;
      CHECK(row.rfind("15,", 0) == 0);
      const auto c1 = row.find(',');
      const auto c2 = row.find(',', c1 + 1);
      const double x = std::stod(row.substr(c1 + 1, c2 - c1 - 1));
      CHECK(std::abs(x - 31.0) <= 1e-6);
    }
  }
  CHECK(rows == 30);
  CHECK(interpolated == 1);
}

TEST_CASE("cli: baseline on a trailing gap fails with a message") {
  const auto dir = work_dir();
  const auto traj_path = dir / "tail.csv";
  const auto mask_path = dir / "tail_mask.csv";
  {
    Trajectory traj;
    for (int i = 0; i < 20; ++i) traj.points.push_back({i, 1.0 * i, 2.0 * i});
    write_trajectory_csv(traj, traj_path);
    write_mask_csv(MissingMask(std::vector<std::int64_t>{19}), mask_path);
  }
  const auto log = dir / "tail.log";
  const int code = run("interpolate " + traj_path.string() + " " +
                       mask_path.string() + " --method spline --out " +
                       (dir / "tail_out.csv").string() + " 2> " + log.string());
  CHECK(code == 1);
  CHECK(read_file(log).find("extrapolate") != std::string::npos);
}

TEST_CASE("cli: bench writes the three CSVs and a summary") {
  const auto cfg = small_config();
  const auto out = work_dir() / "bench_out";
  const auto log = work_dir() / "bench.log";
  REQUIRE(run("bench --config " + cfg.string() + " --out " + out.string() +
              " > " + log.string() + " 2>/dev/null") == 0);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "cdf.csv"));
  CHECK(fs::exists(out / "timing.csv"));

  const std::string summary = read_file(log);
  for (const char* name : {"LLI", "Linear", "Spline"}) {
    CHECK(summary.find(name) != std::string::npos);
  }
}

TEST_CASE("cli: cdf output probabilities end at 1") {
  const auto cfg = small_config();
  const auto out = work_dir() / "cdf_out";
  REQUIRE(run("cdf --config " + cfg.string() + " --out " + out.string() +
              " > /dev/null 2>&1") == 0);
  std::ifstream in(out / "cdf.csv");
  std::string header, row, last_prob;
  std::getline(in, header);
  CHECK(header == "method,error,probability");
  std::string prev_method;
  while (std::getline(in, row)) {
    const auto c1 = row.find(',');
    const auto c2 = row.rfind(',');
    const std::string method = row.substr(0, c1);
    if (!prev_method.empty() && method != prev_method) {
      CHECK(last_prob == "1");  // each method's curve ends at probability 1
    }
    prev_method = method;
    last_prob = row.substr(c2 + 1);
  }
  CHECK(last_prob == "1");
}

TEST_CASE("cli: --seed and --policy override the config") {
  const auto cfg = small_config();
  const auto out_a = work_dir() / "seed_a";
  const auto out_b = work_dir() / "seed_b";
  REQUIRE(run("generate --config " + cfg.string() + " --out " + out_a.string() +
              " --seed 1 > /dev/null 2>&1") == 0);
  REQUIRE(run("generate --config " + cfg.string() + " --out " + out_b.string() +
              " --seed 2 > /dev/null 2>&1") == 0);
  CHECK(read_file(out_a / "traj_L300_c00_r0.csv") !=
        read_file(out_b / "traj_L300_c00_r0.csv"));

  // unrestricted masks may contain adjacent indices; scattered never do
  const auto out_u = work_dir() / "policy_u";
  REQUIRE(run("generate --config " + cfg.string() + " --out " + out_u.string() +
              " --policy unrestricted > /dev/null 2>&1") == 0);
  REQUIRE(run("generate --config " + cfg.string() + " --out " +
              (work_dir() / "policy_s").string() +
              " --policy bogus > /dev/null 2>&1") == 2);
}

TEST_CASE("cli: unknown method rejected before running") {
  const auto cfg = small_config();
  const int code = run("bench --config " + cfg.string() + " --out " +
                       (work_dir() / "x").string() +
                       " --method nearest > /dev/null 2>&1");
  CHECK(code == 2);
}
