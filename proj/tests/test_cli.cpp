#include <doctest.h>

#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "floquetlab/cli/commands.hpp"
#include "floquetlab/cli/output.hpp"
#include "floquetlab/cli/pool.hpp"
#include "floquetlab/cli/run_config.hpp"
#include "floquetlab/error.hpp"
#include "floquetlab/opcore.hpp"

using namespace floquetlab;
using namespace floquetlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("floquetlab_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

RunConfig small(const std::string& name) {
  RunConfig cfg;
  cfg.subcommand = name;
  if (name == "bscan") cfg.params = {{"ladder", "pow2:6:10"}, {"x_points", "8"}, {"omega", "golden"}};
  if (name == "discrepancy") cfg.params = {{"ladder", "pow2:6:12"}};
  if (name == "weyl") cfg.params = {{"ladder", "decades:1:3:4"}};
  if (name == "dynamics") cfg.params = {{"dim", "32"}, {"kicks", "200"}, {"pairs", "1:1,2:1"}};
  if (name == "cantor") cfg.params = {{"points", "65"}};
  if (name == "phitilde") cfg.params = {{"omega_points", "21"}, {"kappa_points", "5"}};
  if (name == "deltaeps") cfg.params = {{"t_points", "9"}};
  return cfg;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(FLOQUETLAB_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool cell_has_type(const std::string& cell, const std::string& type) {
  if (type == "string") return cell.find(',') == std::string::npos;
  if (type == "int") {
    long long v = 0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    return r.ec == std::errc() && r.ptr == cell.data() + cell.size();
  }
  if (cell == "nan" || cell == "inf" || cell == "-inf") return true;
  double v = 0.0;
  const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  return r.ec == std::errc() && r.ptr == cell.data() + cell.size();
}

}  // namespace

TEST_CASE("config text round-trips") {
  RunConfig cfg = RunConfig::parse(
      "# sweep\nsubcommand = bscan\ngamma = 0.75  # decay\nladder = pow2:10:12\nseed = 9\nformat = json\n");
  CHECK(cfg.subcommand == "bscan");
  CHECK(cfg.seed == 9);
  CHECK(cfg.format == "json");
  CHECK(cfg.get_double("gamma", 0.0) == 0.75);
  CHECK(RunConfig::parse(cfg.to_text()) == cfg);
  cfg.set("gamma=1.5");
  CHECK(cfg.get_double("gamma", 0.0) == 1.5);
  CHECK_THROWS_AS(RunConfig::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("ladder", 0.0), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("format = xml"), ConfigError);
}

TEST_CASE("ladders") {
  CHECK(parse_ladder("3,5,9") == std::vector<std::size_t>{3, 5, 9});
  CHECK(parse_ladder("pow2:2:4") == std::vector<std::size_t>{4, 8, 16});
  CHECK(parse_ladder("decades:2:3:2") == std::vector<std::size_t>{100, 316, 1000});
  CHECK_THROWS_AS(parse_ladder(""), ConfigError);
  CHECK_THROWS_AS(parse_ladder("5,3"), ConfigError);
  CHECK_THROWS_AS(parse_ladder("pow2:5:4"), ConfigError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  for (double x : {1.0 / 3.0, 2.0 / 3.0 * 1e17, 6.02214076e23, 5e-324}) {
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("manifest echoes the config and hashes every file") {
  const auto dir = scratch("manifest");
  RunConfig cfg = small("cantor");
  cfg.seed = 42;
  const auto artifacts = run_command(cfg, 2);
  const std::string text = write_run(dir.string(), artifacts, cfg.to_text(), 0.5);
  const auto manifest = nlohmann::ordered_json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.dump(2) + "\n" == text);
  CHECK(RunConfig::parse(manifest["config"].get<std::string>()) == cfg);
  REQUIRE(manifest["files"].size() == artifacts.size());
  for (const auto& f : manifest["files"]) {
    const std::string body = slurp(dir / f["name"].get<std::string>());
    CHECK(f["bytes"].get<std::size_t>() == body.size());
    CHECK(f["sha256"].get<std::string>() == sha256_hex(body));
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
}

TEST_CASE("CSV headers and cells follow the schema") {
  const auto schema = nlohmann::json::parse(slurp(FLOQUETLAB_SCHEMA));
  for (const auto& name : subcommands()) {
    CAPTURE(name);
    const auto& kind = schema["kinds"][name];
    const auto artifacts = run_command(small(name), 2);
    const auto table = std::find_if(artifacts.begin(), artifacts.end(),
                                    [&](const Artifact& a) { return a.filename == kind["file"].get<std::string>(); });
    REQUIRE(table != artifacts.end());
    std::istringstream in(table->content);
    std::string line;
    std::getline(in, line);
    const auto header = split(line);

    // Expand the schema against the header; a repeated column matches one or more names.
    std::vector<nlohmann::json> expected;
    std::size_t h = 0;
    for (const auto& col : kind["columns"]) {
      if (col.value("repeat", false)) {
        const std::regex re(col["pattern"].get<std::string>());
        std::size_t matched = 0;
        while (h < header.size() && std::regex_match(header[h], re)) {
          expected.push_back(col);
          ++h;
          ++matched;
        }
        CHECK(matched >= 1);
      } else {
        REQUIRE(h < header.size());
        CHECK(header[h] == col["name"].get<std::string>());
        expected.push_back(col);
        ++h;
      }
    }
    CHECK(h == header.size());

    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      const auto cells = split(line);
      REQUIRE(cells.size() == expected.size());
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          CHECK(expected[c].value("nullable", false));
        } else {
          CHECK(cell_has_type(cells[c], expected[c]["type"].get<std::string>()));
        }
      }
    }
    CHECK(rows > 0);
  }
}

TEST_CASE("JSON tables carry the same columns") {
  RunConfig cfg = small("weyl");
  cfg.format = "json";
  const auto artifacts = run_command(cfg, 1);
  REQUIRE(artifacts.front().filename == "weyl.json");
  const auto j = nlohmann::json::parse(artifacts.front().content);
  CHECK(j["columns"][0] == "j");
  CHECK(j["columns"].size() == 8);
  CHECK(j["rows"].size() == 9);
  CHECK(j["rows"][0][2] == 1);
}

TEST_CASE("results do not depend on the thread count") {
  for (const auto& name : subcommands()) {
    CAPTURE(name);
    RunConfig cfg = small(name);
    cfg.seed = 3;
    const auto a = run_command(cfg, 1);
    const auto b = run_command(cfg, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].content == b[i].content);
  }
}

TEST_CASE("validation errors and guards") {
  RunConfig cfg = small("bscan");
  cfg.params["bogus"] = "1";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small("bscan");
  cfg.params["gamma"] = "0";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.params["gamma"] = "11";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small("bscan");
  cfg.params["ladder"] = "pow2:10:26";
  CHECK_THROWS_AS(validate(cfg), ResourceGuardError);
  cfg = small("phitilde");
  cfg.params["omega_points"] = "100001";
  cfg.params["kappa_points"] = "101";
  CHECK_THROWS_AS(validate(cfg), ResourceGuardError);
  cfg = small("dynamics");
  cfg.params["pairs"] = "1:99";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.subcommand = "nope";
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  std::string message;
  try {
    throw ResourceGuardError("big");
  } catch (...) {
    CHECK(exit_code_for_current_exception(message) == kExitResource);
  }
  try {
    throw NumericError("nan");
  } catch (...) {
    CHECK(exit_code_for_current_exception(message) == kExitNumeric);
  }
  CHECK(message == "nan");
}

TEST_CASE("singular points are reported, not dropped") {
  RunConfig cfg = small("bscan");
  cfg.params.erase("x_points");
  // theta_1 = 2pi * golden
  cfg.params["x_grid"] = format_number(kTwoPi * ((std::sqrt(5.0) - 1.0) / 2.0)) + ",1.5";
  const auto artifacts = run_command(cfg, 1);
  CHECK(artifacts[0].content.find("singular") != std::string::npos);
  const auto side = nlohmann::json::parse(artifacts[1].content);
  CHECK(side["series"][0]["singular"] == true);
  CHECK(side["series"][1]["singular"] == false);
}

TEST_CASE("thread cap from the environment") {
  ::setenv(kMaxThreadsEnv, "2", 1);
  CHECK(resolve_threads(8) == 2);
  CHECK(resolve_threads(1) == 1);
  CHECK(resolve_threads(0) <= 2);
  ::setenv(kMaxThreadsEnv, "zero", 1);
  CHECK_THROWS_AS(resolve_threads(4), ConfigError);
  ::unsetenv(kMaxThreadsEnv);
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);

  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw NumericError("x"); }), NumericError);
}

TEST_CASE("exit codes of the executable") {
  const auto dir = scratch("exit");
  const std::string out = " --out " + dir.string();
  CHECK(run_tool("cantor -p points=17" + out) == kExitOk);
  CHECK(fs::exists(dir / "cantor.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(run_tool("bscan -p ladder=" + out) == kExitConfig);
  CHECK(run_tool("bscan -p gamma=-1" + out) == kExitConfig);
  CHECK(run_tool("bscan --format xml" + out) == kExitConfig);
  CHECK(run_tool("frobnicate") == kExitConfig);
  CHECK(run_tool("bscan --config /nonexistent/file.cfg") == kExitConfig);
  CHECK(run_tool("phitilde -p omega_points=1000000" + out) == kExitResource);
  CHECK(run_tool("dynamics -p dim=5000 -p kicks=5000" + out) == kExitResource);
  CHECK(run_tool("--help") == 0);

  // config file plus command-line override; the file value loses
  const fs::path cfg_path = dir / "run.cfg";
  fs::create_directories(dir);
  std::ofstream(cfg_path) << "subcommand = cantor\npoints = 9\n";
  CHECK(run_tool("cantor --config " + cfg_path.string() + " -p points=5" + out) == kExitOk);
  const std::string body = slurp(dir / "cantor.csv");
  CHECK(std::count(body.begin(), body.end(), '\n') == 6);
  CHECK(run_tool("bscan --config " + cfg_path.string() + out) == kExitConfig);
  fs::remove_all(dir);
}
