#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "miniastree/report.hpp"

using namespace miniastree;

namespace {

Program prep(const std::string& src, const std::string& name = "t.mc") {
  return prune_unused_globals(const_fold(parse_source(src, name)));
}

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / ("miniastree_" + name);
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args, const std::string& out = "/dev/null") {
  std::string cmd = std::string(MINIASTREE_CLI) + " " + args + " > " + out + " 2>/dev/null";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("text report") {
  Program clean = prep("int x; void main() { x = 1; }");
  CHECK(report_text(clean, analyze(clean)) == "0 alarms\n");
  Program p = prep("volatile int a range [0, 3]; int x;\nvoid main() { x = 7 / a; }");
  CHECK(report_text(p, analyze(p)) == "t.mc:2:21: DIV_ZERO: (7 / a) ([7, 7] / [0, 3])\n1 alarm\n");
}

TEST_CASE("json report round-trips and is deterministic") {
  Program p = prep("volatile int a range [0, 3]; int x; int y[2];\nvoid main() { x = 7 / a; y[a] = 1; }");
  AnalysisResult r = analyze(p);
  std::string s = report_json(p, r);
  auto j = nlohmann::ordered_json::parse(s);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  REQUIRE(j["alarms"].size() == 2);
  CHECK(j["alarms"][0]["kind"] == "div_zero");
  CHECK(j["alarms"][1]["kind"] == "array_bounds");
  CHECK(j["alarms"][1]["line"] == 2);
  CHECK(j.dump(2) + "\n" == s);
  CHECK(report_json(p, analyze(p)) == s);
  RunInfo info{12.5, 100};
  auto t = nlohmann::json::parse(report_json(p, r, &info));
  CHECK(t["stats"]["elapsed_ms"] == 12.5);
}

TEST_CASE("config text") {
  AnalysisOptions o;
  apply_config_text("# strategy\ndelay = 4\nunroll=0\npartition = f, g\nno-octagon = true\n", o);
  CHECK(o.delay == 4);
  CHECK(o.unroll == 0);
  CHECK(o.partition_fns == std::set<std::string>{"f", "g"});
  CHECK(!o.octagons);
  CHECK_THROWS_AS(apply_config_text("delay 4\n", o), ConfigError);
  CHECK_THROWS_AS(apply_config_text("speed = 9\n", o), ConfigError);
  CHECK_THROWS_AS(apply_config_text("delay = four\n", o), ConfigError);
  o.thresh_lambda = 1;
  CHECK_THROWS_AS(validate(o), ConfigError);
  CHECK_NOTHROW(validate(AnalysisOptions{}));
}

TEST_CASE("invariant dump lists packs and cells") {
  Program p = prep(R"(
    volatile int i range [0, 9]; int a; int b; int c;
    void main() { a = i; b = a + 1; c = b - a; }
  )");
  std::string d = dump_invariants(p, analyze(p));
  CHECK(d.find("t.mc:3:28 assign") != std::string::npos);
  CHECK(d.find("b in [1, 10]") != std::string::npos);
  CHECK(d.find("oct ") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  auto clean = temp_file("clean.mc", "int x; void main() { x = 1; }");
  auto alarm = temp_file("alarm.mc", "int x; int z; void main() { x = 1 / z; }");
  auto broken = temp_file("broken.mc", "int x; void main() { x = ; }");
  auto loop = temp_file("loop.mc", "int x; void main() { while (true) { x = x + 1; wait_tick; } }");
  auto cfg = temp_file("bad.cfg", "delay = -2\n");
  CHECK(run_cli("analyze " + clean.string()) == 0);
  CHECK(run_cli("analyze " + alarm.string()) == 1);
  CHECK(run_cli("analyze " + broken.string()) == 2);
  CHECK(run_cli("analyze " + clean.string() + " --config " + cfg.string()) == 3);
  CHECK(run_cli("analyze " + clean.string() + " --unroll x") == 3);
  CHECK(run_cli("analyze " + loop.string() + " --max-iterations 1 --delay 3") == 4);
  CHECK(run_cli("run " + alarm.string() + " --seed 2") == 1);
  CHECK(run_cli("run " + loop.string() + " --ticks 10") == 0);

  auto packs = fs::temp_directory_path() / "miniastree_useful.txt";
  auto json1 = fs::temp_directory_path() / "miniastree_r1.json";
  auto json2 = fs::temp_directory_path() / "miniastree_r2.json";
  std::string prog = std::string(MINIASTREE_CORPUS) + "/controller.mc";
  CHECK(run_cli("analyze " + prog + " --format json --emit-useful-packs " + packs.string(), json1.string()) == 0);
  CHECK(run_cli("analyze " + prog + " --format json --packs-file " + packs.string(), json2.string()) == 0);
  auto first = nlohmann::json::parse(std::ifstream(json1)), second = nlohmann::json::parse(std::ifstream(json2));
  CHECK(first["alarms"] == second["alarms"]);
  CHECK(second["stats"]["octagon_packs"] < first["stats"]["octagon_packs"]);
  for (const auto& f : {clean, alarm, broken, loop, cfg, packs, json1, json2}) fs::remove(f);
}
