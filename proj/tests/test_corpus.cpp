#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "miniastree/analyzer.hpp"

using namespace miniastree;

namespace {

std::vector<Program> corpus() {
  std::vector<Program> out;
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(MINIASTREE_CORPUS))
    if (e.path().extension() == ".mc") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back(prune_unused_globals(const_fold(parse_source(ss.str(), p.filename().string()))));
  }
  return out;
}

std::set<std::tuple<int, int>> alarm_set(const AnalysisResult& r) {
  std::set<std::tuple<int, int>> s;
  for (const auto& a : r.alarms) s.insert({a.pt.id, static_cast<int>(a.kind)});
  return s;
}

bool subset(const std::set<std::tuple<int, int>>& a, const std::set<std::tuple<int, int>>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("more unrolling never adds alarms on the corpus") {
  auto progs = corpus();
  REQUIRE(progs.size() >= 8);
  for (const auto& p : progs) {
    std::set<std::tuple<int, int>> prev;
    for (int n = 0; n <= 3; ++n) {
      AnalysisOptions o;
      o.unroll = n;
      auto cur = alarm_set(analyze(p, o));
      if (n > 0) CHECK_MESSAGE(subset(cur, prev), p.files[0] << " unroll " << n);
      prev = cur;
    }
  }
}

TEST_CASE("perturbation only enlarges invariants") {
  Program p = prune_unused_globals(const_fold(parse_source(R"(
    volatile float in range [-1, 1]; float x; float y;
    void main() { while (true) { x = 0.5 * x + in; y = x * 0.25; wait_tick; } }
  )")));
  AnalysisOptions a;
  a.epsilon = 0;
  AnalysisResult ra = analyze(p, a);
  AnalysisOptions c;
  c.epsilon = 1e-10;
  AnalysisResult rc = analyze(p, c);
  for (const auto& [id, env] : ra.invariants) CHECK(env_leq(env, rc.invariants.at(id)));
  CHECK(subset(alarm_set(ra), alarm_set(rc)));
}

TEST_CASE("disabling a domain never removes alarms") {
  for (const auto& p : corpus()) {
    auto full = alarm_set(analyze(p));
    for (int k = 0; k < 4; ++k) {
      AnalysisOptions o;
      if (k == 0) o.octagons = false;
      if (k == 1) o.ellipsoids = false;
      if (k == 2) o.trees = false;
      if (k == 3) o.clock = false;
      CHECK_MESSAGE(subset(full, alarm_set(analyze(p, o))), p.files[0] << " domain " << k);
    }
  }
}
