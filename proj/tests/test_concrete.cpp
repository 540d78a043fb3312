#include "doctest.h"
#include "miniastree/analyzer.hpp"
#include "miniastree/concrete.hpp"

using namespace miniastree;

namespace {

Program prep(const std::string& src) { return prune_unused_globals(const_fold(parse_source(src))); }

int var_id(const Program& p, const std::string& qual) {
  for (const auto& v : p.vars)
    if (v.qual == qual) return v.id;
  return -1;
}

}  // namespace

TEST_CASE("statics persist and locals restart at zero") {
  Program p = prep(R"(
    int out; int tmp; int last;
    int f() { static int n; int t; n = n + 1; t = t + 5; return n * 10 + t; }
    void main() { out = f(); tmp = f(); out = out + tmp; last = f(); }
  )");
  RunResult r = run_concrete(p, {});
  REQUIRE(!r.fault);
  CHECK(r.final_state.vars[var_id(p, "out")][0].i == 15 + 25);
  CHECK(r.final_state.vars[var_id(p, "last")][0].i == 35);
}

TEST_CASE("faults carry the kind and the expression point") {
  struct Case {
    const char* src;
    AlarmKind kind;
  } cases[] = {
      {"int x; int z; void main() { x = 5 / z; }", AlarmKind::DivZero},
      {"int x; void main() { x = 2147483647; x = x + 1; }", AlarmKind::Overflow},
      {"int a[3]; int i; void main() { i = 3; a[i] = 1; }", AlarmKind::ArrayBounds},
      {"float f; float z; void main() { f = 1.0 / z; }", AlarmKind::DivZero},
      {"float f; void main() { f = 1e300; f = f * f; }", AlarmKind::Overflow},
  };
  for (const auto& c : cases) {
    Program p = prep(c.src);
    RunResult r = run_concrete(p, {});
    REQUIRE(r.fault);
    CHECK(r.fault->kind == c.kind);
    AnalysisResult a = analyze(p);
    bool matched = false;
    for (const auto& al : a.alarms) matched |= al.pt.id == r.fault->pt.id && al.kind == r.fault->kind;
    CHECK(matched);
  }
}

TEST_CASE("runs stop at the tick budget and are reproducible") {
  Program p = prep(R"(
    volatile int in range [0, 1000]; int x; int s;
    void main() { while (true) { x = in; s = s + 1; wait_tick; } }
  )");
  RunOptions o;
  o.max_ticks = 25;
  o.seed = 99;
  RunResult a = run_concrete(p, o), b = run_concrete(p, o);
  CHECK(a.ticks == 25);
  CHECK(a.final_state.vars[var_id(p, "s")][0].i == 25);
  CHECK(a.final_state.vars[var_id(p, "x")][0].i == b.final_state.vars[var_id(p, "x")][0].i);
  o.max_steps = 10;
  CHECK(run_concrete(p, o).out_of_steps);
}

TEST_CASE("observed states lie in the invariants") {
  Program p = prep(R"(
    volatile int in range [-3, 3]; int x; int y; int k;
    void main() {
      while (true) {
        k = 0;
        while (k < 4) { x = x + in; k = k + 1; }
        if (x > 50) { x = 50; } if (x < -50) { x = -50; }
        y = x * 2;
        wait_tick;
      }
    }
  )");
  AnalysisResult a = analyze(p);
  RunOptions o;
  o.max_ticks = 200;
  int seen = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    o.seed = seed;
    run_concrete(p, o, [&](const Stmt& s, const ConcreteState& st) {
      ++seen;
      auto it = a.invariants.find(s.pt.id);
      REQUIRE(it != a.invariants.end());
      std::string why;
      CHECK_MESSAGE(state_in(a.layout, it->second, st, &why), why);
    });
  }
  CHECK(seen > 1000);
}
