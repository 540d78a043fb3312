// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "differential.hpp"
#include "miniastree/analyzer.hpp"
#include "miniastree/concrete.hpp"
#include "miniastree/ellipsoid.hpp"
#include "miniastree/packing.hpp"

using namespace miniastree;

namespace {

constexpr double kMax = std::numeric_limits<double>::max();

struct Verdict {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) { return std::string(MINIASTREE_CORPUS) + "/" + name; }

Program load(const std::string& name) {
  return prune_unused_globals(const_fold(parse_source(read_file(corpus(name + ".mc")), name + ".mc")));
}

Program prep(const std::string& src) { return prune_unused_globals(const_fold(parse_source(src))); }

std::string secs_text(double s) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << s << " s";
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int count_kind(const AnalysisResult& r, AlarmKind k) {
  int n = 0;
  for (const auto& a : r.alarms) n += a.kind == k;
  return n;
}

// First statement satisfying `pred`, in source order.
const Stmt* find_stmt(const Stmt& s, const std::function<bool(const Stmt&)>& pred) {
  if (pred(s)) return &s;
  for (const auto& c : s.body)
    if (auto r = find_stmt(*c, pred)) return r;
  if (s.then_s)
    if (auto r = find_stmt(*s.then_s, pred)) return r;
  if (s.else_s)
    if (auto r = find_stmt(*s.else_s, pred)) return r;
  return nullptr;
}

const Stmt* find_assign(const Program& p, const std::string& lhs, const std::string& rhs_var) {
  int l = p.find_global(lhs), r = p.find_global(rhs_var);
  return find_stmt(*p.funs[p.entry].body, [&](const Stmt& s) {
    return s.kind == StmtKind::Assign && s.lhs->kind == ExprKind::Var && s.lhs->var == l &&
           s.expr->kind == ExprKind::Var && s.expr->var == r;
  });
}

// Value of a variable just before the program's wait_tick.
Value at_tick(const Program& p, const AnalysisResult& r, const std::string& var) {
  const Stmt* w = find_stmt(*p.funs[p.entry].body, [](const Stmt& s) { return s.kind == StmtKind::WaitTick; });
  return r.value_at(w->pt.id, find_cell(p, r.layout, var));
}

// Value of a variable at the head of the main loop.
Value at_head(const Program& p, const AnalysisResult& r, const std::string& var) {
  const Stmt* w = find_stmt(*p.funs[p.entry].body, [](const Stmt& s) { return s.kind == StmtKind::While; });
  const Stmt* first = w->then_s->kind == StmtKind::Block ? w->then_s->body.front().get() : w->then_s.get();
  return r.value_at(first->pt.id, find_cell(p, r.layout, var));
}

Verdict differential_soundness() {
  auto t0 = Clock::now();
  auto r = differential::run(1, 1000, 100, 30);
  double secs = seconds_since(t0);
  Verdict v;
  v.ok = r.programs == 1000 && r.runs == 100000 && r.violations == 0 && r.unmatched_faults == 0 &&
         r.rejected == 0 && r.diverged == 0 && secs <= 600;
  v.detail = std::to_string(r.programs) + " programs, " + std::to_string(r.runs) + " runs, " +
             std::to_string(r.statements) + " states checked, " + std::to_string(r.faults) + " faults, " +
             std::to_string(r.violations) + " escapes, " + std::to_string(r.unmatched_faults) +
             " unreported faults, " + secs_text(secs);
  for (const auto& m : r.examples) v.detail += "\n    " + m;
  return v;
}

Verdict linearization_example() {
  Program p = load("linear");
  AnalysisOptions plain;
  plain.linearize = false;
  FloatInterval lin = analyze(p).final_value(p, "X").as_float();
  FloatInterval bu = analyze(p, plain).final_value(p, "X").as_float();
  double cap = std::nextafter(std::nextafter(0.8, 1.0), 1.0);
  Verdict v;
  v.ok = lin.lo() >= 0 && lin.hi() <= cap && std::fabs(bu.lo() + 0.2) < 1e-12 && std::fabs(bu.hi() - 1.0) < 1e-12;
  v.detail = "linearized X in [" + num(lin.lo()) + ", " + num(lin.hi()) + "], bottom-up X in [" + num(bu.lo()) +
             ", " + num(bu.hi()) + "]";
  return v;
}

Verdict octagon_example() {
  Program p = load("octagon");
  const Stmt* last = find_stmt(*p.funs[p.entry].body, [&](const Stmt& s) {
    return s.kind == StmtKind::Assign && s.lhs->var == p.find_global("out");
  });
  auto hi_at = [&](const AnalysisOptions& o, const std::string& var) {
    AnalysisResult r = analyze(p, o);
    return r.value_at(last->pt.id, find_cell(p, r.layout, var)).as_float().hi();
  };
  AnalysisOptions on, off;
  off.octagons = false;
  double hx = hi_at(on, "X"), hl = hi_at(on, "L"), hl_off = hi_at(off, "L");
  double cap = std::nextafter(hx, kMax);
  Verdict v;
  v.ok = hl <= cap && hl_off > cap;
  v.detail = "hi(X) = " + num(hx) + ", hi(L) = " + num(hl) + " with octagons, " + num(hl_off) + " without";
  return v;
}

Verdict ellipsoid_example() {
  auto t0 = Clock::now();
  Program p = load("filter");
  AnalysisResult r = analyze(p);
  Verdict v;
  if (r.ellipsoid_packs.size() != 1) return {false, "expected one filter pack, got " + std::to_string(r.ellipsoid_packs.size())};
  // Pack cells are ordered X, Xp, Y. Just after the update of Xp, r(Xp, X)
  // bounds Xp.
  const Stmt* after = find_assign(p, "Y", "X");
  const AbstractEnv& inv = r.invariants.at(after->pt.id);
  const EllipsoidMap* ell = inv.ellipses.find(0);
  int xp = find_cell(p, r.layout, "Xp");
  double k = ell->get(1, 0);
  double bound = ell_first_bound(k, ell->params());
  FloatInterval got = inv.value(xp).as_float();
  bool tight = std::fabs(got.hi() - bound) <= std::fabs(std::nextafter(bound, kMax) - bound) &&
               std::fabs(-got.lo() - bound) <= std::fabs(std::nextafter(bound, kMax) - bound);
  FloatInterval xr = at_tick(p, r, "X").as_float();
  double xb = std::max(-xr.lo(), xr.hi());

  // Adversarial simulation: the input always pushes away from zero, no resets.
  double a = ell->params().a, b = ell->params().b;
  double X = 1, Y = -1, worst = 0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000000; ++i) {
    double lin = a * X - b * Y;
    double t = i % 3 == 0 ? u(rng) : (lin >= 0 ? 1.0 : -1.0);
    double Xp = lin + t;
    Y = X;
    X = Xp;
    worst = std::max(worst, std::fabs(Xp));
  }
  // The interpreter on the program itself, resets included.
  RunOptions ro;
  ro.max_ticks = 1000000;
  ro.max_steps = 100000000;
  ro.seed = 5;
  double seen = 0;
  int xp_var = p.find_global("Xp");
  RunResult run = run_concrete(p, ro, [&](const Stmt&, const ConcreteState& st) {
    seen = std::max(seen, std::fabs(st.vars[xp_var][0].f));
  });

  AnalysisOptions off;
  off.ellipsoids = false;
  AnalysisResult r_off = analyze(p, off);
  FloatInterval x_off = at_tick(p, r_off, "X").as_float();
  double secs = seconds_since(t0);
  v.ok = std::isfinite(bound) && tight && !xr.is_bottom() && xb < kMax && r.alarms.empty() && worst <= bound &&
         seen <= bound && !run.fault && x_off.hi() >= kMax && x_off.lo() <= -kMax && secs <= 30;
  v.detail = "r(Xp,X) = " + num(k) + ", Xp in [" + num(got.lo()) + ", " + num(got.hi()) + "], bound " + num(bound) +
             ", |X| <= " + num(xb) + ", simulated max |Xp| " + num(worst) + " (program run " + num(seen) +
             "), without ellipsoids X in [" + num(x_off.lo()) + ", " + num(x_off.hi()) + "], " +
             secs_text(secs);
  return v;
}

Verdict delta_sweep() {
  std::mt19937_64 rng(2024);
  int violations = 0, checked = 0;
  double worst = 0;
  for (int tri = 0; tri < 20; ++tri) {
    double b = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    double amax = 2 * std::sqrt(b);
    double a = std::uniform_real_distribution<double>(-0.98 * amax, 0.98 * amax)(rng);
    double tm = std::exp(std::uniform_real_distribution<double>(std::log(1e-3), std::log(1e3))(rng));
    FilterParams fp{a, b, 0x1p-53};
    double k0 = prop1_threshold(fp, tm);
    for (int i = 0; i < 1000; ++i) {
      double k = k0 * std::pow(10.0, 8.0 * i / 999.0);
      double d = delta(k, fp, tm);
      ++checked;
      if (!(d <= k)) ++violations;
      worst = std::max(worst, d / k);
    }
  }
  return {violations == 0 && checked == 20000,
          std::to_string(checked) + " values of k, " + std::to_string(violations) + " violations, max delta(k)/k " +
              num(worst)};
}

Verdict tree_example() {
  Program p = load("tree");
  AnalysisOptions off;
  off.trees = false;
  AnalysisResult on = analyze(p), no = analyze(p, off);
  int dz = count_kind(no, AlarmKind::DivZero);
  return {on.alarms.empty() && no.alarms.size() == 1 && dz == 1,
          std::to_string(on.alarms.size()) + " alarms with trees, " + std::to_string(no.alarms.size()) +
              " without (" + std::to_string(dz) + " div_zero)"};
}

Verdict clocked_counter() {
  Program p = load("clock");
  AnalysisOptions on, off;
  on.max_ticks = 1000000;
  off.max_ticks = 1000000;
  off.clock = false;
  AnalysisResult r = analyze(p, on), r_off = analyze(p, off);
  IntInterval x = at_tick(p, r, "x").as_int();
  const Stmt* y_stmt = find_stmt(*p.funs[p.entry].body, [&](const Stmt& s) {
    return s.kind == StmtKind::Assign && s.lhs->var == p.find_global("y");
  });
  int y_overflow = 0;
  for (const auto& a : r_off.alarms) y_overflow += a.kind == AlarmKind::Overflow && a.pt.line == y_stmt->pt.line;
  IntInterval x_off = at_tick(p, r_off, "x").as_int();
  return {r.alarms.empty() && !x.is_bottom() && x.hi() <= 1000000 && x.lo() >= 0 && y_overflow >= 1,
          "x in " + x.to_string() + ", " + std::to_string(r.alarms.size()) + " alarms with the clock; without it x in " +
              x_off.to_string() + " and " + std::to_string(r_off.alarms.size()) + " alarms (" +
              std::to_string(y_overflow) + " on y = x * 2000)"};
}

Verdict delayed_widening() {
  Program p = load("delayed");
  AnalysisOptions base;
  base.octagons = false;
  AnalysisOptions eager = base;
  eager.delay = 0;
  eager.delay_exception = false;
  AnalysisResult r = analyze(p, base), re = analyze(p, eager);
  FloatInterval x = at_head(p, r, "X").as_float();
  FloatInterval y = at_head(p, r, "Y").as_float();
  FloatInterval xe = at_head(p, re, "X").as_float();
  bool finite = !x.is_bottom() && !y.is_bottom() && x.hi() < 1e6 && x.lo() > -1e6 && y.hi() < 1e6 && y.lo() > -1e6;
  return {finite && xe.hi() >= kMax,
          "delay 2: X in [" + num(x.lo()) + ", " + num(x.hi()) + "], Y in [" + num(y.lo()) + ", " + num(y.hi()) +
              "]; delay 0 without the exception: X in [" + num(xe.lo()) + ", " + num(xe.hi()) + "]"};
}

std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(MINIASTREE_CORPUS))
    if (e.path().extension() == ".mc") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

Verdict widening_termination() {
  // Every corpus program under several strategies stays within the budget.
  int runs = 0, most = 0;
  std::string failed;
  for (const auto& name : corpus_names()) {
    Program p = load(name);
    for (int delay : {0, 2, 5})
      for (int unroll : {0, 1, 3}) {
        AnalysisOptions o;
        o.delay = delay;
        o.unroll = unroll;
        try {
          AnalysisResult r = analyze(p, o);
          most = std::max(most, r.stats.loop_iterations);
          ++runs;
        } catch (const AnalysisDiverged& e) {
          failed += std::string(" ") + e.what();
        }
      }
  }
  // Increasing interval chains against a threshold set of size |T|.
  ThresholdSet t = ThresholdSet::geometric(1, 2, 20);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> step(0, 3);
  int worst = 0, chains_over = 0;
  for (int c = 0; c < 200; ++c) {
    FloatInterval x(0, 0), seq(0, 0);
    double grow = 1 + step(rng);
    int n = 0;
    for (;;) {
      seq = FloatInterval(seq.lo() * grow - step(rng), seq.hi() * grow + step(rng));
      FloatInterval w = x.widen(x.join(seq), t);
      ++n;
      if (w == x) break;
      x = w;
      if (n > 1000) break;
    }
    worst = std::max(worst, n - 1);
    if (n - 1 > static_cast<int>(2 * t.size())) ++chains_over;
  }
  return {failed.empty() && chains_over == 0,
          std::to_string(runs) + " corpus analyses within budget (max " + std::to_string(most) +
              " loop iterations); widening chains stabilized within " + std::to_string(worst) + " steps, 2|T| = " +
              std::to_string(2 * t.size()) + failed};
}

Verdict sharing_efficiency() {
  std::vector<std::pair<int, CellValue>> items;
  for (int i = 0; i < 10000; ++i) items.push_back({i, CellValue{Value(IntInterval(0, i)), {}}});
  AbstractEnv a;
  a.cells = PMap<CellValue>::from_sorted(items);
  AbstractEnv b = a;
  for (int i = 0; i < 10; ++i) b.cells = b.cells.set(i * 991 + 7, CellValue{Value(IntInterval(-1, i * 991 + 7)), {}});
  PMapStats shared, naive;
  AbstractEnv j = env_join(a, b, LatticeOptions{}, &shared);
  a.cells.merge_flat(b.cells, [](const CellValue& x, const CellValue& y) {
    return CellValue{x.v.join(y.v), {}};
  }, &naive);
  bool right = j.value(7) == Value(IntInterval(-1, 7)) && j.value(8) == Value(IntInterval(0, 8));
  return {right && shared.visits <= 500 && naive.visits >= 10000,
          std::to_string(shared.visits) + " nodes visited by the shared join, " + std::to_string(naive.visits) +
              " by the full traversal"};
}

Verdict pack_reuse() {
  int before = 0, after = 0;
  std::string mismatch;
  auto key = [](const AnalysisResult& r) {
    std::set<std::tuple<int, int, int, int>> s;
    for (const auto& a : r.alarms) s.insert({a.pt.line, a.pt.col, a.pt.id, static_cast<int>(a.kind)});
    return s;
  };
  for (const auto& name : corpus_names()) {
    Program p = load(name);
    PackingResult packs = infer_packs(p);
    AnalysisResult first = analyze(p, {}, packs);
    PackingResult kept = filter_useful_packs(packs, first.useful_packs);
    AnalysisResult second = analyze(p, {}, kept);
    before += first.stats.octagon_packs;
    after += second.stats.octagon_packs;
    if (key(first) != key(second)) mismatch += " " + name;
    if (second.stats.octagon_packs > first.stats.octagon_packs) mismatch += " " + name + "(more packs)";
  }
  return {mismatch.empty() && after < before,
          std::to_string(corpus_names().size()) + " corpus programs, octagon packs " + std::to_string(before) + " -> " +
              std::to_string(after) + ", alarm sets " + (mismatch.empty() ? "identical" : "differ:" + mismatch)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  } criteria[] = {
      {"differential soundness", differential_soundness},
      {"linearization example", linearization_example},
      {"octagon example", octagon_example},
      {"ellipsoid filter", ellipsoid_example},
      {"delta contraction sweep", delta_sweep},
      {"decision tree example", tree_example},
      {"clocked counter", clocked_counter},
      {"delayed widening", delayed_widening},
      {"widening termination", widening_termination},
      {"sharing efficiency", sharing_efficiency},
      {"pack reuse", pack_reuse},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.ok;
    std::cout << (v.ok ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
