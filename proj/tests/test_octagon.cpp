#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "miniastree/octagon.hpp"

using namespace miniastree;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Value of the signed index a (2i: +x_i, 2i+1: -x_i) at a point.
double signed_at(const std::vector<double>& x, int a) { return a % 2 ? -x[a / 2] : x[a / 2]; }

struct Constraint {
  int a, b;
  double c;
};

bool satisfies(const std::vector<double>& x, const std::vector<Constraint>& cs) {
  for (const auto& k : cs)
    if (signed_at(x, k.b) - signed_at(x, k.a) > k.c) return false;
  return true;
}

// With integer constants the vertices are half-integral, so the tightest
// real bounds are attained on the grid of halves.
template <class F>
void for_each_half_point(int n, double box, F f) {
  std::vector<double> x(static_cast<size_t>(n), -box);
  for (;;) {
    f(x);
    int i = 0;
    while (i < n && (x[i] += 0.5) > box) x[i++] = -box;
    if (i == n) return;
  }
}

Octagon build(int n, const std::vector<Constraint>& cs) {
  Octagon o(n);
  for (const auto& k : cs) o = o.add_constraint(k.a, k.b, k.c);
  return o;
}

std::vector<Constraint> random_system(std::mt19937_64& rng, int n, double box) {
  std::vector<Constraint> cs;
  for (int i = 0; i < n; ++i) {
    cs.push_back({2 * i + 1, 2 * i, 2 * box});
    cs.push_back({2 * i, 2 * i + 1, 2 * box});
  }
  std::uniform_int_distribution<int> idx(0, 2 * n - 1), cnt(2, 7), cst(-4, 6);
  int m = cnt(rng);
  for (int j = 0; j < m; ++j) {
    int a = idx(rng), b = idx(rng);
    if (a == b) continue;
    cs.push_back({a, b, static_cast<double>(cst(rng))});
  }
  return cs;
}

}  // namespace

TEST_CASE("closure adds transitive constraints") {
  // x - y <= 1 is V_0 - V_2 <= 1 (b = 0, a = 2).
  Octagon o = Octagon(3).add_constraint(2, 0, 1).add_constraint(4, 2, 2).closed();
  CHECK(o.at(4, 0) == 3);
}

TEST_CASE("a negative cycle closes to bottom") {
  Octagon o = Octagon(2).add_constraint(2, 0, -1).add_constraint(0, 2, 0).closed();
  CHECK(o.is_bottom());
}

TEST_CASE("closure matches tightest bounds over the half-integer grid") {
  std::mt19937_64 rng(42);
  const double box = 3;
  int bottoms = 0;
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + trial % 3;
    auto cs = random_system(rng, n, box);
    Octagon o = build(n, cs).closed();
    std::vector<double> best(static_cast<size_t>(4 * n * n), -kInf);
    bool any = false;
    for_each_half_point(n, box, [&](const std::vector<double>& x) {
      if (!satisfies(x, cs)) return;
      any = true;
      for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
          double& v = best[static_cast<size_t>(a * 2 * n + b)];
          v = std::max(v, signed_at(x, b) - signed_at(x, a));
        }
    });
    REQUIRE(o.is_bottom() == !any);
    if (!any) {
      ++bottoms;
      continue;
    }
    for (int a = 0; a < 2 * n; ++a)
      for (int b = 0; b < 2 * n; ++b) CHECK(o.at(a, b) == best[static_cast<size_t>(a * 2 * n + b)]);
    CHECK(o.closed() == o);
  }
  CHECK(bottoms < 40);
}

TEST_CASE("synthesized two-variable invariant for L := Z + V") {
  // Variables: 0 = L, 1 = Z. V in [2, 5] is outside the pack.
  Octagon o = Octagon(2).with_bounds(1, FloatInterval(0, 100)).closed();
  OctForm f{{{1, 1}}, FloatInterval(2, 5)};
  Octagon r = o.assign(0, f, FloatInterval(2, 105)).closed();
  FloatInterval d = r.range(OctForm{{{0, 1}, {1, -1}}, FloatInterval(0, 0)});
  CHECK(d.lo() == 2);
  CHECK(d.hi() == 5);
}

TEST_CASE("identity assignment leaves the closed octagon unchanged") {
  Octagon o = Octagon(2).add_constraint(2, 0, 1).with_bounds(1, FloatInterval(0, 4)).closed();
  CHECK(o.assign(0, OctForm{{{0, 1}}, FloatInterval(0, 0)}, o.bounds(0)).closed() == o);
}

TEST_CASE("assignment without units forgets old relations") {
  Octagon o = Octagon(2).add_constraint(2, 0, 1).with_bounds(1, FloatInterval(0, 4)).closed();
  Octagon r = o.assign(0, OctForm{{}, FloatInterval(-3, 3)}, FloatInterval(-3, 3)).closed();
  CHECK(r.bounds(0) == FloatInterval(-3, 3));
  CHECK(r.at(2, 0) == 3);  // x - y <= 3 - 0
  CHECK(r.at(0, 2) == 7);
}

TEST_CASE("guards") {
  Octagon o = Octagon(2).add_constraint(0, 2, 0).closed();  // y - x <= 0
  CHECK(o.guard_le(OctForm{{{0, 1}, {0, -1}}, FloatInterval(0, 0)}).closed() == o);
  // x - y + 1 <= 0 contradicts y <= x.
  CHECK(o.guard_le(OctForm{{{0, 1}, {1, -1}}, FloatInterval(1, 1)}).closed().is_bottom());
}

TEST_CASE("join and widening") {
  Octagon b = Octagon::bottom(2);
  Octagon a1 = Octagon(2).add_constraint(2, 0, 1).closed();
  Octagon a3 = Octagon(2).add_constraint(2, 0, 3).closed();
  CHECK(a1.join(b) == a1);
  CHECK(b.join(a1) == a1);
  CHECK(a1.join(a3) == a3);
  CHECK(a1.leq(a1.join(a3)));
  CHECK(a3.leq(a1.join(a3)));

  ThresholdSet t({0, 10, 100});
  Octagon w5 = Octagon(2).add_constraint(2, 0, 5);
  Octagon w7 = Octagon(2).add_constraint(2, 0, 7);
  CHECK(w5.widen(w7, t).at(2, 0) == 10);
}

TEST_CASE("widening chains stabilize") {
  std::mt19937_64 rng(3);
  ThresholdSet t = ThresholdSet::geometric(1, 2, 10);
  const int n = 3;
  size_t budget = 2 * t.size() * (2 * n) * (2 * n);
  for (int trial = 0; trial < 20; ++trial) {
    Octagon x = Octagon::bottom(n);
    size_t steps = 0;
    double grow = 1;
    for (;;) {
      grow *= 1.7;
      auto cs = random_system(rng, n, 1);
      for (auto& k : cs) k.c *= grow;
      Octagon next = x.join(build(n, cs).closed());
      Octagon w = x.widen(next, t);
      ++steps;
      if (w == x) break;
      x = w;
      REQUIRE(steps <= budget);
    }
  }
}

TEST_CASE("bounds reduction keeps integer grid points") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto cs = random_system(rng, 2, 3);
    Octagon o = build(2, cs).closed();
    if (o.is_bottom()) continue;
    FloatInterval bx = o.bounds(0), by = o.bounds(1);
    Octagon r = o.with_bounds(0, bx).with_bounds(1, by).closed();
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y) {
        bool in = satisfies({double(x), double(y)}, cs);
        CHECK(in == satisfies({double(x), double(y)},
                              {{1, 0, r.at(1, 0)}, {0, 1, r.at(0, 1)}, {3, 2, r.at(3, 2)}, {2, 3, r.at(2, 3)},
                               {2, 0, r.at(2, 0)}, {0, 2, r.at(0, 2)}, {3, 0, r.at(3, 0)}, {0, 3, r.at(0, 3)},
                               {1, 2, r.at(1, 2)}, {2, 1, r.at(2, 1)}, {1, 3, r.at(1, 3)}, {3, 1, r.at(3, 1)}}));
      }
  }
}
