#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "miniastree/ellipsoid.hpp"

using namespace miniastree;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FilterParams params(double a, double b, double f = 0x1p-53) { return FilterParams{a, b, f}; }

double quad(double x, double y, const FilterParams& p) { return x * x - p.a * x * y + p.b * y * y; }

bool near_rel(double got, double want, double rel) { return std::fabs(got - want) <= rel * std::fabs(want); }

}  // namespace

TEST_CASE("threshold of the reference filter") {
  FilterParams p = params(1.5, 0.7);
  double plain = std::pow(1.0 / (1.0 - std::sqrt(0.7)), 2);
  double k = prop1_threshold(p, 1.0);
  CHECK(k >= plain);
  CHECK(near_rel(k, plain, 1e-6));
  CHECK(k == doctest::Approx(37.48).epsilon(1e-3));
  CHECK(prop1_threshold(p, 0.0) >= 0.0);
  CHECK(prop1_threshold(p, 0.0) < 1e-12);
  CHECK_THROWS_AS(prop1_threshold(params(1.5, 1.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(prop1_threshold(params(2.0, 0.9), 1.0), std::invalid_argument);
}

TEST_CASE("delta collapses without rounding or input") {
  FilterParams p = params(1.5, 0.7, 0.0);
  for (double k : {0.0, 1.0, 10.0, 1234.5}) {
    double d = delta(k, p, 0.0);
    CHECK(d >= 0.7 * k * (1 - 1e-15));
    CHECK(near_rel(d, 0.7 * k, 1e-14));
  }
  CHECK(near_rel(delta(0.0, p, 3.0), 9.0, 1e-15));
}

TEST_CASE("delta contracts at and above the threshold") {
  FilterParams p = params(1.5, 0.7);
  double km = prop1_threshold(p, 1.0);
  CHECK(delta(km, p, 1.0) <= km);
  CHECK(delta(2 * km, p, 1.0) <= 2 * km);
  CHECK(delta(km * 0.9, p, 1.0) > km * 0.9);
}

TEST_CASE("one real step from the ellipse boundary stays below delta") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI), tt(-1, 1);
  FilterParams p = params(1.5, 0.7);
  double k = 50;
  double dk = delta(k, p, 1.0);
  for (int i = 0; i < 20000; ++i) {
    // Point on X^2 - aXY + bY^2 = k along a random direction.
    double th = ang(rng);
    double ux = std::cos(th), uy = std::sin(th);
    double s = std::sqrt(k / quad(ux, uy, p));
    double x = s * ux, y = s * uy;
    double xn = p.a * x - p.b * y + tt(rng);
    CHECK(quad(xn, x, p) <= dk);
  }
}

TEST_CASE("bounds from an ellipse") {
  FilterParams p = params(1.5, 0.7);
  double want = 2 * std::sqrt(0.7) * std::sqrt(37.49 / (4 * 0.7 - 1.5 * 1.5));
  CHECK(ell_first_bound(37.49, p) >= want);
  CHECK(near_rel(ell_first_bound(37.49, p), want, 1e-12));
  CHECK(ell_first_bound(0.0, p) == 0.0);
  CHECK(ell_first_bound(kInf, p) == kInf);
  // Bounds hold for points on the ellipse.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int i = 0; i < 5000; ++i) {
    double th = ang(rng);
    double s = std::sqrt(10.0 / quad(std::cos(th), std::sin(th), p));
    CHECK(std::fabs(s * std::cos(th)) <= ell_first_bound(10.0, p));
    CHECK(std::fabs(s * std::sin(th)) <= ell_second_bound(10.0, p));
  }
}

TEST_CASE("quadratic form over intervals") {
  FilterParams p = params(1.5, 0.7);
  double q = quad_upper(FloatInterval(-1, 1), FloatInterval(-1, 1), p);
  CHECK(q >= 3.2);
  CHECK(q <= 3.2 + 1e-12);
  double e = quad_upper_equal(FloatInterval(-1, 1), p);
  CHECK(e >= 0.2 - 1e-16);
  CHECK(e <= 0.2 + 1e-12);
}

TEST_CASE("map transfer cases") {
  FilterParams p = params(1.5, 0.7);
  EllipsoidMap m(3, p);
  CHECK(m.get(0, 1) == kInf);
  m = m.set(1, 2, 5);
  EllipsoidMap c = m.copy(0, 1);
  CHECK(c.get(0, 2) == 5);
  EllipsoidMap f = m.filter(0, 1, 2, 1.0);
  CHECK(f.get(0, 1) == delta(5, p, 1.0));
  CHECK(f.get(0, 2) == kInf);
  CHECK(f.forget(0).get(0, 1) == kInf);
  CHECK(m.tighten(1, 2, 2).get(1, 2) == 2);
  CHECK(m.tighten(1, 2, 9).get(1, 2) == 5);
}

TEST_CASE("join and widening of maps") {
  FilterParams p = params(1.5, 0.7);
  EllipsoidMap a = EllipsoidMap(3, p).set(0, 1, 5), b = EllipsoidMap(3, p).set(0, 1, 7);
  CHECK(a.join(b).get(0, 1) == 7);
  CHECK(a.leq(a.join(b)));
  CHECK(a.widen(b, ThresholdSet({0, 10, 100})).get(0, 1) == 10);
  CHECK(a.narrow(EllipsoidMap(3, p).set(0, 1, 3)).get(0, 1) <= 5);
}
