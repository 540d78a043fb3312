#include <iostream>

#include "differential.hpp"
#include "doctest.h"

TEST_CASE("random programs stay inside their invariants") {
  auto r = differential::run(11, 40, 10, 30);
  for (const auto& m : r.examples) std::cerr << m << "\n";
  CHECK(r.rejected == 0);
  CHECK(r.diverged == 0);
  CHECK(r.programs == 40);
  CHECK(r.violations == 0);
  CHECK(r.unmatched_faults == 0);
  CHECK(r.faults > 0);
}

TEST_CASE("soundness does not depend on the relational domains") {
  miniastree::AnalysisOptions o;
  o.octagons = o.ellipsoids = o.trees = o.clock = false;
  auto r = differential::run(23, 40, 10, 30, o);
  for (const auto& m : r.examples) std::cerr << m << "\n";
  CHECK(r.programs == 40);
  CHECK(r.violations == 0);
  CHECK(r.unmatched_faults == 0);
}

TEST_CASE("partitioning and unrolling keep random programs sound") {
  miniastree::AnalysisOptions o;
  o.unroll = 3;
  o.delay = 0;
  o.partition_fns = {"main", "h"};
  auto r = differential::run(31, 40, 10, 30, o);
  for (const auto& m : r.examples) std::cerr << m << "\n";
  CHECK(r.programs == 40);
  CHECK(r.violations == 0);
  CHECK(r.unmatched_faults == 0);
}
