#include <random>

#include "doctest.h"
#include "miniastree/analyzer.hpp"
#include "miniastree/decision_tree.hpp"

using namespace miniastree;

namespace {

TreeLeaf leaf(int64_t lo, int64_t hi) { return TreeLeaf::of({Value(IntInterval(lo, hi))}); }

std::vector<TreeLeaf> random_table(std::mt19937_64& rng, int bools) {
  std::uniform_int_distribution<int> d(0, 4);
  std::vector<TreeLeaf> t;
  for (int s = 0; s < (1 << bools); ++s) {
    int a = d(rng), b = d(rng);
    if (a == 4) t.push_back(TreeLeaf::unreachable());
    else t.push_back(leaf(std::min(a, b), std::max(a, b)));
  }
  return t;
}

TreeLeaf join_leaf(const TreeLeaf& a, const TreeLeaf& b) {
  if (a.bottom) return b;
  if (b.bottom) return a;
  return TreeLeaf::of({a.nums[0].join(b.nums[0])});
}

}  // namespace

TEST_CASE("tables round-trip and equal subtrees are shared") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    int n = 1 + i % 4;
    auto t = random_table(rng, n);
    DecisionTree d = DecisionTree::from_table(n, t);
    CHECK(d.to_table() == t);
    CHECK(d.leaf_count() <= t.size());
  }
  std::vector<TreeLeaf> same(8, leaf(1, 2));
  CHECK(DecisionTree::from_table(3, same).leaf_count() == 1);
}

TEST_CASE("assigning B := (X == 0) splits the leaves") {
  Program p = prune_unused_globals(const_fold(parse_source(R"(
    volatile int in range [0, 10]; int X; int Y; bool B;
    void main() { X = in; B = (X == 0); if (!B) { Y = 1 / X; } }
  )")));
  AnalysisResult r = analyze(p);
  REQUIRE(r.tree_packs.size() == 1);
  const PackView& pk = r.tree_packs[0];
  REQUIRE(pk.bools == 1);
  int x = find_cell(p, r.layout, "X");
  size_t xi = 0;
  while (xi + 1 < pk.cells.size() && pk.cells[xi + 1] != x) ++xi;
  REQUIRE(pk.cells[xi + 1] == x);
  const DecisionTree* t = r.final_env.trees.find(0);
  REQUIRE(t);
  auto table = t->to_table();
  CHECK(table[1].nums[xi] == Value(IntInterval(0, 0)));
  CHECK(table[0].nums[xi] == Value(IntInterval(1, 10)));
}

TEST_CASE("join is leafwise") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    int n = 1 + i % 3;
    auto a = random_table(rng, n), b = random_table(rng, n);
    DecisionTree da = DecisionTree::from_table(n, a), db = DecisionTree::from_table(n, b);
    auto j = da.join(db).to_table();
    for (size_t s = 0; s < a.size(); ++s) CHECK(j[s] == join_leaf(a[s], b[s]));
    CHECK(da.leq(da.join(db)));
    CHECK(db.leq(da.join(db)));
  }
}

TEST_CASE("widening uses thresholds per leaf") {
  DecisionTree a = DecisionTree::from_table(1, {leaf(0, 5), leaf(0, 0)});
  DecisionTree b = DecisionTree::from_table(1, {leaf(0, 7), leaf(0, 0)});
  auto w = a.widen(b, ThresholdSet({0, 10, 100})).to_table();
  CHECK(w[0].nums[0] == Value(IntInterval(0, 10)));
  CHECK(w[1].nums[0] == Value(IntInterval(0, 0)));
}

TEST_CASE("bottom") {
  DecisionTree d = DecisionTree::from_table(2, std::vector<TreeLeaf>(4, TreeLeaf::unreachable()));
  CHECK(d.is_bottom());
  DecisionTree e = DecisionTree::from_table(2, {leaf(0, 0), TreeLeaf::unreachable(), TreeLeaf::unreachable(),
                                                TreeLeaf::unreachable()});
  CHECK(!e.is_bottom());
  CHECK(d.join(e) == e);
}
