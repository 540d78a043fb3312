#pragma once

// Reduced ordered decision trees over a pack's booleans, with interval
// environments over the pack's numeric variables at the leaves.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "miniastree/interval.hpp"

namespace miniastree {

struct TreeLeaf {
  bool bottom = true;
  std::vector<Value> nums;

  static TreeLeaf unreachable() { return {}; }
  static TreeLeaf of(std::vector<Value> v);
  bool operator==(const TreeLeaf& o) const;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  // Single leaf.
  DecisionTree(int bools, TreeLeaf leaf);

  int bools() const { return bools_; }
  bool is_bottom() const;
  size_t leaf_count() const;

  // Entry s describes the assignment where bool i has value (s >> i) & 1.
  std::vector<TreeLeaf> to_table() const;
  static DecisionTree from_table(int bools, const std::vector<TreeLeaf>& table);

  DecisionTree join(const DecisionTree& o) const;
  DecisionTree widen(const DecisionTree& o, const ThresholdSet& t) const;
  DecisionTree narrow(const DecisionTree& o, const ThresholdSet& t) const;
  bool leq(const DecisionTree& o) const;
  bool operator==(const DecisionTree& o) const;
  bool same(const DecisionTree& o) const { return root_ == o.root_; }

  // Nested `B ? (...) : (...)`.
  std::string to_string(const std::vector<std::string>& bool_names, const std::vector<std::string>& num_names) const;

 private:
  struct Node {
    int var = -1;  // -1 for leaves
    std::shared_ptr<const Node> lo, hi;
    TreeLeaf leaf;
  };
  using NodePtr = std::shared_ptr<const Node>;

  int bools_ = 0;
  NodePtr root_;

  static NodePtr make_leaf(TreeLeaf l);
  static NodePtr make_node(int var, NodePtr lo, NodePtr hi);
  static bool equal(const NodePtr& a, const NodePtr& b);
  static NodePtr build(int var, int bools, uint32_t prefix, const std::vector<TreeLeaf>& table);
  static void fill(const NodePtr& n, int var, int bools, uint32_t prefix, std::vector<TreeLeaf>& out);
  using LeafOp = std::function<TreeLeaf(const TreeLeaf&, const TreeLeaf&)>;
  static NodePtr apply(const NodePtr& a, const NodePtr& b, const LeafOp& op);
};

}  // namespace miniastree
