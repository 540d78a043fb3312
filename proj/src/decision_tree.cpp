#include "miniastree/decision_tree.hpp"

#include <climits>

namespace miniastree {

TreeLeaf TreeLeaf::of(std::vector<Value> v) {
  TreeLeaf l;
  for (const auto& x : v)
    if (x.is_bottom()) return unreachable();
  l.bottom = false;
  l.nums = std::move(v);
  return l;
}

bool TreeLeaf::operator==(const TreeLeaf& o) const {
  if (bottom || o.bottom) return bottom == o.bottom;
  return nums == o.nums;
}

DecisionTree::DecisionTree(int bools, TreeLeaf leaf) : bools_(bools), root_(make_leaf(std::move(leaf))) {}

DecisionTree::NodePtr DecisionTree::make_leaf(TreeLeaf l) {
  auto n = std::make_shared<Node>();
  n->leaf = std::move(l);
  return n;
}

DecisionTree::NodePtr DecisionTree::make_node(int var, NodePtr lo, NodePtr hi) {
  if (equal(lo, hi)) return lo;
  auto n = std::make_shared<Node>();
  n->var = var;
  n->lo = std::move(lo);
  n->hi = std::move(hi);
  return n;
}

bool DecisionTree::equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->var != b->var) return false;
  if (a->var < 0) return a->leaf == b->leaf;
  return equal(a->lo, b->lo) && equal(a->hi, b->hi);
}

bool DecisionTree::is_bottom() const {
  if (!root_) return true;
  for (const auto& l : to_table())
    if (!l.bottom) return false;
  return true;
}

size_t DecisionTree::leaf_count() const {
  size_t c = 0;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n) return;
    if (n->var < 0) {
      ++c;
      return;
    }
    walk(n->lo);
    walk(n->hi);
  };
  walk(root_);
  return c;
}

void DecisionTree::fill(const NodePtr& n, int var, int bools, uint32_t prefix, std::vector<TreeLeaf>& out) {
  if (var == bools) {
    out[prefix] = n->leaf;
    return;
  }
  if (n->var == var) {
    fill(n->lo, var + 1, bools, prefix, out);
    fill(n->hi, var + 1, bools, prefix | (1u << var), out);
  } else {
    fill(n, var + 1, bools, prefix, out);
    fill(n, var + 1, bools, prefix | (1u << var), out);
  }
}

std::vector<TreeLeaf> DecisionTree::to_table() const {
  std::vector<TreeLeaf> out(size_t{1} << bools_);
  if (root_) fill(root_, 0, bools_, 0, out);
  return out;
}

DecisionTree::NodePtr DecisionTree::build(int var, int bools, uint32_t prefix, const std::vector<TreeLeaf>& table) {
  if (var == bools) return make_leaf(table[prefix]);
  return make_node(var, build(var + 1, bools, prefix, table), build(var + 1, bools, prefix | (1u << var), table));
}

DecisionTree DecisionTree::from_table(int bools, const std::vector<TreeLeaf>& table) {
  DecisionTree t;
  t.bools_ = bools;
  t.root_ = build(0, bools, 0, table);
  return t;
}

DecisionTree::NodePtr DecisionTree::apply(const NodePtr& a, const NodePtr& b, const LeafOp& op) {
  if (a == b) return a;
  if (a->var < 0 && b->var < 0) {
    TreeLeaf l = op(a->leaf, b->leaf);
    if (l == a->leaf) return a;
    if (l == b->leaf) return b;
    return make_leaf(std::move(l));
  }
  int va = a->var < 0 ? INT_MAX : a->var;
  int vb = b->var < 0 ? INT_MAX : b->var;
  int v = std::min(va, vb);
  const NodePtr& alo = va == v ? a->lo : a;
  const NodePtr& ahi = va == v ? a->hi : a;
  const NodePtr& blo = vb == v ? b->lo : b;
  const NodePtr& bhi = vb == v ? b->hi : b;
  return make_node(v, apply(alo, blo, op), apply(ahi, bhi, op));
}

namespace {

TreeLeaf leafwise(const TreeLeaf& a, const TreeLeaf& b, const std::function<Value(const Value&, const Value&)>& f) {
  std::vector<Value> out;
  out.reserve(a.nums.size());
  for (size_t i = 0; i < a.nums.size(); ++i) out.push_back(f(a.nums[i], b.nums[i]));
  return TreeLeaf::of(std::move(out));
}

}  // namespace

DecisionTree DecisionTree::join(const DecisionTree& o) const {
  DecisionTree t = *this;
  t.root_ = apply(root_, o.root_, [](const TreeLeaf& a, const TreeLeaf& b) {
    if (a.bottom) return b;
    if (b.bottom) return a;
    return leafwise(a, b, [](const Value& x, const Value& y) { return x.join(y); });
  });
  return t;
}

DecisionTree DecisionTree::widen(const DecisionTree& o, const ThresholdSet& th) const {
  DecisionTree t = *this;
  t.root_ = apply(root_, o.root_, [&](const TreeLeaf& a, const TreeLeaf& b) {
    if (a.bottom) return b;
    if (b.bottom) return a;
    return leafwise(a, b, [&](const Value& x, const Value& y) { return x.widen(y, th); });
  });
  return t;
}

DecisionTree DecisionTree::narrow(const DecisionTree& o, const ThresholdSet& th) const {
  DecisionTree t = *this;
  t.root_ = apply(root_, o.root_, [&](const TreeLeaf& a, const TreeLeaf& b) {
    if (a.bottom || b.bottom) return TreeLeaf::unreachable();
    return leafwise(a, b, [&](const Value& x, const Value& y) { return x.narrow(y, th); });
  });
  return t;
}

bool DecisionTree::leq(const DecisionTree& o) const {
  if (root_ == o.root_) return true;
  auto a = to_table(), b = o.to_table();
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].bottom) continue;
    if (b[i].bottom) return false;
    for (size_t k = 0; k < a[i].nums.size(); ++k)
      if (!a[i].nums[k].leq(b[i].nums[k])) return false;
  }
  return true;
}

bool DecisionTree::operator==(const DecisionTree& o) const { return bools_ == o.bools_ && equal(root_, o.root_); }

std::string DecisionTree::to_string(const std::vector<std::string>& bool_names,
                                    const std::vector<std::string>& num_names) const {
  std::function<std::string(const NodePtr&)> show = [&](const NodePtr& n) -> std::string {
    if (n->var < 0) {
      if (n->leaf.bottom) return "_|_";
      std::string s;
      for (size_t i = 0; i < n->leaf.nums.size(); ++i) {
        if (i) s += ", ";
        s += num_names[i] + " in " + n->leaf.nums[i].to_string();
      }
      return s.empty() ? "T" : s;
    }
    return bool_names[n->var] + " ? (" + show(n->hi) + ") : (" + show(n->lo) + ")";
  };
  return root_ ? show(root_) : "_|_";
}

}  // namespace miniastree
