#pragma once

// Persistent AVL map from int keys to values, with path copying.
//
// Binary operations walk both trees in lockstep and return physically shared
// subtrees untouched, so their cost follows the number of differing entries.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace miniastree {

struct PMapStats {
  size_t visits = 0;
};

template <class V>
class PMap {
  struct Node {
    int key;
    V value;
    std::shared_ptr<const Node> left, right;
    int height;
  };
  using NodePtr = std::shared_ptr<const Node>;

 public:
  PMap() = default;

  static PMap from_sorted(const std::vector<std::pair<int, V>>& items) {
    PMap m;
    m.root_ = build(items, 0, items.size());
    m.size_ = items.size();
    return m;
  }

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool same(const PMap& o) const { return root_ == o.root_; }

  const V* find(int key) const {
    const Node* n = root_.get();
    while (n) {
      if (key == n->key) return &n->value;
      n = key < n->key ? n->left.get() : n->right.get();
    }
    return nullptr;
  }

  PMap set(int key, V value) const {
    PMap m;
    bool added = false;
    m.root_ = insert(root_, key, std::move(value), added);
    m.size_ = size_ + (added ? 1 : 0);
    return m;
  }

  template <class F>
  void for_each(F&& f) const {
    walk(root_.get(), f);
  }

  std::vector<std::pair<int, V>> items() const {
    std::vector<std::pair<int, V>> out;
    out.reserve(size_);
    for_each([&](int k, const V& v) { out.emplace_back(k, v); });
    return out;
  }

  // Pointwise f(a, b) over keys of both maps; keys present on one side only
  // keep their value. Shared subtrees are not visited.
  template <class F>
  PMap merge(const PMap& o, F&& f, PMapStats* stats = nullptr) const {
    if (root_ == o.root_) {
      if (stats) ++stats->visits;
      return *this;
    }
    bool ok = true;
    NodePtr r = merge_nodes(root_, o.root_, f, stats, ok);
    if (ok) {
      PMap m;
      m.root_ = r;
      m.size_ = size_;
      return m;
    }
    return merge_flat(o, f, stats);
  }

  // Same result as merge, by full traversal of both maps.
  template <class F>
  PMap merge_flat(const PMap& o, F&& f, PMapStats* stats = nullptr) const {
    auto a = items(), b = o.items();
    if (stats) stats->visits += a.size() + b.size();
    std::vector<std::pair<int, V>> out;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        out.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        out.push_back(b[j++]);
      } else {
        out.emplace_back(a[i].first, f(a[i].second, b[j].second));
        ++i;
        ++j;
      }
    }
    return from_sorted(out);
  }

  // pred(a, b) holds for every key of both maps (missing keys fail unless
  // both maps lack them). Shared subtrees count as satisfied.
  template <class P>
  bool all2(const PMap& o, P&& pred, PMapStats* stats = nullptr) const {
    if (root_ == o.root_) {
      if (stats) ++stats->visits;
      return true;
    }
    bool ok = true;
    bool res = all_nodes(root_, o.root_, pred, stats, ok);
    if (ok) return res;
    auto a = items(), b = o.items();
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i].first != b[i].first || !pred(a[i].second, b[i].second)) return false;
    return true;
  }

  // f(key, a, b) for every key whose entries may differ; a or b is null when
  // the key is missing on that side. Shared subtrees are skipped.
  template <class F>
  void for_each_diff(const PMap& o, F&& f) const {
    if (root_ == o.root_) return;
    bool ok = true;
    diff_nodes(root_, o.root_, f, ok);
    if (ok) return;
    auto a = items(), b = o.items();
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        f(a[i].first, &a[i].second, static_cast<const V*>(nullptr));
        ++i;
      } else if (i == a.size() || b[j].first < a[i].first) {
        f(b[j].first, static_cast<const V*>(nullptr), &b[j].second);
        ++j;
      } else {
        if (!(a[i].second == b[j].second)) f(a[i].first, &a[i].second, &b[j].second);
        ++i;
        ++j;
      }
    }
  }

  template <class F>
  PMap map(F&& f) const {
    PMap m;
    m.root_ = map_nodes(root_, f);
    m.size_ = size_;
    return m;
  }

 private:
  NodePtr root_;
  size_t size_ = 0;

  static int height(const NodePtr& n) { return n ? n->height : 0; }

  static NodePtr make(int key, V value, NodePtr l, NodePtr r) {
    int h = 1 + std::max(height(l), height(r));
    return std::make_shared<const Node>(Node{key, std::move(value), std::move(l), std::move(r), h});
  }

  static NodePtr build(const std::vector<std::pair<int, V>>& items, size_t lo, size_t hi) {
    if (lo >= hi) return nullptr;
    size_t mid = lo + (hi - lo) / 2;
    return make(items[mid].first, items[mid].second, build(items, lo, mid), build(items, mid + 1, hi));
  }

  static NodePtr rotate_right(const NodePtr& n) {
    const NodePtr& l = n->left;
    return make(l->key, l->value, l->left, make(n->key, n->value, l->right, n->right));
  }

  static NodePtr rotate_left(const NodePtr& n) {
    const NodePtr& r = n->right;
    return make(r->key, r->value, make(n->key, n->value, n->left, r->left), r->right);
  }

  static NodePtr balance(NodePtr n) {
    int bf = height(n->left) - height(n->right);
    if (bf > 1) {
      if (height(n->left->left) < height(n->left->right))
        n = make(n->key, n->value, rotate_left(n->left), n->right);
      return rotate_right(n);
    }
    if (bf < -1) {
      if (height(n->right->right) < height(n->right->left))
        n = make(n->key, n->value, n->left, rotate_right(n->right));
      return rotate_left(n);
    }
    return n;
  }

  static NodePtr insert(const NodePtr& n, int key, V value, bool& added) {
    if (!n) {
      added = true;
      return make(key, std::move(value), nullptr, nullptr);
    }
    if (key == n->key) return make(key, std::move(value), n->left, n->right);
    if (key < n->key) return balance(make(n->key, n->value, insert(n->left, key, std::move(value), added), n->right));
    return balance(make(n->key, n->value, n->left, insert(n->right, key, std::move(value), added)));
  }

  template <class F>
  static void walk(const Node* n, F& f) {
    if (!n) return;
    walk(n->left.get(), f);
    f(n->key, n->value);
    walk(n->right.get(), f);
  }

  template <class F>
  static NodePtr merge_nodes(const NodePtr& a, const NodePtr& b, F& f, PMapStats* stats, bool& ok) {
    if (a == b) return a;
    if (stats) ++stats->visits;
    if (!a || !b || a->key != b->key) {
      ok = false;
      return nullptr;
    }
    NodePtr l = merge_nodes(a->left, b->left, f, stats, ok);
    if (!ok) return nullptr;
    NodePtr r = merge_nodes(a->right, b->right, f, stats, ok);
    if (!ok) return nullptr;
    V v = f(a->value, b->value);
    if (l == a->left && r == a->right && v == a->value) return a;
    if (l == b->left && r == b->right && v == b->value) return b;
    return std::make_shared<const Node>(Node{a->key, std::move(v), l, r, a->height});
  }

  template <class P>
  static bool all_nodes(const NodePtr& a, const NodePtr& b, P& pred, PMapStats* stats, bool& ok) {
    if (a == b) return true;
    if (stats) ++stats->visits;
    if (!a || !b || a->key != b->key) {
      ok = false;
      return false;
    }
    if (!pred(a->value, b->value)) return false;
    return all_nodes(a->left, b->left, pred, stats, ok) && ok &&
           all_nodes(a->right, b->right, pred, stats, ok);
  }

  // Lockstep pass over identically shaped trees; clears `ok` and stops
  // before reporting anything when the shapes differ.
  template <class F>
  static void diff_nodes(const NodePtr& a, const NodePtr& b, F& f, bool& ok) {
    std::vector<std::pair<const Node*, const Node*>> hits;
    collect_diff(a, b, hits, ok);
    if (!ok) return;
    for (auto [x, y] : hits) f(x->key, &x->value, &y->value);
  }

  static void collect_diff(const NodePtr& a, const NodePtr& b, std::vector<std::pair<const Node*, const Node*>>& hits,
                           bool& ok) {
    if (a == b || !ok) return;
    if (!a || !b || a->key != b->key) {
      ok = false;
      return;
    }
    collect_diff(a->left, b->left, hits, ok);
    if (!(a->value == b->value)) hits.emplace_back(a.get(), b.get());
    collect_diff(a->right, b->right, hits, ok);
  }

  template <class F>
  static NodePtr map_nodes(const NodePtr& n, F& f) {
    if (!n) return nullptr;
    NodePtr l = map_nodes(n->left, f);
    NodePtr r = map_nodes(n->right, f);
    V v = f(n->key, n->value);
    if (l == n->left && r == n->right && v == n->value) return n;
    return std::make_shared<const Node>(Node{n->key, std::move(v), l, r, n->height});
  }
};

}  // namespace miniastree
