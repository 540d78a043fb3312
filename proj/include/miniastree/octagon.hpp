#pragma once

// Octagons: conjunctions of +-x +-y <= c over a pack of k variables, stored
// as a (2k)x(2k) difference-bound matrix with double entries.
//
// Index 2i stands for +v_i and 2i+1 for -v_i; entry m[a][b] bounds
// V_b - V_a. All bound arithmetic rounds upward, so constraints hold in the
// real field.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "miniastree/interval.hpp"

namespace miniastree {

// Pack-local linear expression: sum of +-v_i plus an interval remainder.
struct OctForm {
  std::vector<std::pair<int, int>> units;  // (variable index, sign +-1)
  FloatInterval rest = FloatInterval(0.0, 0.0);
};

class Octagon {
 public:
  Octagon() = default;
  explicit Octagon(int n);  // unconstrained
  static Octagon bottom(int n);

  int dim() const { return n_; }
  bool is_bottom() const { return bottom_; }
  bool is_closed() const { return closed_; }
  double at(int a, int b) const { return (*m_)[static_cast<size_t>(a) * 2 * n_ + b]; }

  // V_b - V_a <= c, together with its coherent twin.
  Octagon add_constraint(int a, int b, double c) const;
  Octagon with_bounds(int v, const FloatInterval& r) const;
  FloatInterval bounds(int v) const;

  Octagon closed() const;
  Octagon forget(int v) const;

  // Upper bound / range of a pack-local expression; the octagon should be
  // closed for best results.
  double upper(const OctForm& f) const;
  FloatInterval range(const OctForm& f) const;

  // v := f, with `unary` a sound range for the new value.
  Octagon assign(int v, const OctForm& f, const FloatInterval& unary) const;
  // f <= 0.
  Octagon guard_le(const OctForm& f) const;

  Octagon join(const Octagon& o) const;
  Octagon widen(const Octagon& o, const ThresholdSet& t) const;
  Octagon narrow(const Octagon& o) const;
  bool leq(const Octagon& o) const;
  bool operator==(const Octagon& o) const;

  // One line per non-trivial constraint, `+x -y <= c`.
  std::vector<std::string> constraints(const std::vector<std::string>& names) const;

 private:
  int n_ = 0;
  bool bottom_ = false;
  bool closed_ = true;
  std::shared_ptr<const std::vector<double>> m_ = std::make_shared<const std::vector<double>>();

  double& ref(std::vector<double>& m, int a, int b) const { return m[static_cast<size_t>(a) * 2 * n_ + b]; }
  Octagon from(std::vector<double> m, bool closed) const;
};

}  // namespace miniastree
