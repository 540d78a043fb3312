#pragma once

// Cells, abstract environments and their cell-wise lattice operations.

#include <optional>
#include <string>
#include <vector>

#include "miniastree/clocked.hpp"
#include "miniastree/decision_tree.hpp"
#include "miniastree/ellipsoid.hpp"
#include "miniastree/frontend.hpp"
#include "miniastree/interval.hpp"
#include "miniastree/octagon.hpp"
#include "miniastree/pmap.hpp"

namespace miniastree {

enum class CellKind { Atomic, Element, Shrunk, Field };

struct Cell {
  int id = -1;
  int var = -1;
  CellKind kind = CellKind::Atomic;
  int64_t index = -1;  // Element
  int field = -1;      // Field
  ScalarType type = ScalarType::Int;
  bool clocked = false;
  std::string name;
};

class Layout {
 public:
  Layout() = default;
  // Arrays longer than `shrink_above` get a single cell. Integer scalars of
  // global or static storage are clocked when `clocked` is set.
  Layout(const Program& p, int shrink_above = 64, bool clocked = true);

  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int id) const { return cells_[id]; }
  size_t size() const { return cells_.size(); }

  int scalar(int var) const;  // -1 unless an atomic cell exists
  int field(int var, int field) const;
  // Element cell of an expanded array, or the shrunk cell.
  int element(int var, int64_t index) const;
  bool is_shrunk(int var) const;
  int64_t length(int var) const;
  const std::vector<int>& var_cells(int var) const { return by_var_[var]; }

 private:
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> by_var_;
  std::vector<int64_t> lengths_;
  std::vector<bool> shrunk_;
};

struct CellValue {
  Value v;
  std::optional<ClockedValue> clocked;

  bool operator==(const CellValue& o) const { return v == o.v && clocked == o.clocked; }
};

struct AbstractEnv {
  bool bottom = false;
  PMap<CellValue> cells;
  IntInterval clock = IntInterval::singleton(0);
  PMap<Octagon> octagons;
  PMap<EllipsoidMap> ellipses;
  PMap<DecisionTree> trees;

  static AbstractEnv make_bottom() {
    AbstractEnv e;
    e.bottom = true;
    return e;
  }
  const Value& value(int cell) const { return cells.find(cell)->v; }
  const CellValue& cell(int c) const { return *cells.find(c); }
};

// Cells of each ellipsoid pack, needed for the reductions done before joins.
struct EnvShape {
  std::vector<std::vector<int>> ellipse_cells;
};

struct LatticeOptions {
  ThresholdSet thresholds;
  EnvShape shape;
};

AbstractEnv env_join(const AbstractEnv& a, const AbstractEnv& b, const LatticeOptions& o, PMapStats* stats = nullptr);
AbstractEnv env_widen(const AbstractEnv& a, const AbstractEnv& b, const LatticeOptions& o);
AbstractEnv env_narrow(const AbstractEnv& a, const AbstractEnv& b, const LatticeOptions& o);
bool env_leq(const AbstractEnv& a, const AbstractEnv& b);
bool env_equal(const AbstractEnv& a, const AbstractEnv& b);
AbstractEnv env_perturb(const AbstractEnv& a, double epsilon);
// Only the listed cells.
AbstractEnv env_perturb(const AbstractEnv& a, double epsilon, const std::vector<int>& cells);
// Cells whose value in `b` is not included in `a`.
std::vector<int> env_unstable_cells(const AbstractEnv& a, const AbstractEnv& b);

CellValue cell_join(const CellValue& a, const CellValue& b);
CellValue cell_widen(const CellValue& a, const CellValue& b, const ThresholdSet& t);
CellValue cell_narrow(const CellValue& a, const CellValue& b, const ThresholdSet& t);
bool cell_leq(const CellValue& a, const CellValue& b);

}  // namespace miniastree
