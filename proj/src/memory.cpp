#include "miniastree/memory.hpp"

#include <limits>

namespace miniastree {

Layout::Layout(const Program& p, int shrink_above, bool clocked) {
  by_var_.assign(p.vars.size(), {});
  lengths_.assign(p.vars.size(), 0);
  shrunk_.assign(p.vars.size(), false);
  auto add = [&](const VarDecl& d, CellKind k, int64_t index, int field, ScalarType t, std::string name) {
    Cell c;
    c.id = static_cast<int>(cells_.size());
    c.var = d.id;
    c.kind = k;
    c.index = index;
    c.field = field;
    c.type = t;
    bool lasting = d.storage == Storage::Global || d.storage == Storage::Static;
    c.clocked = clocked && lasting && t == ScalarType::Int && k != CellKind::Shrunk;
    c.name = std::move(name);
    by_var_[d.id].push_back(c.id);
    cells_.push_back(std::move(c));
  };
  for (const auto& d : p.vars) {
    if (d.pruned || d.is_volatile) continue;
    switch (d.ty.kind) {
      case TypeDesc::Scalar:
        add(d, CellKind::Atomic, -1, -1, d.ty.scalar, d.qual);
        break;
      case TypeDesc::Array:
        lengths_[d.id] = d.ty.length;
        if (d.ty.length > shrink_above) {
          shrunk_[d.id] = true;
          add(d, CellKind::Shrunk, -1, -1, d.ty.scalar, d.qual + "[*]");
        } else {
          for (int64_t i = 0; i < d.ty.length; ++i)
            add(d, CellKind::Element, i, -1, d.ty.scalar, d.qual + "[" + std::to_string(i) + "]");
        }
        break;
      case TypeDesc::Record:
        for (size_t f = 0; f < d.ty.fields.size(); ++f)
          add(d, CellKind::Field, -1, static_cast<int>(f), d.ty.fields[f].second, d.qual + "." + d.ty.fields[f].first);
        break;
    }
  }
}

int Layout::scalar(int var) const {
  if (var < 0 || var >= static_cast<int>(by_var_.size()) || by_var_[var].empty()) return -1;
  int c = by_var_[var][0];
  return cells_[c].kind == CellKind::Atomic ? c : -1;
}

int Layout::field(int var, int field) const {
  if (var < 0 || var >= static_cast<int>(by_var_.size())) return -1;
  for (int c : by_var_[var])
    if (cells_[c].field == field) return c;
  return -1;
}

int Layout::element(int var, int64_t index) const {
  if (var < 0 || var >= static_cast<int>(by_var_.size()) || by_var_[var].empty()) return -1;
  if (shrunk_[var]) return by_var_[var][0];
  if (index < 0 || index >= lengths_[var]) return -1;
  return by_var_[var][static_cast<size_t>(index)];
}

bool Layout::is_shrunk(int var) const { return var >= 0 && var < static_cast<int>(shrunk_.size()) && shrunk_[var]; }

int64_t Layout::length(int var) const { return lengths_[var]; }

CellValue cell_join(const CellValue& a, const CellValue& b) {
  CellValue r{a.v.join(b.v), std::nullopt};
  if (a.clocked && b.clocked) r.clocked = a.clocked->join(*b.clocked);
  return r;
}

CellValue cell_widen(const CellValue& a, const CellValue& b, const ThresholdSet& t) {
  CellValue r{a.v.widen(b.v, t), std::nullopt};
  if (a.clocked && b.clocked) r.clocked = a.clocked->widen(*b.clocked, t);
  return r;
}

CellValue cell_narrow(const CellValue& a, const CellValue& b, const ThresholdSet& t) {
  CellValue r{a.v.narrow(b.v, t), std::nullopt};
  if (a.clocked && b.clocked) r.clocked = a.clocked->narrow(*b.clocked, t);
  return r;
}

bool cell_leq(const CellValue& a, const CellValue& b) {
  if (!a.v.leq(b.v)) return false;
  if (b.clocked && a.clocked) return a.clocked->leq(*b.clocked);
  return !b.clocked;
}

namespace {

// Bounds every ellipsoid constraint by what the intervals already imply.
AbstractEnv reduce_ellipses(const AbstractEnv& e, const EnvShape& shape) {
  if (e.bottom || e.ellipses.empty()) return e;
  AbstractEnv r = e;
  e.ellipses.for_each([&](int k, const EllipsoidMap& m) {
    if (k < 0 || k >= static_cast<int>(shape.ellipse_cells.size())) return;
    const auto& cells = shape.ellipse_cells[k];
    EllipsoidMap out = m;
    for (int x = 0; x < m.dim(); ++x) {
      FloatInterval rx = e.value(cells[x]).to_float_interval();
      for (int y = 0; y < m.dim(); ++y) {
        if (x == y) continue;
        FloatInterval ry = e.value(cells[y]).to_float_interval();
        out = out.tighten(x, y, quad_upper(rx, ry, m.params()));
      }
    }
    if (!(out == m)) r.ellipses = r.ellipses.set(k, out);
  });
  return r;
}

template <class CellOp, class OctOp, class EllOp, class TreeOp>
AbstractEnv combine(const AbstractEnv& a, const AbstractEnv& b, CellOp cop, OctOp oop, EllOp eop, TreeOp top,
                    PMapStats* stats) {
  AbstractEnv r;
  r.cells = a.cells.merge(b.cells, cop, stats);
  r.octagons = a.octagons.merge(b.octagons, oop, stats);
  r.ellipses = a.ellipses.merge(b.ellipses, eop, stats);
  r.trees = a.trees.merge(b.trees, top, stats);
  return r;
}

}  // namespace

AbstractEnv env_join(const AbstractEnv& a0, const AbstractEnv& b0, const LatticeOptions& o, PMapStats* stats) {
  if (a0.bottom) return b0;
  if (b0.bottom) return a0;
  AbstractEnv a = reduce_ellipses(a0, o.shape), b = reduce_ellipses(b0, o.shape);
  AbstractEnv r = combine(
      a, b, [](const CellValue& x, const CellValue& y) { return cell_join(x, y); },
      [](const Octagon& x, const Octagon& y) { return x.join(y); },
      [](const EllipsoidMap& x, const EllipsoidMap& y) { return x.join(y); },
      [](const DecisionTree& x, const DecisionTree& y) { return x.join(y); }, stats);
  r.clock = a.clock.join(b.clock);
  return r;
}

AbstractEnv env_widen(const AbstractEnv& a0, const AbstractEnv& b0, const LatticeOptions& o) {
  if (a0.bottom) return b0;
  if (b0.bottom) return a0;
  AbstractEnv a = reduce_ellipses(a0, o.shape), b = reduce_ellipses(b0, o.shape);
  const ThresholdSet& t = o.thresholds;
  AbstractEnv r = combine(
      a, b, [&](const CellValue& x, const CellValue& y) { return cell_widen(x, y, t); },
      [&](const Octagon& x, const Octagon& y) { return x.widen(y, t); },
      [&](const EllipsoidMap& x, const EllipsoidMap& y) { return x.widen(y, t); },
      [&](const DecisionTree& x, const DecisionTree& y) { return x.widen(y, t); }, nullptr);
  r.clock = a.clock.widen(b.clock, t);
  return r;
}

AbstractEnv env_narrow(const AbstractEnv& a, const AbstractEnv& b, const LatticeOptions& o) {
  if (a.bottom || b.bottom) return AbstractEnv::make_bottom();
  const ThresholdSet& t = o.thresholds;
  AbstractEnv r = combine(
      a, b, [&](const CellValue& x, const CellValue& y) { return cell_narrow(x, y, t); },
      [](const Octagon& x, const Octagon& y) { return x.narrow(y); },
      [](const EllipsoidMap& x, const EllipsoidMap& y) { return x.narrow(y); },
      [&](const DecisionTree& x, const DecisionTree& y) { return x.narrow(y, t); }, nullptr);
  r.clock = a.clock.meet(b.clock);
  return r;
}

bool env_leq(const AbstractEnv& a, const AbstractEnv& b) {
  if (a.bottom) return true;
  if (b.bottom) return false;
  return a.clock.leq(b.clock) &&
         a.cells.all2(b.cells, [](const CellValue& x, const CellValue& y) { return cell_leq(x, y); }) &&
         a.octagons.all2(b.octagons, [](const Octagon& x, const Octagon& y) { return x.leq(y); }) &&
         a.ellipses.all2(b.ellipses, [](const EllipsoidMap& x, const EllipsoidMap& y) { return x.leq(y); }) &&
         a.trees.all2(b.trees, [](const DecisionTree& x, const DecisionTree& y) { return x.leq(y); });
}

bool env_equal(const AbstractEnv& a, const AbstractEnv& b) {
  if (a.bottom || b.bottom) return a.bottom == b.bottom;
  auto eq = [](const auto& x, const auto& y) { return x == y; };
  return a.clock == b.clock && a.cells.all2(b.cells, eq) && a.octagons.all2(b.octagons, eq) &&
         a.ellipses.all2(b.ellipses, eq) && a.trees.all2(b.trees, eq);
}

AbstractEnv env_perturb(const AbstractEnv& a, double epsilon) {
  if (a.bottom || epsilon <= 0) return a;
  AbstractEnv r = a;
  r.cells = a.cells.map([&](int, const CellValue& c) {
    if (!c.v.is_float()) return c;
    return CellValue{c.v.perturb(epsilon), c.clocked};
  });
  return r;
}

AbstractEnv env_perturb(const AbstractEnv& a, double epsilon, const std::vector<int>& cells) {
  if (a.bottom || epsilon <= 0) return a;
  AbstractEnv r = a;
  for (int c : cells) {
    const CellValue& cv = a.cell(c);
    if (cv.v.is_float()) r.cells = r.cells.set(c, CellValue{cv.v.perturb(epsilon), cv.clocked});
  }
  return r;
}

std::vector<int> env_unstable_cells(const AbstractEnv& a, const AbstractEnv& b) {
  std::vector<int> out;
  if (b.bottom) return out;
  if (a.bottom) {
    b.cells.for_each([&](int k, const CellValue&) { out.push_back(k); });
    return out;
  }
  a.cells.for_each_diff(b.cells, [&](int k, const CellValue* x, const CellValue* y) {
    if (y && (!x || !cell_leq(*y, *x))) out.push_back(k);
  });
  return out;
}

}  // namespace miniastree
