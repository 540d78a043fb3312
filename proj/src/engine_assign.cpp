#include <cmath>

#include "engine.hpp"

namespace miniastree {

namespace {

TreeLeaf join_leaf(const TreeLeaf& a, const TreeLeaf& b) {
  if (a.bottom) return b;
  if (b.bottom) return a;
  std::vector<Value> v;
  for (size_t i = 0; i < a.nums.size(); ++i) v.push_back(a.nums[i].join(b.nums[i]));
  return TreeLeaf::of(std::move(v));
}

void expr_vars(const Expr& e, std::vector<int>& out) {
  if (e.kind == ExprKind::Var || e.kind == ExprKind::Index || e.kind == ExprKind::Field) out.push_back(e.var);
  if (e.a) expr_vars(*e.a, out);
  if (e.b) expr_vars(*e.b, out);
}

IntInterval int_hull(const FloatInterval& f) {
  if (f.is_bottom()) return IntInterval::bottom();
  auto bound = [](double x, bool up) {
    if (std::isinf(x) || std::fabs(x) > 9e18) return x < 0 ? IntInterval::kNegInf : IntInterval::kPosInf;
    return static_cast<int64_t>(up ? std::ceil(x) : std::floor(x));
  };
  return IntInterval(bound(f.lo(), false), bound(f.hi(), true));
}

}  // namespace

AbstractEnv Engine::set_cell(const AbstractEnv& env, int cell, const Value& v) const {
  if (env.bottom) return env;
  if (v.is_bottom()) return AbstractEnv::make_bottom();
  CellValue cv{v, std::nullopt};
  if (layout_.cell(cell).clocked) cv.clocked = ClockedValue::from_value(v.as_int(), env.clock);
  AbstractEnv out = env;
  out.cells = env.cells.set(cell, std::move(cv));
  return out;
}

AbstractEnv Engine::refine_cell(const AbstractEnv& env, int cell, const Value& v) const {
  if (env.bottom) return env;
  const CellValue& old = env.cell(cell);
  Value nv = old.v.meet(v);
  if (nv.is_bottom()) return AbstractEnv::make_bottom();
  if (nv == old.v) return env;
  CellValue cv{nv, old.clocked};
  if (cv.clocked) {
    cv.clocked = cv.clocked->refine(nv.as_int(), env.clock);
    if (cv.clocked->is_bottom()) return AbstractEnv::make_bottom();
    cv.v = Value(nv.type(), cv.clocked->v);
  }
  AbstractEnv out = env;
  out.cells = env.cells.set(cell, std::move(cv));
  return out;
}

std::vector<int> Engine::targets(const AbstractEnv& env, const Expr& lhs, bool& strong) {
  strong = true;
  switch (lhs.kind) {
    case ExprKind::Var:
      return {layout_.scalar(lhs.var)};
    case ExprKind::Field:
      return {layout_.field(lhs.var, lhs.field)};
    case ExprKind::Index: {
      Value i = eval(env, *lhs.a);
      if (i.is_bottom()) return {};
      int64_t len = layout_.length(lhs.var);
      IntInterval in = i.as_int().meet(IntInterval(0, len - 1));
      if (!i.as_int().leq(in)) {
        ErrorFlags f;
        f.array_bounds = true;
        report(lhs, f, i.to_string());
      }
      if (in.is_bottom()) return {};
      if (layout_.is_shrunk(lhs.var)) {
        strong = false;
        return {layout_.element(lhs.var, 0)};
      }
      std::vector<int> out;
      for (int64_t k = in.lo(); k <= in.hi(); ++k) out.push_back(layout_.element(lhs.var, k));
      strong = out.size() == 1;
      return out;
    }
    default:
      return {};
  }
}

AbstractEnv Engine::assign(const AbstractEnv& env, const Expr& lhs, const ExprPtr& rhs, int stmt_id) {
  if (env.bottom) return env;
  seen_ = ErrorFlags{};
  Value v = eval(env, *rhs);
  ErrorFlags flags = seen_;
  bool strong = true;
  std::vector<int> cells = targets(env, lhs, strong);
  if (v.is_bottom() || cells.empty()) return AbstractEnv::make_bottom();
  if (!strong) {
    AbstractEnv out = env;
    for (int c : cells) out = set_cell(out, c, env.value(c).join(v));
    return out;
  }
  int cell = cells[0];
  if (v.type() != ScalarType::Bool && !flags.any()) {
    auto range = [&](int c) { return env.value(c).to_float_interval(); };
    if (auto lf = linear(env, *rhs, ErrorModel::Absolute, false)) v = v.meet_real(lf->eval(range));
    if (v.is_float())
      if (auto lr = linear(env, *rhs, ErrorModel::Relative, false)) v = v.meet_real(lr->eval_rounded_result(range));
    if (v.is_bottom()) return AbstractEnv::make_bottom();
  }

  CellValue cv{v, std::nullopt};
  if (layout_.cell(cell).clocked) {
    std::optional<ClockedValue> cl;
    if (!flags.any())
      if (auto lf = linear(env, *rhs, ErrorModel::Absolute, true))
        if (lf->terms().size() == 1 && lf->terms()[0].coeff == FloatInterval(1.0, 1.0)) {
          const CellValue& src = env.cell(lf->terms()[0].cell);
          if (src.clocked) cl = src.clocked->shift(int_hull(lf->full_constant()));
        }
    if (!cl) cl = ClockedValue::from_value(v.as_int(), env.clock);
    cl = cl->refine(v.as_int(), env.clock);
    if (cl->is_bottom()) return AbstractEnv::make_bottom();
    cv.v = Value(v.type(), cl->v);
    cv.clocked = cl;
  }
  AbstractEnv out = env;
  out.cells = env.cells.set(cell, std::move(cv));
  if (!cell_octs_[cell].empty()) out = assign_octagons(env, out, cell, flags.any() ? nullptr : rhs.get());
  if (!cell_ells_[cell].empty()) out = assign_ellipsoids(env, out, cell, *rhs, stmt_id);
  if (!cell_trees_[cell].empty()) out = assign_trees(env, out, cell, rhs);
  return out;
}

bool Engine::has_units(int pack, const LinearForm& f) const {
  for (const auto& t : f.terms())
    for (auto [k, pos] : cell_octs_[t.cell])
      if (k == pack && (t.coeff.leq(FloatInterval(0.5, 1.5)) || t.coeff.leq(FloatInterval(-1.5, -0.5)))) return true;
  return false;
}

OctForm Engine::oct_form(const AbstractEnv& env, int pack, const LinearForm& f) const {
  OctForm o;
  o.rest = f.full_constant();
  for (const auto& t : f.terms()) {
    int pos = -1;
    for (auto [k, p] : cell_octs_[t.cell])
      if (k == pack) pos = p;
    FloatInterval r = env.value(t.cell).to_float_interval();
    if (pos >= 0 && t.coeff.leq(FloatInterval(0.5, 1.5))) {
      o.units.emplace_back(pos, 1);
      o.rest = o.rest.add(t.coeff.sub(FloatInterval(1.0, 1.0)).mul(r));
    } else if (pos >= 0 && t.coeff.leq(FloatInterval(-1.5, -0.5))) {
      o.units.emplace_back(pos, -1);
      o.rest = o.rest.add(t.coeff.add(FloatInterval(1.0, 1.0)).mul(r));
    } else {
      o.rest = o.rest.add(t.coeff.mul(r));
    }
  }
  return o;
}

AbstractEnv Engine::reduce_octagon(const AbstractEnv& env, int pack, bool mark) {
  if (env.bottom) return env;
  const Octagon* o = env.octagons.find(pack);
  if (!o) return env;
  if (o->is_bottom()) {
    if (mark) useful_.insert(octs_[pack].id);
    return AbstractEnv::make_bottom();
  }
  AbstractEnv out = env;
  const auto& cells = octs_[pack].cells;
  for (size_t i = 0; i < cells.size(); ++i) {
    const Value& v = out.value(cells[i]);
    Value nv = v.meet_real(o->bounds(static_cast<int>(i)));
    if (nv == v) continue;
    if (mark) useful_.insert(octs_[pack].id);
    out = refine_cell(out, cells[i], nv);
    if (out.bottom) return out;
  }
  return out;
}

AbstractEnv Engine::assign_octagons(const AbstractEnv& before, AbstractEnv env, int cell, const Expr* rhs) {
  std::optional<LinearForm> full, outer;
  if (rhs && rhs->type != ScalarType::Bool) {
    full = linear(before, *rhs, ErrorModel::Absolute, true);
    outer = linear(before, *rhs, ErrorModel::Absolute, false);
  }
  for (auto [k, pos] : cell_octs_[cell]) {
    const Octagon* old = before.octagons.find(k);
    if (!old) continue;
    Octagon o = old->closed();
    Value v = env.value(cell);
    Octagon next;
    if (full) {
      if (outer) {
        Value nv = v.meet_real(o.range(oct_form(before, k, *outer)));
        if (nv.is_bottom()) return AbstractEnv::make_bottom();
        if (!(nv == v)) {
          useful_.insert(octs_[k].id);
          env = refine_cell(env, cell, nv);
          if (env.bottom) return env;
          v = env.value(cell);
        }
      }
      next = o.assign(pos, oct_form(before, k, *full), v.to_float_interval());
    } else {
      next = o.forget(pos).with_bounds(pos, v.to_float_interval()).closed();
    }
    env.octagons = env.octagons.set(k, next);
    env = reduce_octagon(env, k, true);
    if (env.bottom) return env;
  }
  return env;
}

AbstractEnv Engine::reduce_ellipsoid(const AbstractEnv& env, int pack) const {
  if (env.bottom) return env;
  const EllipsoidMap* m = env.ellipses.find(pack);
  if (!m) return env;
  AbstractEnv out = env;
  const auto& cells = ells_[pack].cells;
  for (int x = 0; x < m->dim(); ++x)
    for (int y = 0; y < m->dim(); ++y) {
      double k = m->get(x, y);
      if (x == y || std::isinf(k)) continue;
      double bx = ell_first_bound(k, m->params()), by = ell_second_bound(k, m->params());
      out = refine_cell(out, cells[x], Value(FloatInterval(-bx, bx)));
      out = refine_cell(out, cells[y], Value(FloatInterval(-by, by)));
      if (out.bottom) return out;
    }
  return out;
}

AbstractEnv Engine::assign_ellipsoids(const AbstractEnv& before, AbstractEnv env, int cell, const Expr& rhs,
                                      int stmt_id) {
  for (auto [k, pos] : cell_ells_[cell]) {
    const EllPackInfo& pk = ells_[k];
    const EllipsoidMap* m = before.ellipses.find(k);
    if (!m) continue;
    EllipsoidMap next;
    int src = rhs.kind == ExprKind::Var ? cell_of(before, rhs) : -1;
    int src_pos = -1;
    for (size_t i = 0; i < pk.cells.size(); ++i)
      if (pk.cells[i] == src) src_pos = static_cast<int>(i);
    if (stmt_id >= 0 && stmt_id == pk.update_stmt && pos == 1) {
      ++quiet_;
      FloatInterval t(0.0, 0.0);
      for (const auto& [sign, term] : pk.t_terms) {
        FloatInterval r = eval(before, *term).to_float_interval();
        t = t.add(sign < 0 ? r.neg() : r);
      }
      --quiet_;
      next = t.is_bottom() ? m->forget(1) : m->filter(1, 0, 2, t.magnitude());
    } else if (src_pos >= 0) {
      next = m->copy(pos, src_pos);
    } else {
      next = m->forget(pos);
    }
    env.ellipses = env.ellipses.set(k, next);
    env = reduce_ellipsoid(env, k);
    if (env.bottom) return env;
  }
  return env;
}

AbstractEnv Engine::leaf_env(const AbstractEnv& env, int pack, uint32_t s, const TreeLeaf& leaf) const {
  AbstractEnv out = env;
  out.octagons = {};
  out.ellipses = {};
  out.trees = {};
  const TreePackInfo& pk = trees_[pack];
  for (size_t i = 0; i < pk.bools.size() && !out.bottom; ++i)
    out = refine_cell(out, pk.bools[i], Value::of_bool((s >> i) & 1u));
  for (size_t j = 0; j < pk.nums.size() && !out.bottom; ++j) out = refine_cell(out, pk.nums[j], leaf.nums[j]);
  return out;
}

TreeLeaf Engine::leaf_of(const AbstractEnv& env, int pack) const {
  if (env.bottom) return TreeLeaf::unreachable();
  std::vector<Value> v;
  for (int c : trees_[pack].nums) v.push_back(env.value(c));
  return TreeLeaf::of(std::move(v));
}

AbstractEnv Engine::reduce_tree(const AbstractEnv& env, int pack) const {
  if (env.bottom) return env;
  const DecisionTree* t = env.trees.find(pack);
  if (!t) return env;
  const TreePackInfo& pk = trees_[pack];
  auto table = t->to_table();
  std::vector<bool> can0(pk.bools.size()), can1(pk.bools.size());
  TreeLeaf all = TreeLeaf::unreachable();
  for (uint32_t s = 0; s < table.size(); ++s) {
    if (table[s].bottom) continue;
    for (size_t i = 0; i < pk.bools.size(); ++i) ((s >> i) & 1u ? can1 : can0)[i] = true;
    all = join_leaf(all, table[s]);
  }
  if (all.bottom) return AbstractEnv::make_bottom();
  AbstractEnv out = env;
  for (size_t i = 0; i < pk.bools.size() && !out.bottom; ++i)
    out = refine_cell(out, pk.bools[i], Value::bool_range(can0[i], can1[i]));
  for (size_t j = 0; j < pk.nums.size() && !out.bottom; ++j) out = refine_cell(out, pk.nums[j], all.nums[j]);
  return out;
}

AbstractEnv Engine::assign_trees(const AbstractEnv& before, AbstractEnv env, int cell, const ExprPtr& rhs) {
  for (auto [k, pos] : cell_trees_[cell]) {
    const DecisionTree* t = before.trees.find(k);
    if (!t) continue;
    const TreePackInfo& pk = trees_[k];
    int nb = static_cast<int>(pk.bools.size());
    auto table = t->to_table();
    std::vector<TreeLeaf> next(table.size());
    ++quiet_;
    for (uint32_t s = 0; s < table.size(); ++s) {
      if (table[s].bottom) continue;
      AbstractEnv ctx = leaf_env(before, k, s, table[s]);
      if (ctx.bottom) continue;
      if (pos < nb) {
        for (bool pol : {false, true}) {
          AbstractEnv g = guard(ctx, *rhs, pol);
          if (g.bottom) continue;
          uint32_t s2 = pol ? (s | (1u << pos)) : (s & ~(1u << pos));
          next[s2] = join_leaf(next[s2], leaf_of(g, k));
        }
      } else {
        Value v = eval(ctx, *rhs).meet(env.value(cell));
        if (v.is_bottom()) continue;
        TreeLeaf l = leaf_of(ctx, k);
        if (l.bottom) continue;
        l.nums[pos - nb] = v;
        next[s] = join_leaf(next[s], l);
      }
    }
    --quiet_;
    env.trees = env.trees.set(k, DecisionTree::from_table(nb, next));
    env = reduce_tree(env, k);
    if (env.bottom) return env;
  }
  return env;
}

AbstractEnv Engine::guard_octagons(const AbstractEnv& before, AbstractEnv env, const Expr& a, CmpOp op,
                                   const Expr& b) {
  (void)before;
  auto la = linear(env, a, ErrorModel::Absolute, true);
  auto lb = linear(env, b, ErrorModel::Absolute, true);
  if (!la || !lb) return env;
  bool integral = a.type == ScalarType::Int;
  FloatInterval one = integral ? FloatInterval(1.0, 1.0) : FloatInterval(0.0, 0.0);
  std::vector<LinearForm> forms;
  switch (op) {
    case CmpOp::Le: forms.push_back(la->sub(*lb)); break;
    case CmpOp::Lt: forms.push_back(la->sub(*lb).plus_constant(one)); break;
    case CmpOp::Ge: forms.push_back(lb->sub(*la)); break;
    case CmpOp::Gt: forms.push_back(lb->sub(*la).plus_constant(one)); break;
    case CmpOp::Eq:
      forms.push_back(la->sub(*lb));
      forms.push_back(lb->sub(*la));
      break;
    case CmpOp::Ne: return env;
  }
  for (const auto& f : forms) {
    std::set<int> packs;
    for (const auto& t : f.terms())
      for (auto [k, pos] : cell_octs_[t.cell]) packs.insert(k);
    for (int k : packs) {
      if (!has_units(k, f)) continue;
      const Octagon* o = env.octagons.find(k);
      if (!o) continue;
      Octagon g = o->closed().guard_le(oct_form(env, k, f));
      if (g.is_bottom()) {
        useful_.insert(octs_[k].id);
        return AbstractEnv::make_bottom();
      }
      env.octagons = env.octagons.set(k, g);
      env = reduce_octagon(env, k, true);
      if (env.bottom) return env;
    }
  }
  return env;
}

AbstractEnv Engine::guard_trees(AbstractEnv env, const Expr& e, bool pol) {
  if (env.bottom || trees_.empty()) return env;
  std::vector<int> vars;
  expr_vars(e, vars);
  std::set<int> packs;
  for (int v : vars)
    for (int c : layout_.var_cells(v))
      for (auto [k, pos] : cell_trees_[c]) packs.insert(k);
  for (int k : packs) {
    const DecisionTree* t = env.trees.find(k);
    if (!t) continue;
    auto table = t->to_table();
    ++quiet_;
    for (uint32_t s = 0; s < table.size(); ++s) {
      if (table[s].bottom) continue;
      AbstractEnv ctx = leaf_env(env, k, s, table[s]);
      table[s] = ctx.bottom ? TreeLeaf::unreachable() : leaf_of(guard(ctx, e, pol), k);
    }
    --quiet_;
    env.trees = env.trees.set(k, DecisionTree::from_table(t->bools(), table));
    env = reduce_tree(env, k);
    if (env.bottom) return env;
  }
  return env;
}

}  // namespace miniastree
