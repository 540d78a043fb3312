#include <algorithm>

#include "engine.hpp"

namespace miniastree {

Engine::Engine(const Program& p, const AnalysisOptions& opt, const PackingResult& packs)
    : p_(p), opt_(opt), layout_(p, opt.shrink_above, opt.clock) {
  lat_.thresholds = opt.thresholds();
  size_t n = layout_.size();
  cell_octs_.assign(n, {});
  cell_ells_.assign(n, {});
  cell_trees_.assign(n, {});
  auto scalar_cells = [&](const std::vector<int>& vars, std::vector<int>& out) {
    for (int v : vars) {
      int c = layout_.scalar(v);
      if (c < 0) return false;
      out.push_back(c);
    }
    return true;
  };
  if (opt.octagons)
    for (const Pack& pk : packs.octagons) {
      OctPackInfo o{pk.id, {}};
      for (int v : pk.vars)
        if (int c = layout_.scalar(v); c >= 0 && layout_.cell(c).type != ScalarType::Bool) o.cells.push_back(c);
      if (o.cells.size() < 2) continue;
      int k = static_cast<int>(octs_.size());
      for (size_t i = 0; i < o.cells.size(); ++i) cell_octs_[o.cells[i]].emplace_back(k, static_cast<int>(i));
      octs_.push_back(std::move(o));
    }
  if (opt.ellipsoids)
    for (const Pack& pk : packs.filters) {
      EllPackInfo e{pk.id, {}, pk.params, pk.update_stmt, pk.t_terms};
      if (!scalar_cells(pk.vars, e.cells) || e.cells.size() != 3) continue;
      int k = static_cast<int>(ells_.size());
      for (size_t i = 0; i < 3; ++i) cell_ells_[e.cells[i]].emplace_back(k, static_cast<int>(i));
      lat_.shape.ellipse_cells.push_back(e.cells);
      ells_.push_back(std::move(e));
    }
  if (opt.trees)
    for (const Pack& pk : packs.trees) {
      TreePackInfo t{pk.id, {}, {}};
      if (!scalar_cells(pk.bools, t.bools) || !scalar_cells(pk.nums, t.nums) || t.bools.empty()) continue;
      int k = static_cast<int>(trees_.size());
      for (size_t i = 0; i < t.bools.size(); ++i) cell_trees_[t.bools[i]].emplace_back(k, static_cast<int>(i));
      for (size_t j = 0; j < t.nums.size(); ++j)
        cell_trees_[t.nums[j]].emplace_back(k, static_cast<int>(t.bools.size() + j));
      trees_.push_back(std::move(t));
    }
  warnings_ = packs.warnings;
}

namespace {

Value zero_of(ScalarType t) {
  if (t == ScalarType::Float) return Value::of_float(0.0);
  if (t == ScalarType::Bool) return Value::of_bool(false);
  return Value::of_int(0);
}

}  // namespace

AbstractEnv Engine::initial_env() const {
  AbstractEnv env;
  std::vector<std::pair<int, CellValue>> cells;
  for (const Cell& c : layout_.cells()) {
    CellValue cv{zero_of(c.type), std::nullopt};
    if (c.clocked) cv.clocked = ClockedValue::from_value(IntInterval::singleton(0), env.clock);
    cells.emplace_back(c.id, cv);
  }
  env.cells = PMap<CellValue>::from_sorted(cells);
  std::vector<std::pair<int, Octagon>> octs;
  for (size_t k = 0; k < octs_.size(); ++k) {
    Octagon o(static_cast<int>(octs_[k].cells.size()));
    for (int i = 0; i < o.dim(); ++i) o = o.with_bounds(i, FloatInterval(0.0, 0.0));
    octs.emplace_back(static_cast<int>(k), o.closed());
  }
  env.octagons = PMap<Octagon>::from_sorted(octs);
  std::vector<std::pair<int, EllipsoidMap>> ells;
  for (size_t k = 0; k < ells_.size(); ++k) ells.emplace_back(static_cast<int>(k), EllipsoidMap(3, ells_[k].params));
  env.ellipses = PMap<EllipsoidMap>::from_sorted(ells);
  std::vector<std::pair<int, DecisionTree>> trees;
  for (size_t k = 0; k < trees_.size(); ++k) {
    int nb = static_cast<int>(trees_[k].bools.size());
    std::vector<TreeLeaf> table(size_t{1} << nb);
    std::vector<Value> nums;
    for (int c : trees_[k].nums) nums.push_back(zero_of(layout_.cell(c).type));
    table[0] = TreeLeaf::of(nums);
    trees.emplace_back(static_cast<int>(k), DecisionTree::from_table(nb, table));
  }
  env.trees = PMap<DecisionTree>::from_sorted(trees);
  return env;
}

AbstractEnv Engine::wait_tick(const AbstractEnv& env) const {
  if (env.bottom) return env;
  IntInterval c = env.clock.add(IntInterval::singleton(1)).meet(IntInterval(0, opt_.max_ticks - 1));
  if (c.is_bottom()) return AbstractEnv::make_bottom();
  AbstractEnv out = env;
  out.clock = c;
  bool empty = false;
  out.cells = env.cells.map([&](int, const CellValue& cv) {
    if (!cv.clocked) return cv;
    ClockedValue t = cv.clocked->tick().normalized(c);
    if (t.is_bottom()) {
      empty = true;
      return cv;
    }
    return CellValue{Value(cv.v.type(), t.v), t};
  });
  if (empty) return AbstractEnv::make_bottom();
  return out;
}

AbstractEnv Engine::exec(const Stmt& s, const AbstractEnv& env) {
  if (env.bottom) return env;
  if (checking_ && opt_.record_invariants && s.kind != StmtKind::Block) {
    auto it = invariants_.find(s.pt.id);
    if (it == invariants_.end()) invariants_.emplace(s.pt.id, env);
    else it->second = join(it->second, env);
  }
  switch (s.kind) {
    case StmtKind::Assign:
      return assign(env, *s.lhs, s.expr, s.pt.id);
    case StmtKind::If: {
      AbstractEnv t = exec(*s.then_s, guard(env, *s.expr, true));
      AbstractEnv f = guard(env, *s.expr, false);
      if (s.else_s) f = exec(*s.else_s, f);
      return join(t, f);
    }
    case StmtKind::While:
      return loop(s, env);
    case StmtKind::Block: {
      AbstractEnv e = env;
      for (const auto& st : s.body) e = exec(*st, e);
      return e;
    }
    case StmtKind::Call:
      return call(s, env);
    case StmtKind::Return: {
      AbstractEnv e = env;
      const FunDef& f = p_.funs[funs_.back()];
      if (s.expr && f.ret_var >= 0) e = assign(env, *var_expr(f.ret_var), s.expr);
      returns_.back() = join(returns_.back(), e);
      return AbstractEnv::make_bottom();
    }
    case StmtKind::WaitTick:
      return wait_tick(env);
  }
  return env;
}

Traces Engine::exec_traces(const Stmt& s, Traces in) {
  in.erase(std::remove_if(in.begin(), in.end(), [](const AbstractEnv& e) { return e.bottom; }), in.end());
  if (in.empty()) return in;
  if (s.kind == StmtKind::Block) {
    for (const auto& st : s.body) in = exec_traces(*st, std::move(in));
    return in;
  }
  Traces out;
  if (s.kind != StmtKind::If) {
    for (const auto& e : in) out.push_back(exec(s, e));
    return out;
  }
  if (checking_ && opt_.record_invariants) {
    AbstractEnv all = AbstractEnv::make_bottom();
    for (const auto& e : in) all = join(all, e);
    auto it = invariants_.find(s.pt.id);
    if (it == invariants_.end()) invariants_.emplace(s.pt.id, all);
    else it->second = join(it->second, all);
  }
  for (const auto& e : in) {
    for (auto& t : exec_traces(*s.then_s, {guard(e, *s.expr, true)})) out.push_back(std::move(t));
    Traces f{guard(e, *s.expr, false)};
    if (s.else_s) f = exec_traces(*s.else_s, std::move(f));
    for (auto& t : f) out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const AbstractEnv& e) { return e.bottom; }), out.end());
  if (static_cast<int>(out.size()) > opt_.partition_cap) {
    AbstractEnv all = AbstractEnv::make_bottom();
    for (const auto& e : out) all = join(all, e);
    out = {all};
  }
  return out;
}

AbstractEnv Engine::call(const Stmt& s, const AbstractEnv& env) {
  const FunDef& f = p_.funs[s.callee];
  AbstractEnv e = env;
  for (size_t i = 0; i < f.params.size() && i < s.args.size(); ++i) e = assign(e, *var_expr(f.params[i]), s.args[i]);
  std::vector<int> fresh;
  for (int v : f.locals)
    if (p_.vars[v].storage == Storage::Local) fresh.push_back(v);
  if (f.ret_var >= 0) fresh.push_back(f.ret_var);
  for (int v : fresh) {
    if (e.bottom) break;
    const VarDecl& d = p_.vars[v];
    if (d.ty.kind == TypeDesc::Scalar && layout_.scalar(v) >= 0) {
      e = assign(e, *var_expr(v), zero_expr(d.ty.scalar));
    } else {
      for (int c : layout_.var_cells(v)) e = set_cell(e, c, zero_of(layout_.cell(c).type));
    }
  }
  if (e.bottom) return e;
  returns_.push_back(AbstractEnv::make_bottom());
  funs_.push_back(f.id);
  AbstractEnv out;
  if (!partitioned_ && opt_.partition_fns.count(f.name)) {
    partitioned_ = true;
    out = AbstractEnv::make_bottom();
    for (const auto& t : exec_traces(*f.body, {e})) out = join(out, t);
    partitioned_ = false;
  } else {
    out = exec(*f.body, e);
  }
  out = join(out, returns_.back());
  returns_.pop_back();
  funs_.pop_back();
  if (s.lhs && f.ret_var >= 0) out = assign(out, *s.lhs, var_expr(f.ret_var));
  return out;
}

AbstractEnv Engine::loop(const Stmt& w, const AbstractEnv& env) {
  const Expr& c = *w.expr;
  const Stmt& body = *w.then_s;
  AbstractEnv exits = AbstractEnv::make_bottom();
  AbstractEnv e = env;
  for (int k = 0; k < opt_.unroll && !e.bottom; ++k) {
    exits = join(exits, guard(e, c, false));
    e = exec(body, guard(e, c, true));
  }
  if (e.bottom) return exits;

  bool was = checking_;
  checking_ = false;
  auto F = [&](const AbstractEnv& x) { return join(e, exec(body, guard(x, c, true))); };
  AbstractEnv x = e;
  std::vector<int> prev_unstable;
  std::set<int> deferred;
  for (int step = 1;; ++step) {
    if (step > opt_.max_iterations) {
      checking_ = was;
      throw AnalysisDiverged(p_.file_name(w.pt) + ":" + std::to_string(w.pt.line) + ":" + std::to_string(w.pt.col) +
                             ": loop did not stabilize within " + std::to_string(opt_.max_iterations) + " iterations");
    }
    ++iterations_;
    AbstractEnv y = F(x);
    if (env_leq(y, x)) break;
    std::vector<int> unstable = env_unstable_cells(x, y);
    bool use_join = step <= opt_.delay;
    if (!use_join && opt_.delay_exception) {
      std::set<int> now(unstable.begin(), unstable.end());
      for (int cell : prev_unstable)
        if (!now.count(cell) && deferred.insert(cell).second) use_join = true;
    }
    AbstractEnv yp = env_perturb(y, opt_.epsilon, unstable);
    x = use_join ? join(x, yp) : env_widen(x, yp, lat_);
    prev_unstable = std::move(unstable);
  }
  for (int k = 0; k < opt_.narrowing_steps; ++k) {
    ++iterations_;
    AbstractEnv n = env_narrow(x, F(x), lat_);
    if (env_equal(n, x) || !env_leq(F(n), n)) break;
    x = n;
  }
  checking_ = was;
  if (checking_) exec(body, guard(x, c, true));
  return join(exits, guard(x, c, false));
}

AnalysisResult Engine::run() {
  AnalysisResult r;
  const FunDef& main = p_.funs[p_.entry];
  returns_.push_back(AbstractEnv::make_bottom());
  funs_.push_back(main.id);
  checking_ = true;
  AbstractEnv env = initial_env();
  AbstractEnv out;
  if (opt_.partition_fns.count(main.name)) {
    partitioned_ = true;
    out = AbstractEnv::make_bottom();
    for (const auto& t : exec_traces(*main.body, {env})) out = join(out, t);
    partitioned_ = false;
  } else {
    out = exec(*main.body, env);
  }
  r.final_env = join(out, returns_.back());
  for (const auto& fa : p_.fold_alarms) {
    auto key = std::make_pair(fa.pt.id, static_cast<int>(fa.kind));
    if (!alarms_.count(key)) alarms_[key] = Alarm{fa.pt, fa.kind, fa.expr, "constant"};
  }
  for (auto& [k, a] : alarms_) r.alarms.push_back(a);
  std::sort(r.alarms.begin(), r.alarms.end(), [](const Alarm& a, const Alarm& b) {
    return std::tie(a.pt.file, a.pt.line, a.pt.col, a.pt.id, a.kind) <
           std::tie(b.pt.file, b.pt.line, b.pt.col, b.pt.id, b.kind);
  });
  r.invariants = std::move(invariants_);
  r.useful_packs = useful_;
  r.warnings = warnings_;
  r.stats.loop_iterations = iterations_;
  r.stats.octagon_packs = static_cast<int>(octs_.size());
  r.stats.ellipsoid_packs = static_cast<int>(ells_.size());
  r.stats.tree_packs = static_cast<int>(trees_.size());
  double total = 0;
  for (const auto& o : octs_) total += static_cast<double>(o.cells.size());
  r.stats.mean_octagon_size = octs_.empty() ? 0 : total / static_cast<double>(octs_.size());
  r.layout = layout_;
  for (const auto& o : octs_) r.octagon_packs.push_back({PackKind::Octagon, o.id, o.cells, 0});
  for (const auto& e : ells_) r.ellipsoid_packs.push_back({PackKind::Filter, e.id, e.cells, 0});
  for (const auto& t : trees_) {
    PackView v{PackKind::Tree, t.id, t.bools, static_cast<int>(t.bools.size())};
    v.cells.insert(v.cells.end(), t.nums.begin(), t.nums.end());
    r.tree_packs.push_back(std::move(v));
  }
  return r;
}

AnalysisResult analyze(const Program& p, const AnalysisOptions& opt, const PackingResult& packs) {
  Engine e(p, opt, packs);
  return e.run();
}

AnalysisResult analyze(const Program& p, const AnalysisOptions& opt) {
  PackingOptions po;
  po.tree_bool_cap = opt.tree_bool_cap;
  return analyze(p, opt, infer_packs(p, po));
}

int find_cell(const Program& p, const Layout& l, const std::string& qual) {
  for (const auto& d : p.vars)
    if (d.qual == qual && d.id < static_cast<int>(p.vars.size()) && !l.var_cells(d.id).empty())
      return l.var_cells(d.id)[0];
  return -1;
}

Value AnalysisResult::final_value(const Program& p, const std::string& qual) const {
  int c = find_cell(p, layout, qual);
  if (c < 0 || final_env.bottom) return Value::bottom(ScalarType::Float);
  return final_env.value(c);
}

Value AnalysisResult::value_at(int pt_id, int cell) const {
  auto it = invariants.find(pt_id);
  if (it == invariants.end() || it->second.bottom || cell < 0) return Value::bottom(ScalarType::Float);
  return it->second.value(cell);
}

}  // namespace miniastree
