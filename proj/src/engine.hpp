#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "miniastree/analyzer.hpp"
#include "miniastree/linear_form.hpp"

namespace miniastree {

struct OctPackInfo {
  std::string id;
  std::vector<int> cells;
};

struct EllPackInfo {
  std::string id;
  std::vector<int> cells;  // X, X', Y
  FilterParams params;
  int update_stmt = -1;
  std::vector<std::pair<int, ExprPtr>> t_terms;
};

struct TreePackInfo {
  std::string id;
  std::vector<int> bools, nums;
};

using Traces = std::vector<AbstractEnv>;

class Engine {
 public:
  Engine(const Program& p, const AnalysisOptions& opt, const PackingResult& packs);
  AnalysisResult run();

  // Expressions.
  Value eval(const AbstractEnv& env, const Expr& e);
  AbstractEnv guard(const AbstractEnv& env, const Expr& e, bool polarity);
  int cell_of(const AbstractEnv& env, const Expr& e);
  // Cells an lvalue may denote, and whether the update is strong.
  std::vector<int> targets(const AbstractEnv& env, const Expr& lhs, bool& strong);

  // Statements.
  AbstractEnv assign(const AbstractEnv& env, const Expr& lhs, const ExprPtr& rhs, int stmt_id = -1);
  AbstractEnv exec(const Stmt& s, const AbstractEnv& env);
  Traces exec_traces(const Stmt& s, Traces in);
  AbstractEnv loop(const Stmt& w, const AbstractEnv& env);
  AbstractEnv call(const Stmt& s, const AbstractEnv& env);
  AbstractEnv wait_tick(const AbstractEnv& env) const;

  AbstractEnv join(const AbstractEnv& a, const AbstractEnv& b) const { return env_join(a, b, lat_); }
  AbstractEnv initial_env() const;

  const Program& p_;
  AnalysisOptions opt_;
  Layout layout_;
  LatticeOptions lat_;
  std::vector<OctPackInfo> octs_;
  std::vector<EllPackInfo> ells_;
  std::vector<TreePackInfo> trees_;
  // cell -> (pack, position in pack)
  std::vector<std::vector<std::pair<int, int>>> cell_octs_, cell_ells_, cell_trees_;
  std::vector<std::string> warnings_;

  bool checking_ = false;
  int quiet_ = 0;  // > 0 suppresses alarms
  bool partitioned_ = false;
  std::map<std::pair<int, int>, Alarm> alarms_;
  std::set<std::string> useful_;
  std::map<int, AbstractEnv> invariants_;
  std::vector<AbstractEnv> returns_;
  std::vector<int> funs_;
  ErrorFlags seen_;  // every flag raised since the last reset, quiet or not
  int iterations_ = 0;

  void alarm(const Expr& e, AlarmKind k, const std::string& witness);
  void report(const Expr& e, const ErrorFlags& f, const std::string& witness);
  ExprPtr var_expr(int var);
  ExprPtr zero_expr(ScalarType t) const;

  // Cell writes and reductions.
  AbstractEnv set_cell(const AbstractEnv& env, int cell, const Value& v) const;
  AbstractEnv refine_cell(const AbstractEnv& env, int cell, const Value& v) const;
  AbstractEnv reduce_octagon(const AbstractEnv& env, int pack, bool mark);
  AbstractEnv reduce_ellipsoid(const AbstractEnv& env, int pack) const;
  AbstractEnv reduce_tree(const AbstractEnv& env, int pack) const;
  // Interval-only copy of env restricted to one leaf of a tree pack.
  AbstractEnv leaf_env(const AbstractEnv& env, int pack, uint32_t s, const TreeLeaf& leaf) const;
  TreeLeaf leaf_of(const AbstractEnv& env, int pack) const;

  std::optional<LinearForm> linear(const AbstractEnv& env, const Expr& e, ErrorModel m, bool round_outer);
  OctForm oct_form(const AbstractEnv& env, int pack, const LinearForm& f) const;
  bool has_units(int pack, const LinearForm& f) const;

  AbstractEnv assign_octagons(const AbstractEnv& before, AbstractEnv env, int cell, const Expr* rhs);
  AbstractEnv assign_ellipsoids(const AbstractEnv& before, AbstractEnv env, int cell, const Expr& rhs, int stmt_id);
  AbstractEnv assign_trees(const AbstractEnv& before, AbstractEnv env, int cell, const ExprPtr& rhs);
  AbstractEnv guard_atom(const AbstractEnv& env, const Expr& e, bool polarity);
  AbstractEnv guard_octagons(const AbstractEnv& before, AbstractEnv env, const Expr& a, CmpOp op, const Expr& b);
  AbstractEnv guard_trees(AbstractEnv env, const Expr& e, bool polarity);

 private:
  std::map<int, ExprPtr> var_exprs_;
};

}  // namespace miniastree
