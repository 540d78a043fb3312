#include <algorithm>

#include "engine.hpp"

namespace miniastree {

namespace {

class EnvContext : public LinearContext {
 public:
  EnvContext(Engine& eng, const AbstractEnv& env) : eng_(eng), env_(env) {}
  Value value_of(const Expr& e) override {
    ++eng_.quiet_;
    Value v = eng_.eval(env_, e);
    --eng_.quiet_;
    return v;
  }
  int cell_of(const Expr& e) override { return eng_.cell_of(env_, e); }

 private:
  Engine& eng_;
  const AbstractEnv& env_;
};

bool is_bool_op(const Expr& e) {
  if (e.kind == ExprKind::Unary) return e.uop == UnOp::Not;
  if (e.kind != ExprKind::Binary) return false;
  return is_comparison(e.bop) || e.bop == BinOp::And || e.bop == BinOp::Or;
}

}  // namespace

void Engine::alarm(const Expr& e, AlarmKind k, const std::string& witness) {
  if (!checking_ || quiet_ > 0) return;
  auto key = std::make_pair(e.pt.id, static_cast<int>(k));
  if (alarms_.count(key)) return;
  alarms_[key] = Alarm{e.pt, k, print_expr(p_, std::make_shared<const Expr>(e)), witness};
}

void Engine::report(const Expr& e, const ErrorFlags& f, const std::string& witness) {
  seen_ |= f;
  if (f.overflow) alarm(e, AlarmKind::Overflow, witness);
  if (f.div_zero) alarm(e, AlarmKind::DivZero, witness);
  if (f.invalid_shift) alarm(e, AlarmKind::Shift, witness);
  if (f.nan) alarm(e, AlarmKind::Nan, witness);
  if (f.array_bounds) alarm(e, AlarmKind::ArrayBounds, witness);
}

int Engine::cell_of(const AbstractEnv& env, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var:
      return p_.vars[e.var].is_volatile ? -1 : layout_.scalar(e.var);
    case ExprKind::Field:
      return layout_.field(e.var, e.field);
    case ExprKind::Index: {
      if (layout_.is_shrunk(e.var)) return -1;
      ++quiet_;
      Value i = eval(env, *e.a);
      --quiet_;
      if (!i.as_int().is_singleton()) return -1;
      return layout_.element(e.var, i.as_int().lo());
    }
    default:
      return -1;
  }
}

Value Engine::eval(const AbstractEnv& env, const Expr& e) {
  if (env.bottom) return Value::bottom(e.type);
  switch (e.kind) {
    case ExprKind::IntLit:
      return Value::of_int(e.ival);
    case ExprKind::BoolLit:
      return Value::of_bool(e.ival != 0);
    case ExprKind::FloatLit:
      return Value::of_float(e.fval);
    case ExprKind::Var: {
      const VarDecl& d = p_.vars[e.var];
      if (d.is_volatile) return d.volatile_range;
      int c = layout_.scalar(e.var);
      return c < 0 ? Value::top(e.type) : env.value(c);
    }
    case ExprKind::Field: {
      int c = layout_.field(e.var, e.field);
      return c < 0 ? Value::top(e.type) : env.value(c);
    }
    case ExprKind::Index: {
      Value i = eval(env, *e.a);
      if (i.is_bottom()) return Value::bottom(e.type);
      int64_t len = layout_.length(e.var);
      IntInterval in = i.as_int().meet(IntInterval(0, len - 1));
      if (!i.as_int().leq(in)) {
        ErrorFlags f;
        f.array_bounds = true;
        report(e, f, i.to_string());
      }
      if (in.is_bottom()) return Value::bottom(e.type);
      if (layout_.is_shrunk(e.var)) return env.value(layout_.element(e.var, 0));
      Value v = Value::bottom(e.type);
      for (int64_t k = in.lo(); k <= in.hi(); ++k) v = v.join(env.value(layout_.element(e.var, k)));
      return v;
    }
    case ExprKind::Unary:
      if (e.uop == UnOp::Neg) {
        Value a = eval(env, *e.a);
        if (a.is_bottom()) return Value::bottom(e.type);
        ArithResult r = arith(ArithOp::Neg, a);
        report(e, r.flags, a.to_string());
        return r.value;
      }
      break;
    case ExprKind::Binary:
      if (is_arith(e.bop)) {
        Value a = eval(env, *e.a);
        Value b = eval(env, *e.b);
        if (a.is_bottom() || b.is_bottom()) return Value::bottom(e.type);
        ArithResult r = arith(to_arith(e.bop), a, b);
        report(e, r.flags, a.to_string() + " " + binop_text(e.bop) + " " + b.to_string());
        return r.value;
      }
      break;
    case ExprKind::Cast: {
      Value a = eval(env, *e.a);
      if (a.is_bottom()) return Value::bottom(e.type);
      if (e.type == a.type()) return a;
      if (e.type == ScalarType::Float) {
        ArithResult r = arith(ArithOp::ToFloat, a);
        report(e, r.flags, a.to_string());
        return r.value;
      }
      if (a.is_float()) {
        ArithResult r = arith(ArithOp::ToInt, a);
        report(e, r.flags, a.to_string());
        return r.value.type() == e.type ? r.value : Value(e.type, r.value.as_int());
      }
      return Value(e.type, a.as_int());
    }
  }
  // Boolean operators: the value follows from which outcomes are feasible.
  bool t = !guard(env, e, true).bottom;
  bool f = !guard(env, e, false).bottom;
  return Value::bool_range(f, t);
}

AbstractEnv Engine::guard(const AbstractEnv& env, const Expr& e, bool pol) {
  if (env.bottom) return env;
  switch (e.kind) {
    case ExprKind::BoolLit:
      return (e.ival != 0) == pol ? env : AbstractEnv::make_bottom();
    case ExprKind::Unary:
      if (e.uop == UnOp::Not) return guard(env, *e.a, !pol);
      break;
    case ExprKind::Binary:
      if (e.bop == BinOp::And) {
        AbstractEnv a = guard(env, *e.a, true);
        if (pol) return guard(a, *e.b, true);
        return join(guard(env, *e.a, false), guard(a, *e.b, false));
      }
      if (e.bop == BinOp::Or) {
        AbstractEnv a = guard(env, *e.a, false);
        if (!pol) return guard(a, *e.b, false);
        return join(guard(env, *e.a, true), guard(a, *e.b, true));
      }
      if (is_comparison(e.bop)) return guard_atom(env, e, pol);
      break;
    default:
      break;
  }
  Value v = eval(env, e);
  if (v.is_bottom() || !(pol ? v.may_be_true() : v.may_be_false())) return AbstractEnv::make_bottom();
  AbstractEnv out = env;
  int c = cell_of(env, e);
  if (c >= 0) out = refine_cell(out, c, Value::of_bool(pol));
  if (!is_bool_op(e)) out = guard_trees(out, e, pol);
  return out;
}

AbstractEnv Engine::guard_atom(const AbstractEnv& env, const Expr& e, bool pol) {
  CmpOp op = pol ? to_cmp(e.bop) : negate(to_cmp(e.bop));
  Value a = eval(env, *e.a);
  Value b = eval(env, *e.b);
  if (a.is_bottom() || b.is_bottom()) return AbstractEnv::make_bottom();
  auto r = guard_cmp(op, a, b);
  if (!r) return AbstractEnv::make_bottom();
  AbstractEnv out = env;
  int ca = cell_of(env, *e.a), cb = cell_of(env, *e.b);
  if (ca >= 0) out = refine_cell(out, ca, r->first);
  if (cb >= 0) out = refine_cell(out, cb, r->second);
  if (out.bottom) return out;
  if (!octs_.empty() && e.a->type != ScalarType::Bool) out = guard_octagons(env, out, *e.a, op, *e.b);
  if (!trees_.empty()) out = guard_trees(out, e, pol);
  return out;
}

std::optional<LinearForm> Engine::linear(const AbstractEnv& env, const Expr& e, ErrorModel m, bool round_outer) {
  if (!opt_.linearize) return std::nullopt;
  EnvContext ctx(*this, env);
  LinearizeOptions o;
  o.model = m;
  o.round_outer = round_outer;
  return linearize(e, ctx, o);
}

ExprPtr Engine::var_expr(int var) {
  auto it = var_exprs_.find(var);
  if (it != var_exprs_.end()) return it->second;
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->var = var;
  e->type = p_.vars[var].ty.scalar;
  e->pt = p_.vars[var].pt;
  var_exprs_[var] = e;
  return e;
}

ExprPtr Engine::zero_expr(ScalarType t) const {
  auto e = std::make_shared<Expr>();
  e->type = t;
  e->kind = t == ScalarType::Float ? ExprKind::FloatLit : t == ScalarType::Bool ? ExprKind::BoolLit : ExprKind::IntLit;
  return e;
}

}  // namespace miniastree
