#include "miniastree/concrete.hpp"

#include <random>

namespace miniastree {

namespace {

struct Halt {};

Scalar zero_scalar(ScalarType t) {
  if (t == ScalarType::Float) return Scalar::of_float(0.0);
  if (t == ScalarType::Bool) return Scalar::of_bool(false);
  return Scalar::of_int(0);
}

std::vector<Scalar> fresh_storage(const VarDecl& d) {
  switch (d.ty.kind) {
    case TypeDesc::Scalar:
      return {zero_scalar(d.ty.scalar)};
    case TypeDesc::Array:
      return std::vector<Scalar>(static_cast<size_t>(d.ty.length), zero_scalar(d.ty.scalar));
    case TypeDesc::Record: {
      std::vector<Scalar> out;
      for (const auto& f : d.ty.fields) out.push_back(zero_scalar(f.second));
      return out;
    }
  }
  return {};
}

class Interp {
 public:
  Interp(const Program& p, const RunOptions& o, const Observer& obs) : p_(p), o_(o), obs_(obs), rng_(o.seed) {
    st_.vars.resize(p.vars.size());
    for (const auto& d : p.vars)
      if (!d.pruned && !d.is_volatile) st_.vars[d.id] = fresh_storage(d);
  }

  RunResult run() {
    try {
      const FunDef& f = p_.funs[p_.entry];
      fun_stack_.push_back(f.id);
      exec(*f.body);
    } catch (const Halt&) {
    }
    res_.final_state = st_;
    res_.ticks = st_.clock;
    return res_;
  }

 private:
  enum class Flow { Next, Ret };

  const Program& p_;
  RunOptions o_;
  const Observer& obs_;
  std::mt19937_64 rng_;
  ConcreteState st_;
  RunResult res_;
  std::vector<int> fun_stack_;

  [[noreturn]] void fault(const Expr& e, AlarmKind k) {
    res_.fault = Fault{e.pt, k};
    throw Halt{};
  }

  Scalar checked(const Expr& e, const Outcome& o) {
    if (o.fault) fault(e, *o.fault);
    return o.value;
  }

  Scalar input(const VarDecl& d) {
    const Value& r = d.volatile_range;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    bool edge = coin(rng_) < o_.boundary_bias;
    bool hi_edge = coin(rng_) < 0.5;
    if (r.is_float()) {
      double lo = r.as_float().lo(), hi = r.as_float().hi();
      if (edge) return Scalar::of_float(hi_edge ? hi : lo);
      return Scalar::of_float(std::uniform_real_distribution<double>(lo, hi)(rng_));
    }
    int64_t lo = r.as_int().lo(), hi = r.as_int().hi();
    int64_t v = edge ? (hi_edge ? hi : lo) : std::uniform_int_distribution<int64_t>(lo, hi)(rng_);
    return d.ty.scalar == ScalarType::Bool ? Scalar::of_bool(v != 0) : Scalar::of_int(v);
  }

  Scalar& slot(const Expr& e) {
    auto& store = st_.vars[e.var];
    switch (e.kind) {
      case ExprKind::Index: {
        int64_t i = eval(*e.a).i;
        if (i < 0 || i >= static_cast<int64_t>(store.size())) fault(e, AlarmKind::ArrayBounds);
        return store[static_cast<size_t>(i)];
      }
      case ExprKind::Field:
        return store[static_cast<size_t>(e.field)];
      default:
        return store[0];
    }
  }

  Scalar eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
        return Scalar::of_int(e.ival);
      case ExprKind::BoolLit:
        return Scalar::of_bool(e.ival != 0);
      case ExprKind::FloatLit:
        return Scalar::of_float(e.fval);
      case ExprKind::Var:
        if (p_.vars[e.var].is_volatile) return input(p_.vars[e.var]);
        return slot(e);
      case ExprKind::Index:
      case ExprKind::Field:
        return slot(e);
      case ExprKind::Unary:
        if (e.uop == UnOp::Not) return Scalar::of_bool(!eval(*e.a).truth());
        return checked(e, eval_unary(e.uop, eval(*e.a)));
      case ExprKind::Binary: {
        Scalar a = eval(*e.a);
        if (e.bop == BinOp::And && !a.truth()) return Scalar::of_bool(false);
        if (e.bop == BinOp::Or && a.truth()) return Scalar::of_bool(true);
        Scalar b = eval(*e.b);
        return checked(e, eval_binary(e.bop, a, b));
      }
      case ExprKind::Cast: {
        Scalar a = eval(*e.a);
        if (a.type == e.type) return a;
        return checked(e, eval_cast(e.type, a));
      }
    }
    return Scalar{};
  }

  void step(const Stmt& s) {
    if (obs_) obs_(s, st_);
    if (++res_.steps > o_.max_steps) {
      res_.out_of_steps = true;
      throw Halt{};
    }
  }

  Flow exec(const Stmt& s) {
    if (s.kind != StmtKind::Block) step(s);
    switch (s.kind) {
      case StmtKind::Assign: {
        Scalar v = eval(*s.expr);
        slot(*s.lhs) = v;
        return Flow::Next;
      }
      case StmtKind::If:
        if (eval(*s.expr).truth()) return exec(*s.then_s);
        return s.else_s ? exec(*s.else_s) : Flow::Next;
      case StmtKind::While:
        while (eval(*s.expr).truth())
          if (exec(*s.then_s) == Flow::Ret) return Flow::Ret;
        return Flow::Next;
      case StmtKind::Block:
        for (const auto& st : s.body)
          if (exec(*st) == Flow::Ret) return Flow::Ret;
        return Flow::Next;
      case StmtKind::Call:
        call(s);
        return Flow::Next;
      case StmtKind::Return: {
        const FunDef& f = p_.funs[fun_stack_.back()];
        if (s.expr && f.ret_var >= 0) st_.vars[f.ret_var][0] = eval(*s.expr);
        return Flow::Ret;
      }
      case StmtKind::WaitTick:
        ++st_.clock;
        if (st_.clock >= o_.max_ticks) throw Halt{};
        return Flow::Next;
    }
    return Flow::Next;
  }

  void call(const Stmt& s) {
    const FunDef& f = p_.funs[s.callee];
    for (size_t i = 0; i < f.params.size() && i < s.args.size(); ++i) {
      Scalar v = eval(*s.args[i]);
      st_.vars[f.params[i]][0] = v;
    }
    for (int v : f.locals)
      if (p_.vars[v].storage == Storage::Local) st_.vars[v] = fresh_storage(p_.vars[v]);
    if (f.ret_var >= 0) st_.vars[f.ret_var] = fresh_storage(p_.vars[f.ret_var]);
    fun_stack_.push_back(f.id);
    exec(*f.body);
    fun_stack_.pop_back();
    if (s.lhs && f.ret_var >= 0) {
      Scalar v = st_.vars[f.ret_var][0];
      slot(*s.lhs) = v;
    }
  }
};

bool contains(const Value& v, const Scalar& x) {
  if (v.is_float()) return v.as_float().contains(x.f);
  return v.as_int().contains(x.i);
}

}  // namespace

RunResult run_concrete(const Program& p, const RunOptions& opt, const Observer& observe) {
  return Interp(p, opt, observe).run();
}

bool state_in(const Layout& l, const AbstractEnv& env, const ConcreteState& s, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (env.bottom) return fail("unreachable point reached");
  if (!env.clock.contains(s.clock)) return fail("clock " + std::to_string(s.clock));
  for (const Cell& c : l.cells()) {
    const CellValue& cv = env.cell(c.id);
    const auto& store = s.vars[c.var];
    std::vector<Scalar> xs;
    switch (c.kind) {
      case CellKind::Atomic: xs = {store[0]}; break;
      case CellKind::Element: xs = {store[static_cast<size_t>(c.index)]}; break;
      case CellKind::Field: xs = {store[static_cast<size_t>(c.field)]}; break;
      case CellKind::Shrunk: xs = store; break;
    }
    for (const Scalar& x : xs) {
      if (!contains(cv.v, x)) {
        std::string val = x.type == ScalarType::Float ? std::to_string(x.f) : std::to_string(x.i);
        return fail(c.name + " = " + val + " not in " + cv.v.to_string());
      }
      if (cv.clocked && (!cv.clocked->minus.contains(x.i - s.clock) || !cv.clocked->plus.contains(x.i + s.clock)))
        return fail(c.name + " clock offsets " + cv.clocked->to_string());
    }
  }
  return true;
}

}  // namespace miniastree
