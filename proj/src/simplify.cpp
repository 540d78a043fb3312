#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>

#include "miniastree/frontend.hpp"
#include "miniastree/semantics.hpp"

namespace miniastree {

namespace {

Scalar literal_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::FloatLit: return Scalar::of_float(e.fval);
    case ExprKind::BoolLit: return Scalar::of_bool(e.ival != 0);
    default: return Scalar::of_int(e.ival);
  }
}

ExprPtr literal_expr(const Scalar& v, const Expr& like) {
  auto e = std::make_shared<Expr>();
  e->pt = like.pt;
  e->type = v.type;
  switch (v.type) {
    case ScalarType::Float:
      e->kind = ExprKind::FloatLit;
      e->fval = v.f;
      break;
    case ScalarType::Bool:
      e->kind = ExprKind::BoolLit;
      e->ival = v.i;
      break;
    case ScalarType::Int:
      e->kind = ExprKind::IntLit;
      e->ival = v.i;
      break;
  }
  return e;
}

class Folder {
 public:
  explicit Folder(Program& p) : p_(p) {
    for (const auto& d : p.fold_alarms) seen_.insert(d.pt.id);
  }

  ExprPtr expr(const ExprPtr& e) {
    if (!e) return e;
    ExprPtr a = expr(e->a), b = expr(e->b);
    ExprPtr cur = e;
    if (a != e->a || b != e->b) {
      auto c = std::make_shared<Expr>(*e);
      c->a = a;
      c->b = b;
      cur = c;
    }
    std::optional<Outcome> out;
    switch (cur->kind) {
      case ExprKind::Unary:
        if (a->is_literal()) out = eval_unary(cur->uop, literal_value(*a));
        break;
      case ExprKind::Binary:
        if (a->is_literal() && b->is_literal()) out = eval_binary(cur->bop, literal_value(*a), literal_value(*b));
        break;
      case ExprKind::Cast:
        if (a->is_literal()) out = eval_cast(cur->type, literal_value(*a));
        break;
      default: break;
    }
    if (!out) return cur;
    if (out->fault) {
      if (seen_.insert(cur->pt.id).second) p_.fold_alarms.push_back({cur->pt, *out->fault, print_expr(p_, cur)});
      return cur;
    }
    return literal_expr(out->value, *cur);
  }

  StmtPtr stmt(const StmtPtr& s) {
    if (!s) return s;
    auto c = std::make_shared<Stmt>(*s);
    c->lhs = expr(s->lhs);
    c->expr = expr(s->expr);
    for (auto& st : c->body) st = stmt(st);
    c->then_s = stmt(s->then_s);
    c->else_s = stmt(s->else_s);
    for (auto& a : c->args) a = expr(a);
    return c;
  }

 private:
  Program& p_;
  std::set<int> seen_;
};

bool is_bool_lit(const ExprPtr& e, bool value) {
  return e && e->kind == ExprKind::BoolLit && (e->ival != 0) == value;
}

StmtPtr empty_block(const ProgramPoint& pt) {
  auto b = std::make_shared<Stmt>();
  b->kind = StmtKind::Block;
  b->pt = pt;
  return b;
}

// Drops branches whose condition folded to a constant.
StmtPtr drop_dead(const StmtPtr& s) {
  if (!s) return s;
  if (s->kind == StmtKind::If && is_bool_lit(s->expr, true)) return drop_dead(s->then_s);
  if (s->kind == StmtKind::If && is_bool_lit(s->expr, false))
    return s->else_s ? drop_dead(s->else_s) : empty_block(s->pt);
  if (s->kind == StmtKind::While && is_bool_lit(s->expr, false)) return empty_block(s->pt);
  auto c = std::make_shared<Stmt>(*s);
  for (auto& st : c->body) st = drop_dead(st);
  c->then_s = drop_dead(s->then_s);
  c->else_s = drop_dead(s->else_s);
  return c;
}

void stmt_uses(const StmtPtr& s, std::set<int>& vars, std::set<int>& calls) {
  if (!s) return;
  std::vector<int> v;
  collect_vars(s->lhs, v);
  collect_vars(s->expr, v);
  for (const auto& a : s->args) collect_vars(a, v);
  vars.insert(v.begin(), v.end());
  if (s->kind == StmtKind::Call) calls.insert(s->callee);
  for (const auto& st : s->body) stmt_uses(st, vars, calls);
  stmt_uses(s->then_s, vars, calls);
  stmt_uses(s->else_s, vars, calls);
}

std::string float_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string type_text(ScalarType t) { return scalar_type_name(t); }

void print_stmt(const Program& p, const StmtPtr& s, int indent, std::string& out);

void print_block_body(const Program& p, const StmtPtr& b, int indent, std::string& out) {
  out += "{\n";
  for (const auto& st : b->body) print_stmt(p, st, indent + 1, out);
  out += std::string(indent * 2, ' ') + "}";
}

void print_stmt(const Program& p, const StmtPtr& s, int indent, std::string& out) {
  std::string pad(indent * 2, ' ');
  switch (s->kind) {
    case StmtKind::Assign:
      out += pad + print_expr(p, s->lhs) + " = " + print_expr(p, s->expr) + ";\n";
      break;
    case StmtKind::Call: {
      out += pad;
      if (s->lhs) out += print_expr(p, s->lhs) + " = ";
      out += p.funs[s->callee].name + "(";
      for (size_t i = 0; i < s->args.size(); ++i) out += (i ? ", " : "") + print_expr(p, s->args[i]);
      out += ");\n";
      break;
    }
    case StmtKind::Return:
      out += pad + "return" + (s->expr ? " " + print_expr(p, s->expr) : "") + ";\n";
      break;
    case StmtKind::WaitTick: out += pad + "wait_tick;\n"; break;
    case StmtKind::Block:
      out += pad;
      print_block_body(p, s, indent, out);
      out += "\n";
      break;
    case StmtKind::If:
      out += pad + "if (" + print_expr(p, s->expr) + ") ";
      print_block_body(p, s->then_s, indent, out);
      if (s->else_s) {
        out += " else ";
        print_block_body(p, s->else_s, indent, out);
      }
      out += "\n";
      break;
    case StmtKind::While:
      out += pad + "while (" + print_expr(p, s->expr) + ") ";
      print_block_body(p, s->then_s, indent, out);
      out += "\n";
      break;
  }
}

std::string decl_text(const VarDecl& d) {
  if (d.is_volatile) {
    std::string s = "volatile " + type_text(d.ty.scalar) + " " + d.name;
    const Value& r = d.volatile_range;
    if (d.ty.scalar == ScalarType::Float) {
      s += " range [" + float_text(r.as_float().lo()) + ", " + float_text(r.as_float().hi()) + "]";
    } else if (!(d.ty.scalar == ScalarType::Bool && r.as_int() == IntInterval(0, 1))) {
      s += " range [" + std::to_string(r.as_int().lo()) + ", " + std::to_string(r.as_int().hi()) + "]";
    }
    return s + ";";
  }
  std::string prefix = d.storage == Storage::Static ? "static " : "";
  switch (d.ty.kind) {
    case TypeDesc::Scalar: return prefix + type_text(d.ty.scalar) + " " + d.name + ";";
    case TypeDesc::Array:
      return prefix + type_text(d.ty.scalar) + " " + d.name + "[" + std::to_string(d.ty.length) + "];";
    case TypeDesc::Record: {
      std::string s = prefix + "struct {";
      for (const auto& [fname, ft] : d.ty.fields) s += " " + fname + ": " + type_text(ft) + ";";
      return s + " } " + d.name + ";";
    }
  }
  return "";
}

bool same_expr(const Program& pa, const ExprPtr& a, const Program& pb, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->type != b->type) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      if (a->ival != b->ival) return false;
      break;
    case ExprKind::FloatLit:
      if (std::memcmp(&a->fval, &b->fval, sizeof(double)) != 0) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Index:
    case ExprKind::Field:
      if (pa.vars[a->var].qual != pb.vars[b->var].qual || a->field != b->field) return false;
      break;
    case ExprKind::Unary:
      if (a->uop != b->uop) return false;
      break;
    case ExprKind::Binary:
      if (a->bop != b->bop) return false;
      break;
    case ExprKind::Cast: break;
  }
  return same_expr(pa, a->a, pb, b->a) && same_expr(pa, a->b, pb, b->b);
}

bool same_stmt(const Program& pa, const StmtPtr& a, const Program& pb, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->body.size() != b->body.size() || a->args.size() != b->args.size()) return false;
  if (a->kind == StmtKind::Call && pa.funs[a->callee].name != pb.funs[b->callee].name) return false;
  if (!same_expr(pa, a->lhs, pb, b->lhs) || !same_expr(pa, a->expr, pb, b->expr)) return false;
  for (size_t i = 0; i < a->body.size(); ++i)
    if (!same_stmt(pa, a->body[i], pb, b->body[i])) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!same_expr(pa, a->args[i], pb, b->args[i])) return false;
  return same_stmt(pa, a->then_s, pb, b->then_s) && same_stmt(pa, a->else_s, pb, b->else_s);
}

bool same_decl(const VarDecl& a, const VarDecl& b) {
  return decl_text(a) == decl_text(b) && a.qual == b.qual && a.storage == b.storage;
}

}  // namespace

Program const_fold(const Program& p) {
  Program out = p;
  Folder f(out);
  for (auto& fn : out.funs)
    if (fn.body) fn.body = f.stmt(fn.body);
  return out;
}

Program prune_unused_globals(const Program& p) {
  Program out = p;
  for (auto& fn : out.funs)
    if (fn.body) fn.body = drop_dead(fn.body);
  std::set<int> used, reached{out.entry};
  std::vector<int> work{out.entry};
  while (!work.empty()) {
    int f = work.back();
    work.pop_back();
    std::set<int> calls;
    stmt_uses(out.funs[f].body, used, calls);
    for (int c : calls)
      if (reached.insert(c).second) work.push_back(c);
  }
  for (auto& fn : out.funs) fn.pruned = !reached.count(fn.id);
  std::vector<int> kept;
  for (int g : out.globals) {
    if (used.count(g)) {
      kept.push_back(g);
      continue;
    }
    out.vars[g].pruned = true;
    if (out.vars[g].is_volatile) out.pruned_volatiles.push_back(out.vars[g].name);
  }
  out.globals = kept;
  for (auto& fn : out.funs) {
    if (!fn.pruned) continue;
    for (int v : fn.params) out.vars[v].pruned = true;
    for (int v : fn.locals) out.vars[v].pruned = true;
    if (fn.ret_var >= 0) out.vars[fn.ret_var].pruned = true;
  }
  return out;
}

std::string print_expr(const Program& p, const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::IntLit: return std::to_string(e->ival);
    case ExprKind::BoolLit: return e->ival ? "true" : "false";
    case ExprKind::FloatLit: return float_text(e->fval);
    case ExprKind::Var: return p.vars[e->var].name;
    case ExprKind::Index: return p.vars[e->var].name + "[" + print_expr(p, e->a) + "]";
    case ExprKind::Field: return p.vars[e->var].name + "." + p.vars[e->var].ty.fields[e->field].first;
    case ExprKind::Unary:
      return std::string("(") + (e->uop == UnOp::Neg ? "-" : "!") + print_expr(p, e->a) + ")";
    case ExprKind::Binary:
      return "(" + print_expr(p, e->a) + " " + binop_text(e->bop) + " " + print_expr(p, e->b) + ")";
    case ExprKind::Cast: return "((" + type_text(e->type) + ")" + print_expr(p, e->a) + ")";
  }
  return "?";
}

std::string print_program(const Program& p) {
  std::string out;
  for (int g : p.globals) out += decl_text(p.vars[g]) + "\n";
  for (const auto& fn : p.funs) {
    if (fn.pruned) continue;
    out += (fn.ret ? type_text(*fn.ret) : std::string("void")) + " " + fn.name + "(";
    for (size_t i = 0; i < fn.params.size(); ++i) {
      const VarDecl& d = p.vars[fn.params[i]];
      out += (i ? ", " : "") + type_text(d.ty.scalar) + " " + d.name;
    }
    out += ") {\n";
    for (int l : fn.locals) out += "  " + decl_text(p.vars[l]) + "\n";
    for (const auto& st : fn.body->body) print_stmt(p, st, 1, out);
    out += "}\n";
  }
  return out;
}

bool same_ast(const Program& a, const Program& b) {
  if (a.globals.size() != b.globals.size()) return false;
  for (size_t i = 0; i < a.globals.size(); ++i)
    if (!same_decl(a.vars[a.globals[i]], b.vars[b.globals[i]])) return false;
  std::vector<const FunDef*> fa, fb;
  for (const auto& f : a.funs)
    if (!f.pruned) fa.push_back(&f);
  for (const auto& f : b.funs)
    if (!f.pruned) fb.push_back(&f);
  if (fa.size() != fb.size()) return false;
  for (size_t i = 0; i < fa.size(); ++i) {
    const FunDef& x = *fa[i];
    const FunDef& y = *fb[i];
    if (x.name != y.name || x.ret != y.ret || x.params.size() != y.params.size() ||
        x.locals.size() != y.locals.size())
      return false;
    for (size_t k = 0; k < x.params.size(); ++k)
      if (!same_decl(a.vars[x.params[k]], b.vars[y.params[k]])) return false;
    for (size_t k = 0; k < x.locals.size(); ++k)
      if (!same_decl(a.vars[x.locals[k]], b.vars[y.locals[k]])) return false;
    if (!same_stmt(a, x.body, b, y.body)) return false;
  }
  return true;
}

}  // namespace miniastree
