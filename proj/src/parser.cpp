#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "miniastree/frontend.hpp"

namespace miniastree {

const char* alarm_kind_name(AlarmKind k) {
  switch (k) {
    case AlarmKind::Overflow: return "overflow";
    case AlarmKind::DivZero: return "div_zero";
    case AlarmKind::ArrayBounds: return "array_bounds";
    case AlarmKind::Shift: return "shift";
    case AlarmKind::Nan: return "nan";
  }
  return "?";
}

bool is_comparison(BinOp op) { return op >= BinOp::Lt && op <= BinOp::Ne; }
bool is_arith(BinOp op) { return op <= BinOp::Shr; }

CmpOp to_cmp(BinOp op) {
  switch (op) {
    case BinOp::Lt: return CmpOp::Lt;
    case BinOp::Le: return CmpOp::Le;
    case BinOp::Gt: return CmpOp::Gt;
    case BinOp::Ge: return CmpOp::Ge;
    case BinOp::Eq: return CmpOp::Eq;
    default: return CmpOp::Ne;
  }
}

ArithOp to_arith(BinOp op) {
  switch (op) {
    case BinOp::Add: return ArithOp::Add;
    case BinOp::Sub: return ArithOp::Sub;
    case BinOp::Mul: return ArithOp::Mul;
    case BinOp::Div: return ArithOp::Div;
    case BinOp::Mod: return ArithOp::Mod;
    case BinOp::Shl: return ArithOp::Shl;
    default: return ArithOp::Shr;
  }
}

const char* binop_text(BinOp op) {
  static const char* names[] = {"+", "-", "*", "/", "%", "<<", ">>", "<", "<=", ">", ">=", "==", "!=", "&&", "||"};
  return names[static_cast<int>(op)];
}

const std::string& Program::file_name(const ProgramPoint& p) const {
  static const std::string unknown = "<input>";
  if (p.file < 0 || p.file >= static_cast<int>(files.size())) return unknown;
  return files[p.file];
}

int Program::find_fun(const std::string& name) const {
  for (const auto& f : funs)
    if (f.name == name && !f.pruned) return f.id;
  return -1;
}

int Program::find_global(const std::string& name) const {
  for (int g : globals)
    if (vars[g].name == name) return g;
  return -1;
}

void collect_vars(const ExprPtr& e, std::vector<int>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Var || e->kind == ExprKind::Index || e->kind == ExprKind::Field)
    out.push_back(e->var);
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

namespace {

enum class Tok { Ident, Int, Float, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 0, col = 0;
};

std::vector<Token> lex(const std::string& src, const std::string& file) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* puncts[] = {"<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+", "-", "*", "/", "%",
                                 "<",  ">",  "=",  "!",  "(",  ")",  "{",  "}",  "[", "]", ";", ",", ".",
                                 ":",  "&",  "|"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l0 = line, c0 = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw ParseError(file, l0, c0, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      size_t j = i;
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        throw ParseError(file, line, col, "malformed number");
      t.kind = is_float ? Tok::Float : Tok::Int;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      size_t n = std::char_traits<char>::length(p);
      if (src.compare(i, n, p) == 0) {
        t.kind = Tok::Punct;
        t.text = p;
        advance(n);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(file, line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

bool is_type_kw(const std::string& s) { return s == "int" || s == "float" || s == "bool"; }

ScalarType type_of_kw(const std::string& s) {
  if (s == "float") return ScalarType::Float;
  if (s == "bool") return ScalarType::Bool;
  return ScalarType::Int;
}

const std::set<std::string> kReserved = {"int",  "float", "bool",   "void",  "if",     "else",
                                         "while", "return", "wait_tick", "volatile", "struct",
                                         "enum", "static", "true", "false", "range"};

// Top-level names shared by all units of a program.
struct ParseContext {
  std::map<std::string, int64_t> enum_consts;
  std::set<std::string> enum_types;
};

class Parser {
 public:
  Parser(Program& prog, ParseContext& ctx, int file_index, const std::string& file, const std::string& text)
      : prog_(prog), ctx_(ctx), file_index_(file_index), file_(file), toks_(lex(text, file)) {}

  void parse_unit() {
    while (peek().kind != Tok::End) parse_top();
  }

 private:
  Program& prog_;
  ParseContext& ctx_;
  int file_index_;
  std::string file_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int cur_fun_ = -1;
  std::map<std::string, int> locals_;

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(const char* p, size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == p;
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(file_, t.line, t.col, msg);
  }
  Token expect(const char* p) {
    if (!is(p)) fail(peek(), std::string("expected '") + p + "'" + found());
    return take();
  }
  std::string found() const {
    const Token& t = peek();
    if (t.kind == Tok::End) return " but found end of input";
    return " but found '" + t.text + "'";
  }
  Token expect_ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kReserved.count(t.text)) fail(t, "expected identifier" + found());
    return take();
  }
  ProgramPoint point(const Token& t) { return {file_index_, t.line, t.col, prog_.next_point++}; }

  // ---- declarations ----

  bool name_taken_globally(const std::string& n) const {
    if (prog_.find_global(n) >= 0 || prog_.find_fun(n) >= 0) return true;
    return ctx_.enum_consts.count(n) > 0;
  }

  int add_var(VarDecl d) {
    d.id = static_cast<int>(prog_.vars.size());
    prog_.vars.push_back(std::move(d));
    return prog_.vars.back().id;
  }

  void check_no_pointer() {
    if (is("*")) fail(peek(), "unsupported construct: pointers");
  }

  TypeDesc parse_struct_body() {
    TypeDesc ty;
    ty.kind = TypeDesc::Record;
    expect("{");
    std::set<std::string> seen;
    while (!is("}")) {
      Token fname = expect_ident();
      expect(":");
      Token t = take();
      if (!is_type_kw(t.text)) fail(t, "record fields must have scalar type");
      expect(";");
      if (!seen.insert(fname.text).second) fail(fname, "duplicate field '" + fname.text + "'");
      ty.fields.emplace_back(fname.text, type_of_kw(t.text));
    }
    expect("}");
    if (ty.fields.empty()) fail(peek(), "empty record");
    return ty;
  }

  int64_t parse_length() {
    Token t = take();
    int64_t n = 0;
    if (t.kind == Tok::Int) n = std::strtoll(t.text.c_str(), nullptr, 10);
    else if (t.kind == Tok::Ident && ctx_.enum_consts.count(t.text)) n = ctx_.enum_consts[t.text];
    else fail(t, "array length must be an integer constant");
    if (n <= 0 || n > 100000000) fail(t, "invalid array length");
    return n;
  }

  double parse_signed_number(bool want_int) {
    bool neg = false;
    if (is("-")) {
      take();
      neg = true;
    }
    Token t = take();
    if (t.kind != Tok::Int && t.kind != Tok::Float) fail(t, "expected a number");
    if (want_int && t.kind != Tok::Int) fail(t, "integer range expected");
    double v = std::strtod(t.text.c_str(), nullptr);
    return neg ? -v : v;
  }

  void parse_volatile(const Token& start) {
    Token tk = take();
    if (!is_type_kw(tk.text)) fail(tk, "volatile inputs must have scalar type");
    check_no_pointer();
    ScalarType st = type_of_kw(tk.text);
    Token name = expect_ident();
    if (name_taken_globally(name.text)) fail(name, "redefinition of '" + name.text + "'");
    VarDecl d;
    d.name = d.qual = name.text;
    d.ty.scalar = st;
    d.is_volatile = true;
    d.pt = point(start);
    if (is("range")) {
      take();
      expect("[");
      double lo = parse_signed_number(st != ScalarType::Float);
      expect(",");
      double hi = parse_signed_number(st != ScalarType::Float);
      Token close = expect("]");
      if (!(lo <= hi)) fail(close, "empty volatile range");
      if (st == ScalarType::Float) {
        d.volatile_range = Value(FloatInterval(lo, hi));
      } else {
        if (st == ScalarType::Bool && (lo < 0 || hi > 1)) fail(close, "bool range must lie in [0,1]");
        if (lo < kMachineIntMin || hi > kMachineIntMax) fail(close, "range exceeds int");
        d.volatile_range = Value(st, IntInterval(static_cast<int64_t>(lo), static_cast<int64_t>(hi)));
      }
    } else if (st == ScalarType::Bool) {
      d.volatile_range = Value::bool_range(true, true);
    } else {
      fail(peek(), "volatile input needs 'range [lo,hi]'");
    }
    expect(";");
    prog_.globals.push_back(add_var(std::move(d)));
  }

  void parse_enum_def() {
    Token name = expect_ident();
    if (is("{")) {
      take();
      int64_t next = 0;
      while (!is("}")) {
        Token c = expect_ident();
        if (name_taken_globally(c.text)) fail(c, "redefinition of '" + c.text + "'");
        if (is("=")) {
          take();
          next = static_cast<int64_t>(parse_signed_number(true));
        }
        ctx_.enum_consts[c.text] = next++;
        if (!is("}")) expect(",");
      }
      take();
      ctx_.enum_types.insert(name.text);
      if (is(";")) {
        take();
        return;
      }
      declare_scalar_or_array(ScalarType::Int, name);
      return;
    }
    if (!ctx_.enum_types.count(name.text))
      fail(name, "unknown enum '" + name.text + "'");
    declare_scalar_or_array(ScalarType::Int, name);
  }

  // After the type: NAME ('[' len ']')? ';' at top level or in a function.
  void declare_scalar_or_array(ScalarType st, const Token& start, bool is_static = false) {
    check_no_pointer();
    Token name = expect_ident();
    VarDecl d;
    d.name = name.text;
    d.ty.scalar = st;
    d.pt = point(start);
    if (is("[")) {
      take();
      d.ty.kind = TypeDesc::Array;
      d.ty.length = parse_length();
      expect("]");
    }
    expect(";");
    finish_decl(std::move(d), name, is_static);
  }

  void finish_decl(VarDecl d, const Token& name, bool is_static) {
    if (cur_fun_ < 0) {
      if (name_taken_globally(d.name)) fail(name, "redefinition of '" + d.name + "'");
      d.qual = d.name;
      d.storage = Storage::Global;
      prog_.globals.push_back(add_var(std::move(d)));
    } else {
      if (locals_.count(d.name)) fail(name, "redefinition of '" + d.name + "'");
      d.qual = prog_.funs[cur_fun_].name + "." + d.name;
      d.storage = is_static ? Storage::Static : Storage::Local;
      d.owner = cur_fun_;
      int id = add_var(std::move(d));
      locals_[prog_.vars[id].name] = id;
      prog_.funs[cur_fun_].locals.push_back(id);
    }
  }

  void parse_top() {
    Token start = peek();
    if (start.kind != Tok::Ident) fail(start, "expected a declaration" + found());
    if (start.text == "volatile") {
      take();
      parse_volatile(start);
      return;
    }
    if (start.text == "static") take();
    if (is("enum")) {
      take();
      parse_enum_def();
      return;
    }
    if (is("struct")) {
      take();
      VarDecl d;
      d.ty = parse_struct_body();
      Token name = expect_ident();
      d.name = name.text;
      d.pt = point(start);
      expect(";");
      finish_decl(std::move(d), name, false);
      return;
    }
    Token tk = take();
    if (tk.text != "void" && !is_type_kw(tk.text)) fail(tk, "expected a type" + std::string(" but found '") + tk.text + "'");
    check_no_pointer();
    if (peek(1).text == "(" && peek(1).kind == Tok::Punct) {
      std::optional<ScalarType> ret;
      if (tk.text != "void") ret = type_of_kw(tk.text);
      parse_function(start, ret);
      return;
    }
    if (tk.text == "void") fail(tk, "variables cannot have type void");
    declare_scalar_or_array(type_of_kw(tk.text), start);
  }

  void parse_function(const Token& start, std::optional<ScalarType> ret) {
    Token name = expect_ident();
    if (name_taken_globally(name.text)) fail(name, "redefinition of '" + name.text + "'");
    FunDef f;
    f.id = static_cast<int>(prog_.funs.size());
    f.name = name.text;
    f.ret = ret;
    f.pt = point(start);
    prog_.funs.push_back(f);
    cur_fun_ = f.id;
    locals_.clear();
    expect("(");
    while (!is(")")) {
      Token tk = take();
      if (!is_type_kw(tk.text)) fail(tk, "parameters must have scalar type");
      check_no_pointer();
      Token pn = expect_ident();
      if (locals_.count(pn.text)) fail(pn, "duplicate parameter '" + pn.text + "'");
      VarDecl d;
      d.name = pn.text;
      d.qual = f.name + "." + pn.text;
      d.ty.scalar = type_of_kw(tk.text);
      d.storage = Storage::Param;
      d.owner = f.id;
      d.pt = point(pn);
      int id = add_var(std::move(d));
      locals_[pn.text] = id;
      prog_.funs[f.id].params.push_back(id);
      if (!is(")")) expect(",");
    }
    expect(")");
    if (ret) {
      VarDecl d;
      d.name = "$ret";
      d.qual = f.name + ".$ret";
      d.ty.scalar = *ret;
      d.storage = Storage::Return;
      d.owner = f.id;
      d.pt = f.pt;
      prog_.funs[f.id].ret_var = add_var(std::move(d));
    }
    if (!is("{")) fail(peek(), "expected function body" + found());
    StmtPtr body = parse_block();
    prog_.funs[f.id].body = body;
    cur_fun_ = -1;
    locals_.clear();
  }

  // ---- statements ----

  StmtPtr parse_block() {
    Token open = expect("{");
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Block;
    s->pt = point(open);
    while (!is("}")) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated block");
      if (StmtPtr st = parse_stmt_or_decl()) s->body.push_back(st);
    }
    take();
    return s;
  }

  // Nested statement positions always get a block.
  StmtPtr parse_body() {
    if (is("{")) return parse_block();
    Token t = peek();
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Block;
    s->pt = point(t);
    if (is_decl_start()) fail(t, "declaration not allowed here");
    s->body.push_back(parse_stmt());
    return s;
  }

  bool is_decl_start() const {
    return is("int") || is("float") || is("bool") || is("static") || is("struct") || is("enum") ||
           is("volatile");
  }

  StmtPtr parse_stmt_or_decl() {
    if (!is_decl_start()) return parse_stmt();
    Token start = take();
    if (start.text == "volatile") fail(start, "volatile inputs must be global");
    bool is_static = false;
    Token tk = start;
    if (start.text == "static") {
      is_static = true;
      tk = take();
    }
    if (tk.text == "struct") {
      VarDecl d;
      d.ty = parse_struct_body();
      Token name = expect_ident();
      d.name = name.text;
      d.pt = point(start);
      expect(";");
      finish_decl(std::move(d), name, is_static);
      return nullptr;
    }
    if (tk.text == "enum") {
      Token en = expect_ident();
      if (!ctx_.enum_types.count(en.text)) fail(en, "unknown enum '" + en.text + "'");
      declare_scalar_or_array(ScalarType::Int, start, is_static);
      return nullptr;
    }
    if (!is_type_kw(tk.text)) fail(tk, "expected a type");
    if (peek(1).text == "(" && peek(1).kind == Tok::Punct) fail(peek(), "nested functions are not supported");
    declare_scalar_or_array(type_of_kw(tk.text), start, is_static);
    return nullptr;
  }

  StmtPtr parse_stmt() {
    Token t = peek();
    auto s = std::make_shared<Stmt>();
    s->pt = point(t);
    if (is("{")) return parse_block();
    if (is("if")) {
      take();
      expect("(");
      s->kind = StmtKind::If;
      s->expr = parse_condition();
      expect(")");
      s->then_s = parse_body();
      if (is("else")) {
        take();
        s->else_s = parse_body();
      }
      return s;
    }
    if (is("while")) {
      take();
      expect("(");
      s->kind = StmtKind::While;
      s->expr = parse_condition();
      expect(")");
      s->then_s = parse_body();
      return s;
    }
    if (is("return")) {
      take();
      s->kind = StmtKind::Return;
      const FunDef& f = prog_.funs[cur_fun_];
      if (!is(";")) {
        if (!f.ret) fail(t, "void function '" + f.name + "' cannot return a value");
        s->expr = coerce(parse_expr(), *f.ret, t);
      } else if (f.ret) {
        fail(t, "function '" + f.name + "' must return a value");
      }
      expect(";");
      return s;
    }
    if (is("wait_tick")) {
      take();
      expect(";");
      s->kind = StmtKind::WaitTick;
      return s;
    }
    if (is("for") || is("do") || is("switch") || is("goto") || is("break") || is("continue"))
      fail(t, "unsupported construct: '" + t.text + "'");
    if (peek().kind == Tok::Ident && is("(", 1)) {
      int callee = lookup_fun(peek());
      take();
      s->kind = StmtKind::Call;
      s->callee = callee;
      s->args = parse_args(callee);
      expect(";");
      return s;
    }
    ExprPtr lhs = parse_lvalue();
    Token eq = expect("=");
    if (peek().kind == Tok::Ident && is("(", 1)) {
      int callee = lookup_fun(peek());
      Token ct = take();
      const FunDef& f = prog_.funs[callee];
      if (!f.ret) fail(ct, "void function '" + f.name + "' used as a value");
      if (!assignable(*f.ret, lhs->type)) fail(ct, "type mismatch in call result assignment");
      s->kind = StmtKind::Call;
      s->callee = callee;
      s->lhs = lhs;
      s->args = parse_args(callee);
      expect(";");
      return s;
    }
    s->kind = StmtKind::Assign;
    s->lhs = lhs;
    s->expr = coerce(parse_expr(), lhs->type, eq);
    s->pt.line = eq.line;
    s->pt.col = eq.col;
    expect(";");
    return s;
  }

  int lookup_fun(const Token& t) {
    int id = prog_.find_fun(t.text);
    if (id < 0) fail(t, "unknown function '" + t.text + "'");
    if (id == cur_fun_) fail(t, "unsupported construct: recursive call to '" + t.text + "'");
    return id;
  }

  std::vector<ExprPtr> parse_args(int callee) {
    Token open = expect("(");
    std::vector<ExprPtr> args;
    const FunDef& f = prog_.funs[callee];
    while (!is(")")) {
      Token at = peek();
      if (args.size() >= f.params.size()) fail(at, "too many arguments to '" + f.name + "'");
      args.push_back(coerce(parse_expr(), prog_.vars[f.params[args.size()]].ty.scalar, at));
      if (!is(")")) expect(",");
    }
    if (args.size() != f.params.size()) fail(open, "wrong number of arguments to '" + f.name + "'");
    take();
    return args;
  }

  // ---- expressions ----

  std::shared_ptr<Expr> make(ExprKind k, ScalarType ty, const Token& at) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->type = ty;
    e->pt = point(at);
    return e;
  }

  static bool assignable(ScalarType from, ScalarType to) {
    return from == to || (from == ScalarType::Int && to == ScalarType::Float);
  }

  ExprPtr promote(ExprPtr e) {
    if (e->type != ScalarType::Int) return e;
    auto c = std::make_shared<Expr>();
    c->kind = ExprKind::Cast;
    c->type = ScalarType::Float;
    c->pt = e->pt;
    c->pt.id = prog_.next_point++;
    c->a = e;
    c->implicit = true;
    return c;
  }

  ExprPtr coerce(ExprPtr e, ScalarType to, const Token& at) {
    if (e->type == to) return e;
    if (assignable(e->type, to)) return promote(e);
    fail(at, std::string("cannot convert ") + scalar_type_name(e->type) + " to " + scalar_type_name(to));
  }

  ExprPtr parse_condition() {
    Token t = peek();
    ExprPtr c = parse_expr();
    if (c->type != ScalarType::Bool) fail(t, "condition must be bool");
    return c;
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b, const Token& at) {
    ScalarType ty;
    if (op == BinOp::And || op == BinOp::Or) {
      if (a->type != ScalarType::Bool || b->type != ScalarType::Bool) fail(at, "logical operator needs bool operands");
      ty = ScalarType::Bool;
    } else if (is_comparison(op)) {
      if (a->type == ScalarType::Bool || b->type == ScalarType::Bool) {
        if (a->type != b->type || (op != BinOp::Eq && op != BinOp::Ne)) fail(at, "invalid comparison of bool");
      } else if (a->type != b->type) {
        a = promote(a);
        b = promote(b);
      }
      ty = ScalarType::Bool;
    } else {
      if (a->type == ScalarType::Bool || b->type == ScalarType::Bool) fail(at, "arithmetic on bool");
      if (op == BinOp::Mod || op == BinOp::Shl || op == BinOp::Shr) {
        if (a->type != ScalarType::Int || b->type != ScalarType::Int)
          fail(at, std::string("operator '") + binop_text(op) + "' needs int operands");
        ty = ScalarType::Int;
      } else if (a->type != b->type) {
        a = promote(a);
        b = promote(b);
        ty = ScalarType::Float;
      } else {
        ty = a->type;
      }
    }
    auto e = make(ExprKind::Binary, ty, at);
    e->bop = op;
    e->a = a;
    e->b = b;
    return e;
  }

  ExprPtr parse_or() {
    ExprPtr a = parse_and();
    while (is("||")) {
      Token t = take();
      a = binary(BinOp::Or, a, parse_and(), t);
    }
    return a;
  }

  ExprPtr parse_and() {
    ExprPtr a = parse_eq();
    while (is("&&")) {
      Token t = take();
      a = binary(BinOp::And, a, parse_eq(), t);
    }
    return a;
  }

  ExprPtr parse_eq() {
    ExprPtr a = parse_rel();
    while (is("==") || is("!=")) {
      Token t = take();
      a = binary(t.text == "==" ? BinOp::Eq : BinOp::Ne, a, parse_rel(), t);
    }
    return a;
  }

  ExprPtr parse_rel() {
    ExprPtr a = parse_shift();
    while (is("<") || is("<=") || is(">") || is(">=")) {
      Token t = take();
      BinOp op = t.text == "<" ? BinOp::Lt : t.text == "<=" ? BinOp::Le : t.text == ">" ? BinOp::Gt : BinOp::Ge;
      a = binary(op, a, parse_shift(), t);
    }
    return a;
  }

  ExprPtr parse_shift() {
    ExprPtr a = parse_add();
    while (is("<<") || is(">>")) {
      Token t = take();
      a = binary(t.text == "<<" ? BinOp::Shl : BinOp::Shr, a, parse_add(), t);
    }
    return a;
  }

  ExprPtr parse_add() {
    ExprPtr a = parse_mul();
    while (is("+") || is("-")) {
      Token t = take();
      a = binary(t.text == "+" ? BinOp::Add : BinOp::Sub, a, parse_mul(), t);
    }
    return a;
  }

  ExprPtr parse_mul() {
    ExprPtr a = parse_unary();
    while (is("*") || is("/") || is("%")) {
      Token t = take();
      a = binary(t.text == "*" ? BinOp::Mul : t.text == "/" ? BinOp::Div : BinOp::Mod, a, parse_unary(), t);
    }
    return a;
  }

  ExprPtr parse_unary() {
    Token t = peek();
    if (is("-")) {
      take();
      if (peek().kind == Tok::Int || peek().kind == Tok::Float) return parse_literal(true, t);
      ExprPtr a = parse_unary();
      if (a->type == ScalarType::Bool) fail(t, "negation of bool");
      auto e = make(ExprKind::Unary, a->type, t);
      e->uop = UnOp::Neg;
      e->a = a;
      return e;
    }
    if (is("!")) {
      take();
      ExprPtr a = parse_unary();
      if (a->type != ScalarType::Bool) fail(t, "'!' needs a bool operand");
      auto e = make(ExprKind::Unary, ScalarType::Bool, t);
      e->uop = UnOp::Not;
      e->a = a;
      return e;
    }
    if (is("&") || is("*")) fail(t, "unsupported construct: pointers");
    if (is("(") && peek(1).kind == Tok::Ident && is_type_kw(peek(1).text) && is(")", 2)) {
      take();
      Token tk = take();
      take();
      ScalarType to = type_of_kw(tk.text);
      ExprPtr a = parse_unary();
      if (to == ScalarType::Bool) fail(tk, "cast to bool is not supported");
      if (a->type == to) return a;
      auto e = make(ExprKind::Cast, to, t);
      e->a = a;
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_literal(bool negative, const Token& at) {
    Token t = take();
    if (t.kind == Tok::Int) {
      errno = 0;
      unsigned long long v = std::strtoull(t.text.c_str(), nullptr, 10);
      int64_t sv = negative ? -static_cast<int64_t>(std::min<unsigned long long>(v, 1ull << 40))
                            : static_cast<int64_t>(std::min<unsigned long long>(v, 1ull << 40));
      if (errno || sv < kMachineIntMin || sv > kMachineIntMax) fail(t, "integer literal out of range");
      auto e = make(ExprKind::IntLit, ScalarType::Int, negative ? at : t);
      e->ival = sv;
      return e;
    }
    double v = std::strtod(t.text.c_str(), nullptr);
    if (!std::isfinite(v)) fail(t, "float literal out of range");
    auto e = make(ExprKind::FloatLit, ScalarType::Float, negative ? at : t);
    e->fval = negative ? -v : v;
    return e;
  }

  int lookup_var(const Token& t) {
    auto it = locals_.find(t.text);
    if (it != locals_.end()) return it->second;
    int g = prog_.find_global(t.text);
    if (g < 0) fail(t, "undeclared variable '" + t.text + "'");
    return g;
  }

  ExprPtr parse_primary() {
    Token t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Float) return parse_literal(false, t);
    if (is("true") || is("false")) {
      take();
      auto e = make(ExprKind::BoolLit, ScalarType::Bool, t);
      e->ival = t.text == "true" ? 1 : 0;
      return e;
    }
    if (is("(")) {
      take();
      ExprPtr e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Ident && !kReserved.count(t.text)) {
      if (is("(", 1)) {
        int id = prog_.find_fun(t.text);
        if (id < 0) fail(t, "unknown function '" + t.text + "'");
        if (id == cur_fun_) fail(t, "unsupported construct: recursive call to '" + t.text + "'");
        fail(t, "function calls are only allowed as statements");
      }
      auto ec = ctx_.enum_consts.find(t.text);
      if (!locals_.count(t.text) && ec != ctx_.enum_consts.end()) {
        take();
        auto e = make(ExprKind::IntLit, ScalarType::Int, t);
        e->ival = ec->second;
        return e;
      }
      return parse_var_ref(false);
    }
    fail(t, "expected an expression" + found());
  }

  ExprPtr parse_lvalue() {
    Token t = peek();
    if (t.kind != Tok::Ident || kReserved.count(t.text)) fail(t, "expected a statement" + found());
    if (is("*")) fail(t, "unsupported construct: pointers");
    return parse_var_ref(true);
  }

  ExprPtr parse_var_ref(bool as_lvalue) {
    Token t = take();
    int id = lookup_var(t);
    const VarDecl& d = prog_.vars[id];
    if (as_lvalue && d.is_volatile) fail(t, "cannot assign to volatile input '" + d.name + "'");
    if (is("[")) {
      Token ob = take();
      if (d.ty.kind != TypeDesc::Array) fail(t, "'" + d.name + "' is not an array");
      ExprPtr idx = parse_expr();
      if (idx->type != ScalarType::Int) fail(ob, "array subscript must be int");
      expect("]");
      auto e = make(ExprKind::Index, d.ty.scalar, ob);
      e->var = id;
      e->a = idx;
      return e;
    }
    if (is(".")) {
      take();
      Token fname = expect_ident();
      if (d.ty.kind != TypeDesc::Record) fail(t, "'" + d.name + "' is not a record");
      for (size_t i = 0; i < d.ty.fields.size(); ++i) {
        if (d.ty.fields[i].first == fname.text) {
          auto e = make(ExprKind::Field, d.ty.fields[i].second, t);
          e->var = id;
          e->field = static_cast<int>(i);
          return e;
        }
      }
      fail(fname, "no field '" + fname.text + "' in '" + d.name + "'");
    }
    if (d.ty.kind != TypeDesc::Scalar) fail(t, "'" + d.name + "' is not a scalar");
    auto e = make(ExprKind::Var, d.ty.scalar, t);
    e->var = id;
    return e;
  }
};

}  // namespace

Program parse_program(const std::vector<SourceFile>& files, const std::string& entry) {
  Program prog;
  ParseContext ctx;
  for (size_t i = 0; i < files.size(); ++i) {
    prog.files.push_back(files[i].name);
    Parser ps(prog, ctx, static_cast<int>(i), files[i].name, files[i].text);
    ps.parse_unit();
  }
  prog.entry = prog.find_fun(entry);
  if (prog.entry < 0)
    throw ParseError(files.empty() ? "<input>" : files.back().name, 1, 1, "entry function '" + entry + "' not found");
  if (!prog.funs[prog.entry].params.empty())
    throw ParseError(prog.file_name(prog.funs[prog.entry].pt), prog.funs[prog.entry].pt.line,
                     prog.funs[prog.entry].pt.col, "entry function takes no parameters");
  return prog;
}

Program parse_source(const std::string& text, const std::string& name, const std::string& entry) {
  return parse_program({SourceFile{name, text}}, entry);
}

}  // namespace miniastree
