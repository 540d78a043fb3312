#pragma once

// Typed AST, parser, constant folding and global pruning for `.mc` sources.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniastree/interval.hpp"

namespace miniastree {

struct ProgramPoint {
  int file = 0;
  int line = 0;
  int col = 0;
  int id = -1;
};

enum class AlarmKind { Overflow, DivZero, ArrayBounds, Shift, Nan };
const char* alarm_kind_name(AlarmKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int col, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        file_(std::move(file)), line_(line), col_(col) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string file_;
  int line_, col_;
};

struct TypeDesc {
  enum Kind { Scalar, Array, Record } kind = Scalar;
  ScalarType scalar = ScalarType::Int;  // element type for arrays
  int64_t length = 0;
  std::vector<std::pair<std::string, ScalarType>> fields;
};

enum class Storage { Global, Static, Local, Param, Return };

struct VarDecl {
  int id = -1;
  std::string name;  // source name
  std::string qual;  // unique display name, e.g. `f.x` for locals
  TypeDesc ty;
  Storage storage = Storage::Global;
  bool is_volatile = false;
  Value volatile_range;
  int owner = -1;  // owning function for non-globals
  bool pruned = false;
  ProgramPoint pt;
};

enum class ExprKind { IntLit, FloatLit, BoolLit, Var, Index, Field, Unary, Binary, Cast };
enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, Shl, Shr, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

bool is_comparison(BinOp op);
bool is_arith(BinOp op);
CmpOp to_cmp(BinOp op);
ArithOp to_arith(BinOp op);
const char* binop_text(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  ScalarType type = ScalarType::Int;
  ProgramPoint pt;
  int64_t ival = 0;  // IntLit / BoolLit
  double fval = 0;   // FloatLit
  int var = -1;      // Var / Index / Field
  int field = -1;    // Field
  UnOp uop = UnOp::Neg;
  BinOp bop = BinOp::Add;
  ExprPtr a, b;  // operands; Index keeps the subscript in `a`
  bool implicit = false;  // promotion inserted by the type checker

  bool is_literal() const {
    return kind == ExprKind::IntLit || kind == ExprKind::FloatLit || kind == ExprKind::BoolLit;
  }
};

enum class StmtKind { Assign, If, While, Block, Call, Return, WaitTick };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Block;
  ProgramPoint pt;
  ExprPtr lhs;   // Assign, Call with result
  ExprPtr expr;  // Assign rhs, If/While condition, Return value
  std::vector<StmtPtr> body;  // Block statements
  StmtPtr then_s, else_s;     // If (else may be null), While body in then_s
  int callee = -1;
  std::vector<ExprPtr> args;
};

struct FunDef {
  int id = -1;
  std::string name;
  std::optional<ScalarType> ret;
  std::vector<int> params;
  std::vector<int> locals;  // locals and statics, declaration order
  int ret_var = -1;
  StmtPtr body;
  ProgramPoint pt;
  bool pruned = false;
};

struct FoldDiagnostic {
  ProgramPoint pt;
  AlarmKind kind;
  std::string expr;
};

struct Program {
  std::vector<std::string> files;
  std::vector<VarDecl> vars;  // indexed by id
  std::vector<int> globals;   // global variable ids, declaration order
  std::vector<FunDef> funs;   // indexed by id, callees before callers
  int entry = -1;
  int next_point = 0;
  std::vector<FoldDiagnostic> fold_alarms;
  std::vector<std::string> pruned_volatiles;

  const std::string& file_name(const ProgramPoint& p) const;
  int find_fun(const std::string& name) const;
  int find_global(const std::string& name) const;
};

struct SourceFile {
  std::string name;
  std::string text;
};

// Parses and type-checks the units as one program (declarations before use).
Program parse_program(const std::vector<SourceFile>& files, const std::string& entry = "main");
Program parse_source(const std::string& text, const std::string& name = "<input>",
                     const std::string& entry = "main");

Program const_fold(const Program& p);
Program prune_unused_globals(const Program& p);

std::string print_expr(const Program& p, const ExprPtr& e);
std::string print_program(const Program& p);
// Structural equality ignoring program points.
bool same_ast(const Program& a, const Program& b);

// Every variable sub-expression of e.
void collect_vars(const ExprPtr& e, std::vector<int>& out);

}  // namespace miniastree
