#pragma once

// Interval-coefficient linear forms over cells, with rounding-error terms.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "miniastree/frontend.hpp"
#include "miniastree/interval.hpp"

namespace miniastree {

struct LinearTerm {
  int cell;
  FloatInterval coeff;
};

// Absolute: each float op adds +-(f*|bound| + denorm_min) to the constant.
// Relative: each float op scales the form by [1-f, 1+f] and adds half a
// denormal, tracked exactly in `half_denorms`.
enum class ErrorModel { Absolute, Relative };

class LinearForm {
 public:
  LinearForm() : constant_(0.0, 0.0) {}
  static LinearForm constant(const FloatInterval& c);
  static LinearForm variable(int cell);

  const std::vector<LinearTerm>& terms() const { return terms_; }
  const FloatInterval& constant_part() const { return constant_; }
  int half_denorms() const { return half_denorms_; }
  bool is_constant() const { return terms_.empty(); }
  // Coefficient of a cell, [0,0] when absent.
  FloatInterval coeff(int cell) const;

  LinearForm add(const LinearForm& o) const;
  LinearForm sub(const LinearForm& o) const;
  LinearForm neg() const;
  LinearForm scale(const FloatInterval& c) const;
  LinearForm plus_constant(const FloatInterval& c) const;
  // Drops a term (the caller accounts for it).
  LinearForm without(int cell) const;
  // Rounding error of one float operation whose exact result has the given
  // magnitude bound.
  LinearForm rounded(ErrorModel model, const FloatModel& fm, double magnitude) const;
  // Constant with the half-denormal terms folded in (outward).
  FloatInterval full_constant() const;

  // Real-field bound of the form.
  FloatInterval eval(const std::function<FloatInterval(int)>& range) const;
  // Bound of round-to-nearest applied to the form's value, exploiting that
  // the result is a double.
  FloatInterval eval_rounded_result(const std::function<FloatInterval(int)>& range) const;

  std::string to_string(const std::function<std::string(int)>& name) const;

 private:
  std::vector<LinearTerm> terms_;  // sorted by cell
  FloatInterval constant_;
  int half_denorms_ = 0;
};

// What linearization needs from the analyzer.
class LinearContext {
 public:
  virtual ~LinearContext() = default;
  // Plain interval value of a subexpression.
  virtual Value value_of(const Expr& e) = 0;
  // Cell denoted by a variable-like expression, or -1.
  virtual int cell_of(const Expr& e) = 0;
};

struct LinearizeOptions {
  ErrorModel model = ErrorModel::Absolute;
  // Include the rounding of the outermost operation. Interval results may
  // skip it since they are rounded outward to doubles anyway.
  bool round_outer = true;
  FloatModel fm;
};

// nullopt when the expression is not numeric or a divisor may be zero. The
// caller is responsible for falling back when the plain evaluation of `e`
// raised any error flag.
std::optional<LinearForm> linearize(const Expr& e, LinearContext& ctx, const LinearizeOptions& opt);

}  // namespace miniastree
