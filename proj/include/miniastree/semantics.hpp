#pragma once

// Concrete scalar semantics of the target: round-to-nearest doubles without
// fused operations, checked 32-bit integers.

#include <cstdint>
#include <optional>

#include "miniastree/frontend.hpp"

namespace miniastree {

struct Scalar {
  ScalarType type = ScalarType::Int;
  int64_t i = 0;  // int and bool payload
  double f = 0;

  static Scalar of_int(int64_t v) { return {ScalarType::Int, v, 0}; }
  static Scalar of_bool(bool b) { return {ScalarType::Bool, b ? 1 : 0, 0}; }
  static Scalar of_float(double v) { return {ScalarType::Float, 0, v}; }
  bool truth() const { return i != 0; }
};

struct Outcome {
  Scalar value;
  std::optional<AlarmKind> fault;
};

Outcome eval_unary(UnOp op, const Scalar& a);
Outcome eval_binary(BinOp op, const Scalar& a, const Scalar& b);
Outcome eval_cast(ScalarType to, const Scalar& a);

}  // namespace miniastree
