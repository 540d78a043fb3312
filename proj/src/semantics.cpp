#include "miniastree/semantics.hpp"

#include <cmath>

namespace miniastree {

namespace {

Outcome fault(AlarmKind k) { return {Scalar{}, k}; }

Outcome checked_int(int64_t v) {
  if (v < kMachineIntMin || v > kMachineIntMax) return fault(AlarmKind::Overflow);
  return {Scalar::of_int(v), std::nullopt};
}

Outcome checked_float(double v) {
  if (std::isnan(v)) return fault(AlarmKind::Nan);
  if (std::isinf(v)) return fault(AlarmKind::Overflow);
  return {Scalar::of_float(v), std::nullopt};
}

bool compare(CmpOp op, double x, double y) {
  switch (op) {
    case CmpOp::Lt: return x < y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Gt: return x > y;
    case CmpOp::Ge: return x >= y;
    case CmpOp::Eq: return x == y;
    case CmpOp::Ne: return x != y;
  }
  return false;
}

bool compare(CmpOp op, int64_t x, int64_t y) {
  switch (op) {
    case CmpOp::Lt: return x < y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Gt: return x > y;
    case CmpOp::Ge: return x >= y;
    case CmpOp::Eq: return x == y;
    case CmpOp::Ne: return x != y;
  }
  return false;
}

}  // namespace

Outcome eval_unary(UnOp op, const Scalar& a) {
  if (op == UnOp::Not) return {Scalar::of_bool(!a.truth()), std::nullopt};
  if (a.type == ScalarType::Float) return checked_float(-a.f);
  return checked_int(-a.i);
}

Outcome eval_binary(BinOp op, const Scalar& a, const Scalar& b) {
  if (op == BinOp::And) return {Scalar::of_bool(a.truth() && b.truth()), std::nullopt};
  if (op == BinOp::Or) return {Scalar::of_bool(a.truth() || b.truth()), std::nullopt};
  if (is_comparison(op)) {
    bool r = a.type == ScalarType::Float ? compare(to_cmp(op), a.f, b.f) : compare(to_cmp(op), a.i, b.i);
    return {Scalar::of_bool(r), std::nullopt};
  }
  if (a.type == ScalarType::Float) {
    double x = a.f, y = b.f;
    switch (op) {
      case BinOp::Add: return checked_float(x + y);
      case BinOp::Sub: return checked_float(x - y);
      case BinOp::Mul: return checked_float(x * y);
      case BinOp::Div:
        if (y == 0) return fault(AlarmKind::DivZero);
        return checked_float(x / y);
      default: break;
    }
    return fault(AlarmKind::Nan);
  }
  int64_t x = a.i, y = b.i;
  switch (op) {
    case BinOp::Add: return checked_int(x + y);
    case BinOp::Sub: return checked_int(x - y);
    case BinOp::Mul: return checked_int(x * y);
    case BinOp::Div:
      if (y == 0) return fault(AlarmKind::DivZero);
      return checked_int(x / y);
    case BinOp::Mod:
      if (y == 0) return fault(AlarmKind::DivZero);
      if (x == kMachineIntMin && y == -1) return fault(AlarmKind::Overflow);
      return checked_int(x % y);
    case BinOp::Shl:
      if (y < 0 || y > 31) return fault(AlarmKind::Shift);
      return checked_int(x * (int64_t{1} << y));
    case BinOp::Shr:
      if (y < 0 || y > 31) return fault(AlarmKind::Shift);
      return checked_int(x >> y);
    default: break;
  }
  return fault(AlarmKind::Overflow);
}

Outcome eval_cast(ScalarType to, const Scalar& a) {
  if (to == ScalarType::Float) {
    if (a.type == ScalarType::Float) return {a, std::nullopt};
    return {Scalar::of_float(static_cast<double>(a.i)), std::nullopt};
  }
  if (a.type != ScalarType::Float) return {Scalar::of_int(a.i), std::nullopt};
  if (std::isnan(a.f)) return fault(AlarmKind::Nan);
  if (!(a.f > -2147483649.0 && a.f < 2147483648.0)) return fault(AlarmKind::Overflow);
  return {Scalar::of_int(static_cast<int64_t>(std::trunc(a.f))), std::nullopt};
}

}  // namespace miniastree
