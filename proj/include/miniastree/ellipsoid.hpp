#pragma once

// Ellipsoidal constraints X^2 - a*X*Y + b*Y^2 <= k for second-order filters
// X' = a*X - b*Y + t.

#include <memory>
#include <string>
#include <vector>

#include "miniastree/interval.hpp"

namespace miniastree {

struct FilterParams {
  double a = 0;
  double b = 0;
  double f = 0x1p-53;

  bool valid() const;
};

// Smallest k preserved by one filter step with |t| <= t_m, including the
// rounding terms of delta. Throws std::invalid_argument on invalid params.
double prop1_threshold(const FilterParams& p, double t_m);
// Bound on the quadratic form after one filter step from a state bounded by k.
double delta(double k, const FilterParams& p, double t_m);
// |X| bound implied by r(X, Y) = k, and the |Y| bound.
double ell_first_bound(double k, const FilterParams& p);
double ell_second_bound(double k, const FilterParams& p);
// Upper bound of X^2 - aXY + bY^2 over intervals, and of (1-a+b)X^2.
double quad_upper(const FloatInterval& x, const FloatInterval& y, const FilterParams& p);
double quad_upper_equal(const FloatInterval& x, const FilterParams& p);

class EllipsoidMap {
 public:
  EllipsoidMap() = default;
  EllipsoidMap(int n, FilterParams p);

  int dim() const { return n_; }
  const FilterParams& params() const { return p_; }
  // +inf when unconstrained.
  double get(int x, int y) const { return (*r_)[static_cast<size_t>(x) * n_ + y]; }
  EllipsoidMap set(int x, int y, double k) const;
  EllipsoidMap tighten(int x, int y, double k) const;

  // Drops every constraint mentioning x.
  EllipsoidMap forget(int x) const;
  // x := y.
  EllipsoidMap copy(int x, int y) const;
  // x := a*y - b*z + t with |t| <= t_m.
  EllipsoidMap filter(int x, int y, int z, double t_m) const;

  EllipsoidMap join(const EllipsoidMap& o) const;
  EllipsoidMap widen(const EllipsoidMap& o, const ThresholdSet& t) const;
  EllipsoidMap narrow(const EllipsoidMap& o) const;
  bool leq(const EllipsoidMap& o) const;
  bool operator==(const EllipsoidMap& o) const;

  std::vector<std::string> constraints(const std::vector<std::string>& names) const;

 private:
  int n_ = 0;
  FilterParams p_;
  std::shared_ptr<const std::vector<double>> r_ = std::make_shared<const std::vector<double>>();
};

}  // namespace miniastree
