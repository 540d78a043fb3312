#include "miniastree/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "miniastree/rounding.hpp"

namespace miniastree {

using namespace rounding;

bool FilterParams::valid() const { return b > 0 && b < 1 && a * a - 4 * b < 0; }

namespace {

double disc_down(const FilterParams& p) { return sub_down(mul_down(4.0, p.b), mul_up(p.a, p.a)); }

// 4f(|a|sqrt(b) + b) / sqrt(4b - a^2), rounded up.
double f_term(const FilterParams& p) {
  double sb = sqrt_up(p.b);
  double num = mul_up(mul_up(4.0, p.f), add_up(mul_up(std::fabs(p.a), sb), p.b));
  return div_up(num, sqrt_down(disc_down(p)));
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double prop1_threshold(const FilterParams& p, double t_m) {
  if (!p.valid()) throw std::invalid_argument("filter parameters must satisfy 0 < b < 1 and a^2 - 4b < 0");
  if (t_m <= 0) return 0.0;
  double denom = sub_down(sub_down(1.0, sqrt_up(p.b)), f_term(p));
  if (!(denom > 0)) return kInf;
  double r = div_up(mul_up(add_up(1.0, p.f), t_m), denom);
  // Margin for the rounding of delta itself near the fixpoint.
  return mul_up(sq_up(r), 1.0 + 0x1p-30);
}

double delta(double k, const FilterParams& p, double t_m) {
  if (k == kInf) return kInf;
  double sb = sqrt_up(p.b);
  double inner = add_up(mul_up(add_up(sb, f_term(p)), sqrt_up(std::max(k, 0.0))), mul_up(add_up(1.0, p.f), t_m));
  return sq_up(inner);
}

double ell_first_bound(double k, const FilterParams& p) {
  if (k == kInf) return kInf;
  return mul_up(2.0, mul_up(sqrt_up(p.b), sqrt_up(div_up(std::max(k, 0.0), disc_down(p)))));
}

double ell_second_bound(double k, const FilterParams& p) {
  if (k == kInf) return kInf;
  return mul_up(2.0, sqrt_up(div_up(std::max(k, 0.0), disc_down(p))));
}

double quad_upper(const FloatInterval& x, const FloatInterval& y, const FilterParams& p) {
  if (x.is_bottom() || y.is_bottom()) return 0.0;
  FloatInterval xy = x.mul(y);
  double cross = p.a >= 0 ? mul_up(-p.a, xy.lo()) : mul_up(-p.a, xy.hi());
  return add_up(add_up(sq_up(x.magnitude()), cross), mul_up(p.b, sq_up(y.magnitude())));
}

double quad_upper_equal(const FloatInterval& x, const FilterParams& p) {
  if (x.is_bottom()) return 0.0;
  double c = add_up(sub_up(1.0, p.a), p.b);
  if (c >= 0) return mul_up(c, sq_up(x.magnitude()));
  double m = x.contains(0.0) ? 0.0 : std::min(std::fabs(x.lo()), std::fabs(x.hi()));
  return mul_up(c, sq_down(m));
}

EllipsoidMap::EllipsoidMap(int n, FilterParams p)
    : n_(n), p_(p), r_(std::make_shared<const std::vector<double>>(static_cast<size_t>(n) * n, kInf)) {}

EllipsoidMap EllipsoidMap::set(int x, int y, double k) const {
  if (get(x, y) == k) return *this;
  EllipsoidMap m = *this;
  auto r = *r_;
  r[static_cast<size_t>(x) * n_ + y] = k;
  m.r_ = std::make_shared<const std::vector<double>>(std::move(r));
  return m;
}

EllipsoidMap EllipsoidMap::tighten(int x, int y, double k) const {
  return k < get(x, y) ? set(x, y, k) : *this;
}

EllipsoidMap EllipsoidMap::forget(int x) const {
  auto r = *r_;
  bool changed = false;
  for (int z = 0; z < n_; ++z) {
    for (size_t i : {static_cast<size_t>(x) * n_ + z, static_cast<size_t>(z) * n_ + x}) {
      if (r[i] != kInf) changed = true;
      r[i] = kInf;
    }
  }
  if (!changed) return *this;
  EllipsoidMap m = *this;
  m.r_ = std::make_shared<const std::vector<double>>(std::move(r));
  return m;
}

EllipsoidMap EllipsoidMap::copy(int x, int y) const {
  if (x == y) return *this;
  EllipsoidMap m = forget(x);
  for (int z = 0; z < n_; ++z) {
    if (z == x || z == y) continue;
    m = m.set(x, z, get(y, z)).set(z, x, get(z, y));
  }
  return m;
}

EllipsoidMap EllipsoidMap::filter(int x, int y, int z, double t_m) const {
  double k = get(y, z);
  EllipsoidMap m = forget(x);
  return m.set(x, y, delta(k, p_, t_m));
}

EllipsoidMap EllipsoidMap::join(const EllipsoidMap& o) const {
  if (r_ == o.r_) return *this;
  auto r = *r_;
  for (size_t i = 0; i < r.size(); ++i) r[i] = std::max(r[i], (*o.r_)[i]);
  EllipsoidMap m = *this;
  m.r_ = std::make_shared<const std::vector<double>>(std::move(r));
  return m;
}

EllipsoidMap EllipsoidMap::widen(const EllipsoidMap& o, const ThresholdSet& t) const {
  if (r_ == o.r_) return *this;
  auto r = *r_;
  for (size_t i = 0; i < r.size(); ++i)
    if ((*o.r_)[i] > r[i]) r[i] = t.above((*o.r_)[i]);
  EllipsoidMap m = *this;
  m.r_ = std::make_shared<const std::vector<double>>(std::move(r));
  return m;
}

EllipsoidMap EllipsoidMap::narrow(const EllipsoidMap& o) const {
  if (r_ == o.r_) return *this;
  auto r = *r_;
  for (size_t i = 0; i < r.size(); ++i) r[i] = std::min(r[i], (*o.r_)[i]);
  EllipsoidMap m = *this;
  m.r_ = std::make_shared<const std::vector<double>>(std::move(r));
  return m;
}

bool EllipsoidMap::leq(const EllipsoidMap& o) const {
  if (r_ == o.r_) return true;
  for (size_t i = 0; i < r_->size(); ++i)
    if ((*r_)[i] > (*o.r_)[i]) return false;
  return true;
}

bool EllipsoidMap::operator==(const EllipsoidMap& o) const {
  return n_ == o.n_ && (r_ == o.r_ || *r_ == *o.r_);
}

std::vector<std::string> EllipsoidMap::constraints(const std::vector<std::string>& names) const {
  std::vector<std::string> out;
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y) {
      double k = get(x, y);
      if (x == y || k == kInf) continue;
      out.push_back(names[x] + "^2 - " + num(p_.a) + "*" + names[x] + "*" + names[y] + " + " + num(p_.b) + "*" +
                    names[y] + "^2 <= " + num(k));
    }
  return out;
}

}  // namespace miniastree
