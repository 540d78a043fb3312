#include "miniastree/octagon.hpp"

#include <algorithm>
#include <cstdio>

#include "miniastree/rounding.hpp"

namespace miniastree {

using namespace rounding;

namespace {

int unit_index(const std::pair<int, int>& u) { return 2 * u.first + (u.second < 0 ? 1 : 0); }

std::string bound_text(double c) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

}  // namespace

Octagon::Octagon(int n) : n_(n) {
  std::vector<double> m(static_cast<size_t>(4) * n * n, kInf);
  for (int i = 0; i < 2 * n; ++i) m[static_cast<size_t>(i) * 2 * n + i] = 0.0;
  m_ = std::make_shared<const std::vector<double>>(std::move(m));
}

Octagon Octagon::bottom(int n) {
  Octagon o(n);
  o.bottom_ = true;
  return o;
}

Octagon Octagon::from(std::vector<double> m, bool closed) const {
  Octagon o;
  o.n_ = n_;
  o.closed_ = closed;
  o.m_ = std::make_shared<const std::vector<double>>(std::move(m));
  return o;
}

Octagon Octagon::add_constraint(int a, int b, double c) const {
  if (bottom_) return *this;
  if (!(c < at(a, b)) && !(c < at(b ^ 1, a ^ 1))) return *this;
  std::vector<double> m = *m_;
  ref(m, a, b) = std::min(ref(m, a, b), c);
  ref(m, b ^ 1, a ^ 1) = std::min(ref(m, b ^ 1, a ^ 1), c);
  return from(std::move(m), false);
}

Octagon Octagon::with_bounds(int v, const FloatInterval& r) const {
  if (bottom_) return *this;
  if (r.is_bottom()) return bottom(n_);
  Octagon o = *this;
  if (r.hi() < kInf) o = o.add_constraint(2 * v + 1, 2 * v, mul_up(2.0, r.hi()));
  if (r.lo() > -kInf) o = o.add_constraint(2 * v, 2 * v + 1, mul_up(-2.0, r.lo()));
  return o;
}

FloatInterval Octagon::bounds(int v) const {
  if (bottom_) return FloatInterval::bottom();
  double hi = half_up(at(2 * v + 1, 2 * v));
  double lo = -half_up(at(2 * v, 2 * v + 1));
  return FloatInterval(lo, hi);
}

Octagon Octagon::closed() const {
  if (bottom_ || closed_) return *this;
  int d = 2 * n_;
  std::vector<double> m = *m_;
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      double ik = ref(m, i, k);
      if (ik == kInf) continue;
      for (int j = 0; j < d; ++j) {
        double kj = ref(m, k, j);
        if (kj == kInf) continue;
        double s = add_up(ik, kj);
        if (s < ref(m, i, j)) ref(m, i, j) = s;
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    double ii = ref(m, i, i ^ 1);
    if (ii == kInf) continue;
    for (int j = 0; j < d; ++j) {
      double jj = ref(m, j ^ 1, j);
      if (jj == kInf) continue;
      double s = half_up(add_up(ii, jj));
      if (s < ref(m, i, j)) ref(m, i, j) = s;
    }
  }
  for (int i = 0; i < d; ++i) {
    if (ref(m, i, i) < 0) return bottom(n_);
    ref(m, i, i) = 0.0;
  }
  return from(std::move(m), true);
}

Octagon Octagon::forget(int v) const {
  if (bottom_) return *this;
  std::vector<double> m = *m_;
  int d = 2 * n_;
  for (int a : {2 * v, 2 * v + 1}) {
    for (int j = 0; j < d; ++j) {
      ref(m, a, j) = kInf;
      ref(m, j, a) = kInf;
    }
    ref(m, a, a) = 0.0;
  }
  return from(std::move(m), closed_);
}

double Octagon::upper(const OctForm& f) const {
  if (bottom_) return -kInf;
  std::vector<int> idx;
  for (const auto& u : f.units) idx.push_back(unit_index(u));
  auto single = [&](int a) { return half_up(at(a ^ 1, a)); };
  double total = f.rest.hi();
  while (idx.size() >= 2) {
    double best_gain = 0;
    size_t bi = 0, bj = 0;
    bool found = false;
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = i + 1; j < idx.size(); ++j) {
        double pair = at(idx[i] ^ 1, idx[j]);
        if (pair == kInf) continue;
        double sep = add_up(single(idx[i]), single(idx[j]));
        double gain = sep == kInf ? kInf : sep - pair;
        if (gain > best_gain) {
          best_gain = gain;
          bi = i;
          bj = j;
          found = true;
        }
      }
    if (!found) break;
    total = add_up(total, at(idx[bi] ^ 1, idx[bj]));
    idx.erase(idx.begin() + static_cast<long>(bj));
    idx.erase(idx.begin() + static_cast<long>(bi));
  }
  for (int a : idx) total = add_up(total, single(a));
  return total;
}

FloatInterval Octagon::range(const OctForm& f) const {
  if (bottom_) return FloatInterval::bottom();
  OctForm neg;
  for (const auto& u : f.units) neg.units.emplace_back(u.first, -u.second);
  neg.rest = f.rest.neg();
  return FloatInterval(-upper(neg), upper(f));
}

namespace {

// f + sign*v_y; a unit meeting itself again becomes an interval term.
OctForm plus_unit(const OctForm& f, int y, int sign, const FloatInterval& y_range) {
  OctForm r = f;
  for (size_t i = 0; i < r.units.size(); ++i) {
    if (r.units[i].first != y) continue;
    if (r.units[i].second == sign) {
      r.rest = r.rest.add(sign > 0 ? y_range : y_range.neg());
    } else {
      r.units.erase(r.units.begin() + static_cast<long>(i));
    }
    return r;
  }
  r.units.emplace_back(y, sign);
  return r;
}

OctForm negated(const OctForm& f) {
  OctForm r;
  for (const auto& u : f.units) r.units.emplace_back(u.first, -u.second);
  r.rest = f.rest.neg();
  return r;
}

}  // namespace

Octagon Octagon::assign(int v, const OctForm& f, const FloatInterval& unary) const {
  if (bottom_) return *this;
  Octagon o = closed();
  if (o.bottom_) return o;
  FloatInterval u = unary.meet(o.range(f));
  if (u.is_bottom()) return bottom(n_);
  struct Bin {
    int a, b;
    double c;
  };
  std::vector<Bin> bins;
  if (!f.units.empty()) {
    for (int y = 0; y < n_; ++y) {
      if (y == v) continue;
      FloatInterval yr = o.bounds(y);
      // x - y, y - x, x + y, -x - y.
      bins.push_back({2 * y, 2 * v, o.upper(plus_unit(f, y, -1, yr))});
      bins.push_back({2 * v, 2 * y, o.upper(negated(plus_unit(f, y, -1, yr)))});
      bins.push_back({2 * y + 1, 2 * v, o.upper(plus_unit(f, y, +1, yr))});
      bins.push_back({2 * v, 2 * y + 1, o.upper(negated(plus_unit(f, y, +1, yr)))});
    }
  }
  Octagon r = o.forget(v).with_bounds(v, u);
  for (const auto& b : bins)
    if (b.c < kInf) r = r.add_constraint(b.a, b.b, b.c);
  r.closed_ = false;
  return r.closed();
}

Octagon Octagon::guard_le(const OctForm& f) const {
  if (bottom_) return *this;
  Octagon o = closed();
  if (o.bottom_) return o;
  if (f.units.empty()) return f.rest.lo() > 0 ? bottom(n_) : o;
  // Remaining part of f once some units are removed, negated.
  auto others = [&](int skip1, int skip2) {
    OctForm g;
    for (int i = 0; i < static_cast<int>(f.units.size()); ++i)
      if (i != skip1 && i != skip2) g.units.push_back(f.units[i]);
    g.rest = f.rest;
    return negated(g);
  };
  Octagon r = o;
  int n = static_cast<int>(f.units.size());
  for (int i = 0; i < n; ++i) {
    int a = unit_index(f.units[i]);
    double c = o.upper(others(i, -1));
    if (c < kInf) r = r.add_constraint(a ^ 1, a, mul_up(2.0, c));
    for (int j = i + 1; j < n; ++j) {
      int b = unit_index(f.units[j]);
      double cp = o.upper(others(i, j));
      if (cp < kInf) r = r.add_constraint(a ^ 1, b, cp);
    }
  }
  if (r.m_ == o.m_) {
    // Nothing new, but the remainder may still show infeasibility.
    return o.range(f).lo() > 0 ? bottom(n_) : o;
  }
  r.closed_ = false;
  return r.closed();
}

Octagon Octagon::join(const Octagon& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  if (m_ == o.m_) return *this;
  Octagon a = closed(), b = o.closed();
  if (a.bottom_) return b;
  if (b.bottom_) return a;
  std::vector<double> m = *a.m_;
  for (size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], (*b.m_)[i]);
  return from(std::move(m), false).closed();
}

Octagon Octagon::widen(const Octagon& o, const ThresholdSet& t) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  if (m_ == o.m_) return *this;
  std::vector<double> m = *m_;
  for (size_t i = 0; i < m.size(); ++i)
    if ((*o.m_)[i] > m[i]) m[i] = t.above((*o.m_)[i]);
  return from(std::move(m), false);
}

Octagon Octagon::narrow(const Octagon& o) const {
  if (bottom_ || o.bottom_) return bottom(n_);
  std::vector<double> m = *m_;
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] == kInf) m[i] = (*o.m_)[i];
  return from(std::move(m), false);
}

bool Octagon::leq(const Octagon& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  if (m_ == o.m_) return true;
  for (size_t i = 0; i < m_->size(); ++i)
    if ((*m_)[i] > (*o.m_)[i]) return false;
  return true;
}

bool Octagon::operator==(const Octagon& o) const {
  if (n_ != o.n_ || bottom_ != o.bottom_) return false;
  if (bottom_ || m_ == o.m_) return true;
  return *m_ == *o.m_;
}

std::vector<std::string> Octagon::constraints(const std::vector<std::string>& names) const {
  std::vector<std::string> out;
  if (bottom_) {
    out.push_back("_|_");
    return out;
  }
  auto term = [&](int idx, bool positive) {
    bool plus = (idx % 2 == 0) == positive;
    return std::string(plus ? "+" : "-") + names[idx / 2];
  };
  int d = 2 * n_;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      double c = at(a, b);
      if (c == kInf) continue;
      int ta = b ^ 1, tb = a ^ 1;  // coherent twin
      if (std::make_pair(ta, tb) < std::make_pair(a, b) && at(ta, tb) == c) continue;
      if ((a ^ 1) == b) {
        out.push_back(term(b, true) + " <= " + bound_text(half_up(c)));
      } else {
        out.push_back(term(b, true) + " " + term(a, false) + " <= " + bound_text(c));
      }
    }
  return out;
}

}  // namespace miniastree
