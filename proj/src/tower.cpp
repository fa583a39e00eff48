#include "tower.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace coarsening {

namespace {
constexpr double kTwo53 = 9007199254740992.0;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
}  // namespace

Tower Tower::make(int depth, double v) {
  COARSENING_REQUIRE(depth >= 0, "Tower: negative depth");
  Tower t;
  t.depth_ = depth;
  t.v_ = v;
  while (t.depth_ > 0 && t.v_ <= kLogMax) {
    t.v_ = std::exp(t.v_);
    --t.depth_;
  }
  return t;
}

double Tower::to_double() const {
  return depth_ == 0 ? v_ : std::numeric_limits<double>::infinity();
}

std::string Tower::describe() const {
  std::string out = shortest(v_);
  for (int i = 0; i < depth_; ++i) out = "exp(" + out + ")";
  return out;
}

bool operator<(const Tower& a, const Tower& b) {
  if (a.depth_ != b.depth_) {
    // A depth >= 1 value exceeds every double.
    return a.depth_ < b.depth_;
  }
  return a.v_ < b.v_;
}

Tower log(const Tower& x) {
  if (x.depth() == 0) {
    COARSENING_REQUIRE(x.top() > 0.0, "Tower log: argument must be positive");
    return Tower(std::log(x.top()));
  }
  return Tower::make(x.depth() - 1, x.top());
}

Tower exp(const Tower& x) {
  if (x.depth() == 0) {
    if (x.top() <= kLogMax) return Tower(std::exp(x.top()));
    return Tower::make(1, x.top());
  }
  return Tower::make(x.depth() + 1, x.top());
}

Tower add(const Tower& a, const Tower& b) {
  if (a.is_double() && b.is_double()) {
    const double s = a.top() + b.top();
    if (std::isfinite(s)) return Tower(s);
    // Both large and positive.
    const double la = std::log(a.top());
    const double lb = std::log(b.top());
    const double hi = std::max(la, lb);
    return Tower::make(1, hi + std::log1p(std::exp(std::min(la, lb) - hi)));
  }
  const Tower& hi = a < b ? b : a;
  const Tower& lo = a < b ? a : b;
  if (hi.depth() >= 2) {
    return hi == lo ? scale(hi, 2.0) : hi;
  }
  // hi has depth 1, lo is a double or a depth-1 tower.
  if (lo.is_double() && lo.top() == 0.0) return hi;
  const double sign = lo.is_double() && lo.top() < 0.0 ? -1.0 : 1.0;
  const double log_lo = lo.is_double() ? std::log(std::abs(lo.top())) : lo.top();
  return Tower::make(1, hi.top() + std::log1p(sign * std::exp(log_lo - hi.top())));
}

Tower mul(const Tower& a, const Tower& b) {
  if (a.is_double() && b.is_double()) {
    const double p = a.top() * b.top();
    if (std::isfinite(p)) return Tower(p);
  }
  COARSENING_REQUIRE(a > Tower(0.0) && b > Tower(0.0), "Tower mul: large factors must be positive");
  return exp(add(log(a), log(b)));
}

Tower scale(const Tower& x, double c) {
  COARSENING_REQUIRE(c > 0.0, "Tower scale: factor must be positive");
  return mul(x, Tower(c));
}

Tower pow(const Tower& x, double p) {
  COARSENING_REQUIRE(p > 0.0, "Tower pow: exponent must be positive");
  if (x.is_double()) {
    const double r = std::pow(x.top(), p);
    if (std::isfinite(r)) return Tower(r);
  }
  return exp(scale(log(x), p));
}

Tower floor(const Tower& x) {
  if (exact_integer_range(x)) return Tower(std::floor(x.top()));
  return x;
}

bool exact_integer_range(const Tower& x) {
  return x.is_double() && std::abs(x.top()) < kTwo53;
}

double ratio(const Tower& a, const Tower& b) {
  if (a.is_double() && b.is_double()) {
    const double r = a.top() / b.top();
    if (std::isfinite(r) || std::isinf(a.top())) return r;
  }
  const Tower la = log(a);
  const Tower lb = log(b);
  if (la.is_double() && lb.is_double()) return std::exp(la.top() - lb.top());
  if (la == lb) return 1.0;
  return la < lb ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace coarsening
