#pragma once

#include <string>

namespace coarsening {

/// A real number stored as exp^depth(v). Depth 0 is an ordinary double of
/// any sign; depth >= 1 values are positive and canonical, with
/// v > log(DBL_MAX), so ordering is by depth first and then by v.
class Tower {
 public:
  constexpr Tower() = default;
  constexpr Tower(double v) : v_(v) {}  // NOLINT: implicit from double is intended
  static Tower make(int depth, double v);

  int depth() const { return depth_; }
  double top() const { return v_; }
  bool is_double() const { return depth_ == 0; }
  /// The value as a double; +inf when depth >= 1.
  double to_double() const;

  /// "exp(exp(123.4))" for towers, shortest round-trip text for doubles.
  std::string describe() const;

  friend bool operator==(const Tower& a, const Tower& b) {
    return a.depth_ == b.depth_ && a.v_ == b.v_;
  }
  friend bool operator<(const Tower& a, const Tower& b);
  friend bool operator<=(const Tower& a, const Tower& b) { return !(b < a); }
  friend bool operator>(const Tower& a, const Tower& b) { return b < a; }
  friend bool operator>=(const Tower& a, const Tower& b) { return !(a < b); }

 private:
  int depth_ = 0;
  double v_ = 0.0;
};

/// Largest finite log: log(DBL_MAX).
inline constexpr double kLogMax = 709.782712893384;

Tower log(const Tower& x);
Tower exp(const Tower& x);
Tower add(const Tower& a, const Tower& b);
Tower mul(const Tower& a, const Tower& b);
/// x * c for c > 0.
Tower scale(const Tower& x, double c);
/// x^p for x > 0, p > 0.
Tower pow(const Tower& x, double p);
/// floor for doubles below 2^53; towers and larger doubles are returned as is.
Tower floor(const Tower& x);
/// a / b as a double (0 or +inf when out of range). Both must be positive
/// unless they are plain doubles.
double ratio(const Tower& a, const Tower& b);
/// True when the value is a double small enough that floor() is exact.
bool exact_integer_range(const Tower& x);

}  // namespace coarsening
