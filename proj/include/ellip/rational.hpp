#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <ostream>
#include <string>

#include "ellip/int128.hpp"

namespace ellip {

// Exact rational scalar over 128-bit integers. Always stored reduced with
// den > 0. Large enough for every exact computation here (adjugates, harmonic
// nullspaces, theta coefficients at desk scale); arithmetic is overflow-checked.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(i128 n) : num_(n), den_(1) {}
  Rat(i64 n) : num_(n), den_(1) {}
  Rat(int n) : num_(n), den_(1) {}
  Rat(i128 n, i128 d) : num_(n), den_(d) { reduce(); }

  i128 num() const { return num_; }
  i128 den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const { return (double)num_ / (double)den_; }

  std::string to_string() const {
    if (den_ == 1) return i128_to_string(num_);
    return i128_to_string(num_) + "/" + i128_to_string(den_);
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(add_checked(mul_checked(a.num_, b.den_), mul_checked(b.num_, a.den_)),
               mul_checked(a.den_, b.den_));
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat(add_checked(mul_checked(a.num_, b.den_), -mul_checked(b.num_, a.den_)),
               mul_checked(a.den_, b.den_));
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    // Cross-reduce first so intermediates stay small.
    i128 g1 = gcd_i128(a.num_, b.den_), g2 = gcd_i128(b.num_, a.den_);
    i128 n = mul_checked(a.num_ / (g1 ? g1 : 1), b.num_ / (g2 ? g2 : 1));
    i128 d = mul_checked(a.den_ / (g2 ? g2 : 1), b.den_ / (g1 ? g1 : 1));
    Rat r;
    r.num_ = n;
    r.den_ = d;
    r.fix_sign();
    return r;
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) fail(Errc::NonInvertible, "rational division by zero");
    return a * Rat(b.den_, b.num_);
  }
  Rat operator-() const {
    Rat r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rat& operator+=(const Rat& b) { return *this = *this + b; }
  Rat& operator-=(const Rat& b) { return *this = *this - b; }
  Rat& operator*=(const Rat& b) { return *this = *this * b; }
  Rat& operator/=(const Rat& b) { return *this = *this / b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return mul_checked(a.num_, b.den_) < mul_checked(b.num_, a.den_);
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

 private:
  void reduce() {
    if (den_ == 0) fail(Errc::NonInvertible, "rational with zero denominator");
    i128 g = gcd_i128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    fix_sign();
  }
  void fix_sign() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  i128 num_;
  i128 den_;
};

inline Rat abs(const Rat& r) { return r.num() < 0 ? -r : r; }

}  // namespace ellip

// Registration as an Eigen scalar, for Eigen::Matrix<Rat, ...> matrices in the
// exact-arithmetic paths (adjugate, harmonic nullspace).
namespace Eigen {
template <>
struct NumTraits<ellip::Rat> {
  using Real = ellip::Rat;
  using NonInteger = ellip::Rat;
  using Literal = ellip::Rat;
  using Nested = ellip::Rat;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 10,
    MulCost = 10,
  };
  static inline Real epsilon() { return ellip::Rat(0); }
  static inline Real dummy_precision() { return ellip::Rat(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
