#pragma once

#include <cstdint>
#include <numeric>

namespace gaplab::detail {

// Signals that an exact-rational computation left the representable range;
// callers redo the computation in floating point.
struct RationalOverflow {};

// Minimal exact rational on __int128 with overflow detection. Covers just
// what the order-by-order series recursion needs: +, -, *, /, compare.
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(__int128 n, __int128 d) : num_(n), den_(d) { normalize(); }

  Rational operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const {
    return Rational(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator*(const Rational& o) const {
    return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw RationalOverflow{};  // treated as a bail-out, not a result
    return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
  }
  Rational operator-() const { return Rational(-num_, den_); }

  bool is_zero() const { return num_ == 0; }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }

  double to_double() const {
    return double(static_cast<long double>(num_) / static_cast<long double>(den_));
  }

 private:
  __int128 num_ = 0;
  __int128 den_ = 1;

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den_ == 0) throw RationalOverflow{};
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    const __int128 g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  static __int128 checked_mul(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw RationalOverflow{};
    return r;
  }
  static __int128 checked_add(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw RationalOverflow{};
    return r;
  }
  static __int128 checked_sub(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw RationalOverflow{};
    return r;
  }
};

}  // namespace gaplab::detail
