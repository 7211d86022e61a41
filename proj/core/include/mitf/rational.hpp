#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "mitf/errors.hpp"

namespace mitf {

// Exact rational with 64-bit numerator/denominator, 128-bit intermediates.
// All grid/tile combinatorics run on these; doubles appear only at the
// quadrature layer.
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  static Rat pow2(int e) {
    if (e >= 0) {
      if (e > 62) raise(Errc::ScaleOutOfWindow, "2^" + std::to_string(e));
      return Rat(std::int64_t(1) << e, 1);
    }
    if (e < -62) raise(Errc::ScaleOutOfWindow, "2^" + std::to_string(e));
    return Rat(1, std::int64_t(1) << (-e));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return double(num_) / double(den_); }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat::from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) raise(Errc::Internal, "rational division by zero");
    return Rat::from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat operator-() const {
    Rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return i128(a.num_) * b.den_ < i128(b.num_) * a.den_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return i128(a.num_) * b.den_ <= i128(b.num_) * a.den_; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  // Largest integer <= value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  static Rat from128(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      raise(Errc::ScaleOutOfWindow, "rational overflow");
    Rat r;
    r.num_ = std::int64_t(n);
    r.den_ = std::int64_t(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ == 0) raise(Errc::Internal, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_, den_;
};

// Closed rational interval [lo, hi]; used for dilated boxes and membership
// predicates. Dyadic grid intervals themselves are half-open and live in
// DyadicInterval.
struct RatIv {
  Rat lo, hi;

  Rat length() const { return hi - lo; }
  Rat center() const { return (lo + hi) * Rat(1, 2); }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  bool contains(const RatIv& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const RatIv& o) const { return !(hi < o.lo || o.hi < lo); }

  // Same center, length scaled by c.
  RatIv dilate_center(const Rat& c) const {
    Rat mid = center(), half = length() * c * Rat(1, 2);
    return {mid - half, mid + half};
  }
  // Endpoints scaled by c (dilation from the origin); c may be negative.
  RatIv dilate_origin(const Rat& c) const {
    Rat a = lo * c, b = hi * c;
    return a <= b ? RatIv{a, b} : RatIv{b, a};
  }
};

}  // namespace mitf
