#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "symred/common.hpp"

namespace symred {

// Exact rational on int64 with __int128 intermediates. All lattice, hull and
// Ehrhart arithmetic runs through this type; anything that would leave the
// int64 range throws overflow_error instead of wrapping.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}  // implicit: integers promote freely
  Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from128((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from128((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw overflow_error("rational division by zero");
    return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& b) { return *this = *this + b; }
  Rat& operator-=(const Rat& b) { return *this = *this - b; }
  Rat& operator*=(const Rat& b) { return *this = *this * b; }
  Rat& operator/=(const Rat& b) { return *this = *this / b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  Rat abs() const { return num_ < 0 ? Rat(-num_, den_) : *this; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // Floor as an integer (den_ > 0 invariant makes this a plain division fixup).
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "p", "p/q", with optional sign. Throws malformed_config on junk.
  static Rat parse(const std::string& s) {
    if (s.empty()) throw malformed_config("empty rational literal");
    size_t slash = s.find('/');
    try {
      size_t pos = 0;
      if (slash == std::string::npos) {
        long long n = std::stoll(s, &pos);
        if (pos != s.size()) throw malformed_config("bad rational literal '" + s + "'");
        return Rat(n);
      }
      long long n = std::stoll(s.substr(0, slash), &pos);
      if (pos != slash) throw malformed_config("bad rational literal '" + s + "'");
      long long d = std::stoll(s.substr(slash + 1), &pos);
      if (pos != s.size() - slash - 1) throw malformed_config("bad rational literal '" + s + "'");
      return Rat(n, d);
    } catch (const std::invalid_argument&) {
      throw malformed_config("bad rational literal '" + s + "'");
    } catch (const std::out_of_range&) {
      throw malformed_config("rational literal out of range '" + s + "'");
    }
  }

 private:
  static Rat from128(__int128 n, __int128 d) {
    if (d == 0) throw overflow_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw overflow_error("rational out of int64 range");
    Rat r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  void normalize() {
    Rat r = from128(num_, den_);
    num_ = r.num_;
    den_ = r.den_;
  }

  long long num_;
  long long den_;  // > 0
};

using ratvec = std::vector<Rat>;
using ratmat = std::vector<ratvec>;

inline long long lcm_ll(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  __int128 l = (__int128)(a / std::gcd(a, b)) * b;
  if (l > INT64_MAX || l < INT64_MIN) throw overflow_error("lcm out of range");
  long long r = static_cast<long long>(l);
  return r < 0 ? -r : r;
}

}  // namespace symred
