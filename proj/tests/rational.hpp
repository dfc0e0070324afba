#pragma once

#include <stdexcept>

namespace testutil {

// Minimal exact rational over __int128 for golden-value verification. The
// quantities involved stay tiny (denominators in the hundreds), so overflow
// is not a concern.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }

  static __int128 gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend Rational operator+(Rational a, Rational b) {
    return make(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return make(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) {
    return make(a.num * b.num, a.den * b.den);
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
    return make(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    Rational r;
    r.num = n;
    r.den = d;
    r.normalize();
    return r;
  }
};

}  // namespace testutil
