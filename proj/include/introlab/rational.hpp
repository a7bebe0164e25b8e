#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace introlab {

// Exact nonnegative rational with overflow-checked arithmetic.  Question
// distributions are mixtures of uniform draws over small supports, so
// numerators and denominators stay tiny; the checks are a guard, not a
// bignum substitute.
struct Rational {
  uint64_t num = 0;
  uint64_t den = 1;

  Rational() = default;
  Rational(uint64_t n, uint64_t d) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    reduce();
  }

  static Rational zero() { return Rational(); }
  static Rational one() { return Rational(1, 1); }

  void reduce() {
    uint64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static uint64_t checked_mul(uint64_t a, uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a)
      throw std::overflow_error("Rational: multiplication overflow");
    return a * b;
  }

  Rational operator*(const Rational& o) const {
    Rational a(num, o.den);  // cross-reduce first
    Rational b(o.num, den);
    Rational r;
    r.num = checked_mul(a.num, b.num);
    r.den = checked_mul(a.den, b.den);
    r.reduce();
    return r;
  }

  Rational operator+(const Rational& o) const {
    uint64_t g = std::gcd(den, o.den);
    uint64_t l = checked_mul(den / g, o.den);
    uint64_t x = checked_mul(num, l / den);
    uint64_t y = checked_mul(o.num, l / o.den);
    if (x > UINT64_MAX - y) throw std::overflow_error("Rational: addition overflow");
    Rational r;
    r.num = x + y;
    r.den = l;
    r.reduce();
    return r;
  }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return static_cast<__uint128_t>(num) * o.den < static_cast<__uint128_t>(o.num) * den;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace introlab
