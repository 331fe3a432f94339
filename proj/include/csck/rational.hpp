#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <numbers>
#include <string>

#include "csck/errors.hpp"

namespace csck {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& q) { return static_cast<double>(q); }

/// Canonical "p/q" (or "p" when q == 1) formatting used by every serializer.
inline std::string rat_to_string(const Rat& q) {
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Parses "p", "p/q" or a plain integer literal; rejects anything else.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw SchemaError("empty rational literal");
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    const BigInt num(s.substr(0, slash));
    const BigInt den(s.substr(slash + 1));
    if (den == 0) throw SchemaError("rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::runtime_error& e) {
    throw SchemaError("bad rational literal '" + s + "': " + e.what());
  }
}

inline BigInt floor_rat(const Rat& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt quot = n / d;
  if (n % d != 0 && n < 0) --quot;
  return quot;
}

inline BigInt ceil_rat(const Rat& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt quot = n / d;
  if (n % d != 0 && n > 0) ++quot;
  return quot;
}

/// An exact rational times a symbolic power of 2*pi. Keeping the transcendental
/// factor as a tag lets intersection-theoretic identities cancel it exactly.
struct TwoPiScaled {
  Rat value{0};
  int tau{0};  // represented number = value * (2*pi)^tau

  TwoPiScaled() = default;
  TwoPiScaled(Rat v, int t) : value(std::move(v)), tau(t) {}

  bool is_zero() const { return value == 0; }

  friend TwoPiScaled operator+(const TwoPiScaled& a, const TwoPiScaled& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.tau != b.tau) throw DomainError("adding 2pi-scaled values of different scale");
    return {a.value + b.value, a.tau};
  }
  friend TwoPiScaled operator-(const TwoPiScaled& a, const TwoPiScaled& b) {
    return a + TwoPiScaled{-b.value, b.tau};
  }
  friend TwoPiScaled operator*(const TwoPiScaled& a, const TwoPiScaled& b) {
    return {a.value * b.value, a.tau + b.tau};
  }
  friend TwoPiScaled operator*(const Rat& c, const TwoPiScaled& a) { return {c * a.value, a.tau}; }
  friend TwoPiScaled operator/(const TwoPiScaled& a, const TwoPiScaled& b) {
    if (b.value == 0) throw DomainError("division by zero 2pi-scaled value");
    return {a.value / b.value, a.tau - b.tau};
  }
  friend bool operator==(const TwoPiScaled& a, const TwoPiScaled& b) {
    if (a.is_zero() && b.is_zero()) return true;
    return a.tau == b.tau && a.value == b.value;
  }

  /// Exact rational part after checking the scale has fully cancelled.
  Rat as_plain_rational() const {
    if (!is_zero() && tau != 0) throw DomainError("2pi scale did not cancel");
    return value;
  }

  double as_double() const {
    double x = to_double(value);
    for (int i = 0; i < tau; ++i) x *= 2.0 * std::numbers::pi;
    for (int i = 0; i > tau; --i) x /= 2.0 * std::numbers::pi;
    return x;
  }

  std::string str() const {
    if (tau == 0 || is_zero()) return rat_to_string(value);
    return rat_to_string(value) + " * (2pi)^" + std::to_string(tau);
  }
};

}  // namespace csck
