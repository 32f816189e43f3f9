#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace liftlab {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

// Base error type; subclasses distinguish format errors from contract violations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};

inline Int pow2i(std::uint64_t e) {
  Int r = 1;
  return r << e;
}

// 2^e for signed e, as a rational.
inline Rat pow2r(std::int64_t e) {
  if (e >= 0) return Rat(pow2i(static_cast<std::uint64_t>(e)));
  return Rat(1, pow2i(static_cast<std::uint64_t>(-e)));
}

inline Rat rat_pow(const Rat& base, std::uint64_t e) {
  Rat acc = 1, b = base;
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

// base^e for integer e (base != 0 when e < 0).
inline Rat rat_pow_signed(const Rat& base, std::int64_t e) {
  if (e >= 0) return rat_pow(base, static_cast<std::uint64_t>(e));
  if (base == 0) throw DomainError("rat_pow_signed: 0 to a negative power");
  return rat_pow(1 / base, static_cast<std::uint64_t>(-e));
}

inline bool is_power_of_two(const Int& v) {
  if (v <= 0) return false;
  Int w = v;
  while ((w & 1) == 0) w >>= 1;
  return w == 1;
}

// floor(log2(v)) for v >= 1.
inline std::uint64_t ilog2(const Int& v) {
  if (v < 1) throw DomainError("ilog2: argument < 1");
  Int w = v;
  std::uint64_t r = 0;
  while (w > 1) {
    w >>= 1;
    ++r;
  }
  return r;
}

// Exact log2 if the rational is a power of two.
inline bool log2_exact(const Rat& r, std::int64_t& out) {
  if (r <= 0) return false;
  Int num = numerator(r), den = denominator(r);
  if (!is_power_of_two(num) || !is_power_of_two(den)) return false;
  out = static_cast<std::int64_t>(ilog2(num)) - static_cast<std::int64_t>(ilog2(den));
  return true;
}

inline std::string rat_str(const Rat& r) {
  return r.str();
}

// Accepts "p", "p/q", or decimal "a.b".
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      Int num(s.substr(0, slash));
      Int den(s.substr(slash + 1));
      if (den == 0) throw ParseError("rational with zero denominator: " + s);
      return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
      if (tail.empty()) throw ParseError("bad decimal: " + s);
      bool neg = !head.empty() && head[0] == '-';
      if (neg) head = head.substr(1);
      Int ipart = head.empty() ? Int(0) : Int(head);
      Int tnum(tail);
      Int tden = 1;
      for (std::size_t i = 0; i < tail.size(); ++i) tden *= 10;
      Rat v = Rat(ipart) + Rat(tnum, tden);
      return neg ? -v : v;
    }
    return Rat(Int(s));
  } catch (const std::exception& e) {
    throw ParseError("bad rational '" + s + "': " + e.what());
  }
}

}  // namespace liftlab
