#pragma once

// Exact arithmetic on logarithmic quantities (entropies, deficiencies).
//
// A LogVal stores value = log2(ratio) / scale for a positive rational ratio
// and a positive integer scale. Entropy-type quantities never leave this
// form: comparisons against other LogVals or rational bit counts reduce to
// rational power comparisons and stay exact. The two spots where a genuinely
// irrational threshold appears (c * sqrt(m) bits with odd log2(m)) are
// decided by rational fast paths where possible and otherwise by MPFR
// interval refinement, which terminates because log2 of a rational that is
// not a power of two is transcendental while the threshold is algebraic.

#include <mpfr.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "liftlab/rational.hpp"

namespace liftlab {

enum class Cmp { lt, eq, gt };

struct LogVal {
  Rat ratio = 1;       // > 0
  std::uint32_t scale = 1;  // >= 1

  LogVal() = default;
  LogVal(Rat r, std::uint32_t s = 1) : ratio(std::move(r)), scale(s) {
    if (ratio <= 0) throw DomainError("LogVal: ratio must be positive");
    if (scale == 0) throw DomainError("LogVal: zero scale");
  }

  static LogVal zero() { return LogVal(Rat(1), 1); }

  bool is_zero() const { return ratio == 1; }

  // value expressed exactly as rational bits, when possible
  std::optional<Rat> as_rat_bits() const {
    std::int64_t e;
    if (!log2_exact(ratio, e)) return std::nullopt;
    return Rat(Int(e), Int(scale));
  }

  // this + other
  LogVal plus(const LogVal& o) const {
    return LogVal(rat_pow(ratio, o.scale) * rat_pow(o.ratio, scale),
                  scale * o.scale);
  }
  // this - other (result may be negative, i.e. ratio < 1)
  LogVal minus(const LogVal& o) const {
    return LogVal(rat_pow(ratio, o.scale) / rat_pow(o.ratio, scale),
                  scale * o.scale);
  }
  // this + (p/q) bits; q must divide into the representation, so shift by
  // integer bits only after widening the scale.
  LogVal plus_bits(const Rat& bits) const {
    Int num = numerator(bits), den = denominator(bits);
    if (den > 0xffffffffu || Int(scale) * den > 0xffffffffu)
      throw DomainError("LogVal::plus_bits: scale overflow");
    auto q = static_cast<std::uint32_t>(den);
    // widen: value = log2(ratio^q) / (scale*q), then add num*scale bits on top
    Rat wide = rat_pow(ratio, q);
    std::int64_t shift = static_cast<std::int64_t>(num) * scale;
    return LogVal(wide * rat_pow_signed(Rat(2), shift), scale * q);
  }

  double approx() const;

  std::string str() const {
    std::ostringstream os;
    os << "log2(" << ratio << ")";
    if (scale != 1) os << "/" << scale;
    return os.str();
  }
};

inline Cmp cmp_rat(const Rat& a, const Rat& b) {
  if (a < b) return Cmp::lt;
  if (a == b) return Cmp::eq;
  return Cmp::gt;
}

// compare log2(ra)/sa with log2(rb)/sb: reduces to ra^sb vs rb^sa
inline Cmp cmp(const LogVal& a, const LogVal& b) {
  return cmp_rat(rat_pow(a.ratio, b.scale), rat_pow(b.ratio, a.scale));
}

// compare log2(ratio)/scale with p/q bits: reduces to ratio^q vs 2^(p*scale)
inline Cmp cmp_bits(const LogVal& a, const Rat& bits) {
  Int p = numerator(bits), q = denominator(bits);
  if (q > 0xffffffffu) throw DomainError("cmp_bits: denominator too large");
  Rat lhs = rat_pow(a.ratio, static_cast<std::uint64_t>(q));
  if (p * a.scale > (1 << 30) || p * a.scale < -(1 << 30))
    throw DomainError("cmp_bits: exponent too large");
  Rat rhs = pow2r(static_cast<std::int64_t>(p * Int(a.scale)));
  return cmp_rat(lhs, rhs);
}

inline bool leq_bits(const LogVal& a, const Rat& bits) {
  return cmp_bits(a, bits) != Cmp::gt;
}
inline bool geq_bits(const LogVal& a, const Rat& bits) {
  return cmp_bits(a, bits) != Cmp::lt;
}

namespace detail {

// RAII mpfr value
struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

// directed-rounding bracket of log2(r) into [lo, hi]
inline void log2_bracket(const Rat& r, mpfr_prec_t prec, mpfr_t lo, mpfr_t hi) {
  Mpfr t(prec);
  mpfr_set_q(t.v, r.backend().data(), MPFR_RNDD);
  mpfr_log2(lo, t.v, MPFR_RNDD);
  mpfr_set_q(t.v, r.backend().data(), MPFR_RNDU);
  mpfr_log2(hi, t.v, MPFR_RNDU);
}

constexpr mpfr_prec_t kPrecStart = 96;
constexpr mpfr_prec_t kPrecCap = 1 << 14;

}  // namespace detail

inline double LogVal::approx() const {
  detail::Mpfr lo(64), hi(64);
  detail::log2_bracket(ratio, 64, lo.v, hi.v);
  return mpfr_get_d(lo.v, MPFR_RNDN) / scale;
}

// Exact comparison of log2(ratio)/scale against coef * sqrt(2^t) bits,
// coef a nonnegative rational. Used for the paper's m^(1/2)-type thresholds.
inline Cmp cmp_sqrt_bits(const LogVal& a, const Rat& coef, std::uint32_t t) {
  if (coef < 0) throw DomainError("cmp_sqrt_bits: negative coefficient");
  if (t % 2 == 0) {
    // sqrt(2^t) = 2^(t/2) is an integer: fully rational comparison
    return cmp_bits(a, coef * pow2r(t / 2));
  }
  // threshold = coef * 2^((t-1)/2) * sqrt(2)
  Rat c = coef * pow2r((t - 1) / 2);
  if (c == 0) return cmp_bits(a, Rat(0));
  std::int64_t e;
  if (log2_exact(a.ratio, e)) {
    // lhs = e/scale rational; rhs = c*sqrt(2) irrational > 0
    Rat lhs(Int(e), Int(a.scale));
    if (lhs <= 0) return Cmp::lt;
    // compare lhs^2 vs 2*c^2; equality impossible (sqrt(2) irrational)
    Cmp sq = cmp_rat(lhs * lhs, 2 * c * c);
    return sq == Cmp::eq ? throw DomainError("cmp_sqrt_bits: impossible equality")
                         : sq;
  }
  // lhs transcendental, rhs algebraic: refine brackets until separated
  for (mpfr_prec_t prec = detail::kPrecStart; prec <= detail::kPrecCap; prec *= 2) {
    detail::Mpfr lo(prec), hi(prec), rlo(prec), rhi(prec), c2(prec);
    detail::log2_bracket(a.ratio, prec, lo.v, hi.v);
    mpfr_div_ui(lo.v, lo.v, a.scale, MPFR_RNDD);
    mpfr_div_ui(hi.v, hi.v, a.scale, MPFR_RNDU);
    mpfr_sqrt_ui(rlo.v, 2, MPFR_RNDD);
    mpfr_sqrt_ui(rhi.v, 2, MPFR_RNDU);
    mpfr_set_q(c2.v, c.backend().data(), MPFR_RNDD);
    mpfr_mul(rlo.v, rlo.v, c2.v, MPFR_RNDD);
    mpfr_set_q(c2.v, c.backend().data(), MPFR_RNDU);
    mpfr_mul(rhi.v, rhi.v, c2.v, MPFR_RNDU);
    if (mpfr_cmp(hi.v, rlo.v) < 0) return Cmp::lt;
    if (mpfr_cmp(lo.v, rhi.v) > 0) return Cmp::gt;
  }
  throw DomainError("cmp_sqrt_bits: precision cap exceeded");
}

// A threshold in bits that is either an exact rational or c * sqrt(m).
struct BitsBound {
  enum class Kind { rational, sqrt_m } kind = Kind::rational;
  Rat bits = 0;     // rational case, or the coefficient c in c*sqrt(m)
  std::uint32_t m = 0;  // sqrt case only; must be a power of two

  static BitsBound rational(Rat b) {
    BitsBound r;
    r.kind = Kind::rational;
    r.bits = std::move(b);
    return r;
  }
  static BitsBound sqrt_m(std::uint32_t m, Rat coef = 1) {
    if (!is_power_of_two(Int(m))) throw DomainError("BitsBound: m not a power of two");
    BitsBound r;
    r.kind = Kind::sqrt_m;
    r.bits = std::move(coef);
    r.m = m;
    return r;
  }

  std::string str() const {
    if (kind == Kind::rational) return rat_str(bits);
    std::uint32_t t = static_cast<std::uint32_t>(ilog2(Int(m)));
    if (t % 2 == 0) return rat_str(bits * pow2r(t / 2));
    return rat_str(bits) + "*sqrt(" + std::to_string(m) + ")";
  }
};

inline Cmp cmp_bound(const LogVal& a, const BitsBound& b) {
  if (b.kind == BitsBound::Kind::rational) return cmp_bits(a, b.bits);
  return cmp_sqrt_bits(a, b.bits, static_cast<std::uint32_t>(ilog2(Int(b.m))));
}

inline bool leq_bound(const LogVal& a, const BitsBound& b) {
  return cmp_bound(a, b) != Cmp::gt;
}

}  // namespace liftlab
