#pragma once

// Character expectations E[chi_I(y_x)] over pointer/matrix distributions,
// the Fourier bound |E| <= (2^(-beta/2-1)(k+s))^|I|, and the uniform-
// selector search behind the Large Index Lemma.
//
// Domains: Lambda lives on [l]^k (alphabet l per coordinate); Gamma lives on
// ({+-1}^l)^k with each sign vector bit-encoded into [0, 2^l) (bit b at
// position l-1-b; bit 0 means +1, bit 1 means -1).

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/entropy.hpp"
#include "liftlab/logval.hpp"
#include "liftlab/report.hpp"

namespace liftlab {

namespace detail {

inline std::uint32_t sign_bit(std::uint32_t value, std::uint32_t pos, std::uint32_t ell) {
  return (value >> (ell - 1 - pos)) & 1u;
}

}  // namespace detail

// E_{Lambda,Gamma}[chi_I(y_x)] with chi_I(y_x) = prod_{i in I} y_i(x_i),
// as an exact rational.
inline Rat character_expectation(const FiniteDistribution& lambda,
                                 const FiniteDistribution& gamma,
                                 const std::vector<std::uint32_t>& I) {
  std::uint32_t k = lambda.coords();
  if (gamma.coords() != k) throw DomainError("character_expectation: arity mismatch");
  if (k == 0) throw DomainError("character_expectation: empty coordinate list");
  std::uint32_t ell_alpha = lambda.alphabet[0];
  for (auto a : lambda.alphabet)
    if (a != ell_alpha) throw DomainError("character_expectation: ragged pointer alphabet");
  for (auto a : gamma.alphabet)
    if (a != (1u << ell_alpha))
      throw DomainError("character_expectation: matrix alphabet must be 2^l");
  for (auto i : I)
    if (i >= k) throw DomainError("character_expectation: index out of range");
  if (lambda.points.size() * gamma.points.size() > 4000000)
    throw DomainError("character_expectation: joint support too large");

  Rat e = 0;
  for (std::size_t xi = 0; xi < lambda.points.size(); ++xi) {
    for (std::size_t yi = 0; yi < gamma.points.size(); ++yi) {
      int sign = 1;
      for (auto i : I)
        if (detail::sign_bit(gamma.points[yi][i], lambda.points[xi][i], ell_alpha)) sign = -sign;
      e += lambda.probs[xi] * gamma.probs[yi] * sign;
    }
  }
  return e;
}

struct FourierCheck {
  bool pass = false;
  bool precondition_ok = false;  // beta > 1/2
  Rat lhs = 0;                   // |E|
  std::string threshold;         // exact rational or certified decimal bracket
  std::vector<ReportLine> lines;
};

namespace detail {

// display-only approximation of (2^(-beta/2-1)(k+s))^t
inline std::string fourier_rhs_approx(const Rat& B, std::uint32_t sb, const Rat& Ds,
                                      std::uint32_t k, std::uint32_t t) {
  Mpfr a(96), b(96);
  mpfr_set_q(a.v, Ds.backend().data(), MPFR_RNDN);
  mpfr_log2(a.v, a.v, MPFR_RNDN);          // s
  mpfr_add_ui(a.v, a.v, k, MPFR_RNDN);     // k + s
  mpfr_set_q(b.v, B.backend().data(), MPFR_RNDN);
  mpfr_log2(b.v, b.v, MPFR_RNDN);
  mpfr_div_ui(b.v, b.v, 2 * sb, MPFR_RNDN);  // beta/2
  mpfr_add_ui(b.v, b.v, 1, MPFR_RNDN);
  mpfr_neg(b.v, b.v, MPFR_RNDN);
  mpfr_exp2(b.v, b.v, MPFR_RNDN);  // 2^(-beta/2-1)
  mpfr_mul(a.v, a.v, b.v, MPFR_RNDN);
  mpfr_pow_ui(a.v, a.v, t, MPFR_RNDN);
  std::ostringstream os;
  os << "~" << mpfr_get_d(a.v, MPFR_RNDN);
  return os.str();
}

// decide |e| <= (2^(-beta/2-1)(k+s))^t exactly.
// beta = log2(B)/sb, s = log2(Ds) (scale 1), t >= 1, e >= 0.
inline bool fourier_leq(const Rat& e, const Rat& B, std::uint32_t sb, const Rat& Ds,
                        std::uint32_t k, std::uint32_t t, std::string& threshold_repr) {
  threshold_repr = fourier_rhs_approx(B, sb, Ds, k, t);
  std::int64_t j;
  if (log2_exact(Ds, j)) {
    // s integer: raise both sides of e*2^t*B^(t/(2sb)) <= (k+s)^t
    // to the power 2sb; everything is rational
    Rat lhs = rat_pow(e, 2 * sb) * pow2r(static_cast<std::int64_t>(2) * t * sb) * rat_pow(B, t);
    Rat rhs = rat_pow(Rat(k) + Rat(j), static_cast<std::uint64_t>(2) * t * sb);
    return lhs <= rhs;
  }
  if (e == 0) return true;
  // s irrational: interval refinement; equality impossible since the left
  // side is algebraic and (k + log2 Ds)^t is transcendental
  for (mpfr_prec_t prec = detail::kPrecStart; prec <= detail::kPrecCap; prec *= 2) {
    Mpfr llo(prec), lhi(prec), rlo(prec), rhi(prec), a(prec), b(prec);
    // L = log2(e) + t + t*log2(B)/(2sb)
    log2_bracket(e, prec, llo.v, lhi.v);
    log2_bracket(B, prec, a.v, b.v);
    mpfr_mul_ui(a.v, a.v, t, MPFR_RNDD);
    mpfr_div_ui(a.v, a.v, 2 * sb, MPFR_RNDD);
    mpfr_mul_ui(b.v, b.v, t, MPFR_RNDU);
    mpfr_div_ui(b.v, b.v, 2 * sb, MPFR_RNDU);
    mpfr_add(llo.v, llo.v, a.v, MPFR_RNDD);
    mpfr_add(lhi.v, lhi.v, b.v, MPFR_RNDU);
    mpfr_add_ui(llo.v, llo.v, t, MPFR_RNDD);
    mpfr_add_ui(lhi.v, lhi.v, t, MPFR_RNDU);
    // R = t * log2(k + log2(Ds))
    log2_bracket(Ds, prec, a.v, b.v);
    mpfr_add_ui(a.v, a.v, k, MPFR_RNDD);
    mpfr_add_ui(b.v, b.v, k, MPFR_RNDU);
    mpfr_log2(rlo.v, a.v, MPFR_RNDD);
    mpfr_log2(rhi.v, b.v, MPFR_RNDU);
    mpfr_mul_ui(rlo.v, rlo.v, t, MPFR_RNDD);
    mpfr_mul_ui(rhi.v, rhi.v, t, MPFR_RNDU);
    if (mpfr_cmp(lhi.v, rlo.v) < 0) return true;
    if (mpfr_cmp(llo.v, rhi.v) > 0) return false;
  }
  throw DomainError("fourier_leq: precision cap exceeded");
}

}  // namespace detail

// Lemma-A.1-style check: beta = blockwise min-entropy of Lambda, s =
// deficiency of Gamma, bound (2^(-beta/2-1))^|I| (k+s)^|I|. The precondition
// beta > 1/2 is reported, not asserted.
inline FourierCheck check_fourier_bound(const FiniteDistribution& lambda,
                                        const FiniteDistribution& gamma,
                                        const std::vector<std::uint32_t>& I) {
  FourierCheck out;
  std::uint32_t k = lambda.coords();
  Rat e = character_expectation(lambda, gamma, I);
  out.lhs = abs(e);

  auto beta = lambda.blockwise_min_entropy();
  LogVal s = gamma.deficiency();
  out.precondition_ok = cmp_bits(beta.value, Rat(1, 2)) == Cmp::gt;
  out.lines.push_back({"beta_gt_half", beta.value.str(), "1/2 bits", out.precondition_ok});

  std::uint32_t t = static_cast<std::uint32_t>(I.size());
  if (t == 0) {
    out.pass = out.lhs <= 1;
    out.threshold = "1";
  } else {
    out.pass = detail::fourier_leq(out.lhs, beta.value.ratio, beta.value.scale, s.ratio, k, t,
                                   out.threshold);
  }
  out.lines.push_back({"fourier_bound", rat_str(out.lhs), out.threshold, out.pass});
  return out;
}

struct UniformSelectorResult {
  bool found = false;
  Tuple x;
  Rat epsilon = 0;         // uniformity of the winner (or best seen)
  bool best_infinite = true;
  Tuple best_x;
  std::vector<ReportLine> lines;  // goodness certificate per I for the winner
};

// Scan supp(X) in lex order; return the first x whose induced gadget-output
// distribution Ind_l^k(x, y) is eps_target-multiplicatively uniform. The
// goodness certificate compares |E_y[chi_I(y_x)]| against k^(-10|I|) per I.
inline UniformSelectorResult find_uniform_selector(const FiniteDistribution& lambda,
                                                   const FiniteDistribution& gamma,
                                                   const Rat& eps_target) {
  std::uint32_t k = lambda.coords();
  if (gamma.coords() != k) throw DomainError("find_uniform_selector: arity mismatch");
  std::uint32_t ell = lambda.alphabet[0];
  if (k > 16) throw DomainError("find_uniform_selector: k > 16");

  std::vector<Tuple> full_outputs;
  for (std::uint32_t msk = 0; msk < (1u << k); ++msk) {
    Tuple o(k);
    for (std::uint32_t i = 0; i < k; ++i) o[i] = (msk >> i) & 1u;
    full_outputs.push_back(o);
  }

  UniformSelectorResult res;
  for (const auto& x : lambda.points) {
    std::vector<std::pair<Tuple, Rat>> weights;
    for (std::size_t yi = 0; yi < gamma.points.size(); ++yi) {
      Tuple o(k);
      for (std::uint32_t i = 0; i < k; ++i)
        o[i] = detail::sign_bit(gamma.points[yi][i], x[i], ell);
      weights.emplace_back(std::move(o), gamma.probs[yi]);
    }
    auto dist = FiniteDistribution::from_weights(std::vector<std::uint32_t>(k, 2),
                                                 std::move(weights));
    auto eps = multiplicative_uniformity(dist, full_outputs);
    if (eps && (res.best_infinite || *eps < res.epsilon)) {
      res.best_infinite = false;
      res.epsilon = *eps;
      res.best_x = x;
    }
    if (eps && *eps <= eps_target) {
      res.found = true;
      res.x = x;
      // goodness certificate for the winner
      FiniteDistribution point_lambda = FiniteDistribution::uniform_over(lambda.alphabet, {x});
      for (std::uint32_t msk = 1; msk < (1u << k); ++msk) {
        std::vector<std::uint32_t> I;
        for (std::uint32_t i = 0; i < k; ++i)
          if (msk & (1u << i)) I.push_back(i);
        Rat g = abs(character_expectation(point_lambda, gamma, I));
        Rat bound = k == 1 ? Rat(1) : rat_pow(Rat(1, Int(k)), 10 * I.size());
        std::ostringstream name;
        name << "goodness_I=" << msk;
        res.lines.push_back({name.str(), rat_str(g), rat_str(bound), g <= bound});
      }
      return res;
    }
  }
  return res;
}

}  // namespace liftlab
