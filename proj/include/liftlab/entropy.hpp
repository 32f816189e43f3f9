#pragma once

// Explicit rational-probability distributions over named-coordinate product
// domains, with exact min-entropy, blockwise min-entropy, deficiency, and
// multiplicative uniformity. All comparisons stay symbolic (LogVal); no
// floating logs anywhere.
//
// Text format:
//   dist <k>
//   alphabet <a_1> ... <a_k>
//   p <num/den> <v_1> ... <v_k>     (values 0-based)

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/logval.hpp"
#include "liftlab/points.hpp"
#include "liftlab/rational.hpp"

namespace liftlab {

struct FiniteDistribution {
  std::vector<std::uint32_t> alphabet;  // per-coordinate alphabet sizes
  std::vector<Tuple> points;            // support, sorted lex, unique
  std::vector<Rat> probs;               // aligned with points, positive

  std::uint32_t coords() const { return static_cast<std::uint32_t>(alphabet.size()); }

  Int domain_size() const {
    Int t = 1;
    for (auto a : alphabet) t *= a;
    return t;
  }

  void validate() const {
    if (points.size() != probs.size()) throw DomainError("distribution: ragged support");
    if (points.empty()) throw DomainError("distribution: empty support");
    Rat sum = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != alphabet.size())
        throw DomainError("distribution: point arity mismatch");
      for (std::size_t c = 0; c < alphabet.size(); ++c)
        if (points[i][c] >= alphabet[c]) throw DomainError("distribution: value out of domain");
      if (probs[i] <= 0) throw DomainError("distribution: nonpositive probability");
      if (i > 0 && !(points[i - 1] < points[i]))
        throw DomainError("distribution: support not sorted/unique");
      sum += probs[i];
    }
    if (sum != 1) throw DomainError("distribution: probabilities sum to " + rat_str(sum));
  }

  static FiniteDistribution from_weights(std::vector<std::uint32_t> alphabet,
                                         std::vector<std::pair<Tuple, Rat>> weights) {
    std::map<Tuple, Rat> acc;
    for (auto& [pt, w] : weights) acc[pt] += w;
    FiniteDistribution d;
    d.alphabet = std::move(alphabet);
    for (auto& [pt, w] : acc) {
      if (w == 0) continue;
      d.points.push_back(pt);
      d.probs.push_back(w);
    }
    d.validate();
    return d;
  }

  static FiniteDistribution uniform_over(std::vector<std::uint32_t> alphabet,
                                         std::vector<Tuple> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    FiniteDistribution d;
    d.alphabet = std::move(alphabet);
    d.points = std::move(support);
    d.probs.assign(d.points.size(), Rat(1, Int(d.points.size())));
    d.validate();
    return d;
  }

  Rat prob_of(const Tuple& pt) const {
    auto it = std::lower_bound(points.begin(), points.end(), pt);
    if (it == points.end() || *it != pt) return Rat(0);
    return probs[static_cast<std::size_t>(it - points.begin())];
  }

  Rat max_prob() const {
    Rat m = 0;
    for (const auto& p : probs) m = std::max(m, p);
    return m;
  }

  FiniteDistribution marginal(const std::vector<std::uint32_t>& coords_keep) const {
    std::vector<std::uint32_t> al;
    for (auto c : coords_keep) {
      if (c >= alphabet.size()) throw DomainError("marginal: coordinate out of range");
      al.push_back(alphabet[c]);
    }
    std::map<Tuple, Rat> acc;
    for (std::size_t i = 0; i < points.size(); ++i) {
      Tuple pr;
      for (auto c : coords_keep) pr.push_back(points[i][c]);
      acc[pr] += probs[i];
    }
    FiniteDistribution d;
    d.alphabet = std::move(al);
    for (auto& [pt, w] : acc) {
      d.points.push_back(pt);
      d.probs.push_back(w);
    }
    d.validate();
    return d;
  }

  // H_inf = -log2(max probability)
  LogVal min_entropy() const { return LogVal(1 / max_prob(), 1); }

  // D_inf = log2|domain| - H_inf = log2(|domain| * max probability), >= 0
  LogVal deficiency() const { return LogVal(Rat(domain_size()) * max_prob(), 1); }

  struct Blockwise {
    LogVal value;                     // min over nonempty S of H_inf(x_S)/|S|
    std::vector<std::uint32_t> argmin;  // first attaining subset, size-then-lex order
  };

  Blockwise blockwise_min_entropy() const {
    std::uint32_t k = coords();
    if (k > 16) throw DomainError("blockwise_min_entropy: more than 16 coordinates");
    std::vector<std::uint32_t> masks;
    for (std::uint32_t mk = 1; mk < (1u << k); ++mk) masks.push_back(mk);
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
      return __builtin_popcount(a) != __builtin_popcount(b)
                 ? __builtin_popcount(a) < __builtin_popcount(b)
                 : a < b;
    });
    std::optional<Blockwise> best;
    for (auto mk : masks) {
      std::vector<std::uint32_t> sub;
      for (std::uint32_t c = 0; c < k; ++c)
        if (mk & (1u << c)) sub.push_back(c);
      LogVal h(1 / marginal(sub).max_prob(), static_cast<std::uint32_t>(sub.size()));
      if (!best || cmp(h, best->value) == Cmp::lt) best = Blockwise{h, sub};
    }
    return *best;
  }
};

// Smallest eps with Pr[x] = (1 +- eps)/|S| for all x in S; no value (infinity)
// when the support differs from S.
inline std::optional<Rat> multiplicative_uniformity(const FiniteDistribution& d,
                                                    const std::vector<Tuple>& target) {
  std::vector<Tuple> s = target;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (d.points != s) return std::nullopt;
  Rat eps = 0;
  Rat size(Int(s.size()));
  for (const auto& p : d.probs) eps = std::max(eps, Rat(abs(p * size - 1)));
  return eps;
}

// --- io ----------------------------------------------------------------

inline void write_distribution(std::ostream& out, const FiniteDistribution& d) {
  out << "dist " << d.coords() << "\n";
  out << "alphabet";
  for (auto a : d.alphabet) out << " " << a;
  out << "\n";
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    out << "p " << rat_str(d.probs[i]);
    for (auto v : d.points[i]) out << " " << v;
    out << "\n";
  }
}

inline FiniteDistribution parse_distribution(std::istream& in) {
  FiniteDistribution d;
  std::string line;
  std::uint32_t k = 0;
  bool header = false, alpha = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "dist") {
      if (!(ls >> k)) throw ParseError("bad dist header: " + line);
      header = true;
    } else if (tok == "alphabet") {
      if (!header) throw ParseError("alphabet before dist header");
      std::uint32_t a;
      while (ls >> a) d.alphabet.push_back(a);
      if (d.alphabet.size() != k) throw ParseError("alphabet arity mismatch");
      alpha = true;
    } else if (tok == "p") {
      if (!alpha) throw ParseError("support before alphabet");
      std::string q;
      if (!(ls >> q)) throw ParseError("bad support line: " + line);
      Rat w = parse_rat(q);
      Tuple pt;
      std::uint32_t v;
      while (ls >> v) pt.push_back(v);
      d.points.push_back(std::move(pt));
      d.probs.push_back(w);
    } else {
      throw ParseError("unknown dist line: " + line);
    }
  }
  if (!header) throw ParseError("missing dist header");
  // sort support; duplicates rejected by validate
  std::vector<std::size_t> idx(d.points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return d.points[a] < d.points[b]; });
  FiniteDistribution out;
  out.alphabet = d.alphabet;
  for (auto i : idx) {
    out.points.push_back(d.points[i]);
    out.probs.push_back(d.probs[i]);
  }
  out.validate();
  return out;
}

}  // namespace liftlab
