#pragma once

// Blockwise min-entropy restoring partition of a selector set X inside
// [m]^N, and the megacoordinate grouping/filter used to make union bounds
// work for small gadgets.
//
// Partition loop: repeatedly take a maximal subset I (with a witnessing
// outcome alpha) on which the remaining X violates theta-blockwise
// min-entropy, i.e. Pr[X_I = alpha] > 2^(-theta*|I|); split off
// X^j = {x : x_I = alpha}. Subsets are scanned by size descending then lex,
// so the first violating subset found is maximal; the witnessing alpha is
// the lex-first one over the threshold.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liftlab/entropy.hpp"
#include "liftlab/logval.hpp"
#include "liftlab/rational.hpp"
#include "liftlab/report.hpp"

namespace liftlab {

struct RestoringPart {
  std::vector<std::uint32_t> I;  // fixed coordinates, ascending
  Tuple alpha;                   // witnessed outcome on I
  std::vector<Tuple> xs;         // the part, sorted
  Rat witness_prob = 0;          // Pr[X_I = alpha] at selection time
};

struct RestoringPartition {
  std::uint32_t N = 0, m = 2;
  Rat theta_bits = 0;  // per-coordinate threshold in bits
  std::vector<RestoringPart> parts;
};

namespace detail {

// Pr > 2^(-theta*|I|), exactly
inline bool violates(const Rat& prob, const Rat& theta_bits, std::size_t setsize) {
  if (prob <= 0) return false;
  return cmp_bits(LogVal(1 / prob, 1), theta_bits * Int(setsize)) == Cmp::lt;
}

}  // namespace detail

inline RestoringPartition restore_partition(std::vector<Tuple> xs, std::uint32_t m,
                                            const Rat& theta_bits) {
  if (xs.empty()) throw DomainError("restore_partition: empty X");
  std::uint32_t n = static_cast<std::uint32_t>(xs[0].size());
  if (n > 16) throw DomainError("restore_partition: N > 16");
  for (const auto& x : xs) {
    if (x.size() != n) throw DomainError("restore_partition: ragged X");
    for (auto v : x)
      if (v >= m) throw DomainError("restore_partition: selector out of range");
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  RestoringPartition out;
  out.N = n;
  out.m = m;
  out.theta_bits = theta_bits;

  // subset masks by size descending, then lex ascending
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mk = 1; mk < (1u << n); ++mk) masks.push_back(mk);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return __builtin_popcount(a) != __builtin_popcount(b)
               ? __builtin_popcount(a) > __builtin_popcount(b)
               : a < b;
  });

  std::vector<Tuple> rem = xs;
  while (!rem.empty()) {
    RestoringPart part;
    bool found = false;
    for (auto mk : masks) {
      std::vector<std::uint32_t> sub;
      for (std::uint32_t c = 0; c < n; ++c)
        if (mk & (1u << c)) sub.push_back(c);
      std::map<Tuple, std::size_t> counts;
      for (const auto& x : rem) {
        Tuple pr;
        for (auto c : sub) pr.push_back(x[c]);
        counts[pr]++;
      }
      for (const auto& [alpha, cnt] : counts) {
        Rat prob(Int(cnt), Int(rem.size()));
        if (detail::violates(prob, theta_bits, sub.size())) {
          part.I = sub;
          part.alpha = alpha;
          part.witness_prob = prob;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) {
      part.witness_prob = 1;  // trivial part, I empty
      part.xs = rem;
      out.parts.push_back(std::move(part));
      break;
    }
    std::vector<Tuple> keep, take;
    for (const auto& x : rem) {
      bool match = true;
      for (std::size_t k = 0; k < part.I.size(); ++k)
        if (x[part.I[k]] != part.alpha[k]) {
          match = false;
          break;
        }
      (match ? take : keep).push_back(x);
    }
    part.xs = std::move(take);
    out.parts.push_back(std::move(part));
    rem = std::move(keep);
  }
  return out;
}

// Maximality consequence: conditioned off I_j, every part has blockwise
// min-entropy >= theta on the remaining coordinates. Checked by subset scan.
inline std::vector<ReportLine> check_restoring_postconditions(const RestoringPartition& p,
                                                              const std::vector<Tuple>& xs) {
  std::vector<ReportLine> rep;
  std::set<Tuple> all(xs.begin(), xs.end()), covered;
  std::size_t covered_count = 0;
  for (const auto& part : p.parts) {
    covered_count += part.xs.size();
    for (const auto& x : part.xs) covered.insert(x);
  }
  bool disjoint_cover = covered == all && covered_count == all.size();
  rep.push_back({"parts_disjoint_cover", disjoint_cover ? "true" : "false", "true",
                 disjoint_cover});

  bool restored = true;
  for (const auto& part : p.parts) {
    std::vector<std::uint32_t> rest;
    for (std::uint32_t c = 0; c < p.N; ++c)
      if (std::find(part.I.begin(), part.I.end(), c) == part.I.end()) rest.push_back(c);
    if (rest.empty() || part.xs.empty()) continue;
    auto dist = FiniteDistribution::uniform_over(std::vector<std::uint32_t>(p.N, p.m), part.xs)
                    .marginal(rest);
    auto bw = dist.blockwise_min_entropy();
    if (!geq_bits(bw.value, p.theta_bits)) restored = false;
  }
  rep.push_back({"parts_restore_blockwise_min_entropy", restored ? "true" : "false", "true",
                 restored});
  return rep;
}

// Balanced grouping of [N] into K megacoordinates of size N/K each.
struct MegaGrouping {
  std::uint32_t N = 0, K = 1;
  std::vector<std::uint32_t> h;  // coordinate -> megacoordinate, 0-based

  void validate() const {
    if (K == 0 || N == 0 || N % K != 0) throw DomainError("mega: K must divide N");
    if (h.size() != N) throw DomainError("mega: map arity mismatch");
    std::vector<std::uint32_t> cnt(K, 0);
    for (auto v : h) {
      if (v >= K) throw DomainError("mega: value out of range");
      cnt[v]++;
    }
    for (auto c : cnt)
      if (c != N / K) throw DomainError("mega: unbalanced grouping");
  }
};

struct MegaFilterResult {
  std::vector<std::size_t> surviving_parts;  // indices into partition.parts
  std::vector<Tuple> x_h;                    // union of surviving parts
  Rat survival_fraction = 0;                 // |X_h| / |X|
};

// F^h keeps exactly the parts whose fixed coordinates land in pairwise
// distinct megacoordinates.
inline MegaFilterResult mega_filter(const RestoringPartition& p, const MegaGrouping& h) {
  h.validate();
  if (h.N != p.N) throw DomainError("mega_filter: N mismatch");
  MegaFilterResult out;
  std::size_t total = 0;
  for (std::size_t j = 0; j < p.parts.size(); ++j) {
    const auto& part = p.parts[j];
    total += part.xs.size();
    std::set<std::uint32_t> used;
    bool ok = true;
    for (auto c : part.I)
      if (!used.insert(h.h[c]).second) {
        ok = false;
        break;
      }
    if (ok) {
      out.surviving_parts.push_back(j);
      out.x_h.insert(out.x_h.end(), part.xs.begin(), part.xs.end());
    }
  }
  std::sort(out.x_h.begin(), out.x_h.end());
  out.survival_fraction = total == 0 ? Rat(0) : Rat(Int(out.x_h.size()), Int(total));
  return out;
}

}  // namespace liftlab
