#pragma once

// Exact brute-force computation of proof-complexity measures on desk-scale
// instances. Satisfiable inputs are reported as a distinct outcome instead
// of a sentinel value.
//
// Recursions are memoized on canonicalized restricted formulas: clauses are
// sorted and deduplicated, and subsumed clauses dropped. Dropping a clause B
// that is a superset of a clause A changes no measure: an input falsifying B
// falsifies A, so any solver may answer A instead of B, and conversely every
// solver of the reduced problem solves the original.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/relation.hpp"
#include "liftlab/resolution.hpp"

namespace liftlab {

struct OracleResult {
  bool satisfiable = false;
  std::uint64_t value = 0;

  static OracleResult sat() { return OracleResult{true, 0}; }
  static OracleResult of(std::uint64_t v) { return OracleResult{false, v}; }
  bool operator==(const OracleResult& o) const {
    return satisfiable == o.satisfiable && (satisfiable || value == o.value);
  }
};

inline bool is_satisfiable(const CnfFormula& f) {
  // plain backtracking; desk scale only
  std::vector<Clause> cs = f.clauses;
  std::function<bool(PartialAssignment&)> rec = [&](PartialAssignment& a) -> bool {
    std::uint32_t branch = 0;
    for (const auto& c : cs) {
      int e = c.eval(a);
      if (e == 0) return false;
      if (e == -1 && branch == 0)
        for (auto l : c.lits)
          if (a[std::abs(l)] < 0) {
            branch = static_cast<std::uint32_t>(std::abs(l));
            break;
          }
    }
    if (branch == 0) return true;  // nothing undetermined
    for (int v = 0; v < 2; ++v) {
      a[branch] = static_cast<std::int8_t>(v);
      if (rec(a)) return true;
    }
    a[branch] = -1;
    return false;
  };
  PartialAssignment a = make_unset(f.n_vars);
  return rec(a);
}

namespace detail {

struct CanonFormula {
  std::vector<Clause> clauses;  // sorted, deduped, subsumption-reduced
  bool falsified = false;       // contains the empty clause

  std::vector<std::uint32_t> vars() const {
    std::set<std::uint32_t> s;
    for (const auto& c : clauses)
      for (auto l : c.lits) s.insert(static_cast<std::uint32_t>(std::abs(l)));
    return {s.begin(), s.end()};
  }

  std::string key() const {
    std::string k;
    for (const auto& c : clauses) {
      for (auto l : c.lits) {
        k += std::to_string(l);
        k += ',';
      }
      k += ';';
    }
    return k;
  }
};

inline CanonFormula canonicalize(std::vector<Clause> cs) {
  CanonFormula r;
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  for (const auto& c : cs)
    if (c.empty()) {
      r.falsified = true;
      r.clauses = {Clause()};
      return r;
    }
  // subsumption: drop any clause that strictly contains another
  for (std::size_t i = 0; i < cs.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < cs.size() && !subsumed; ++j) {
      if (i == j || cs[j].lits.size() > cs[i].lits.size()) continue;
      if (j > i && cs[j].lits.size() == cs[i].lits.size()) continue;
      subsumed = std::includes(cs[i].lits.begin(), cs[i].lits.end(), cs[j].lits.begin(),
                               cs[j].lits.end());
    }
    if (!subsumed) r.clauses.push_back(cs[i]);
  }
  return r;
}

inline CanonFormula restrict_canon(const CanonFormula& f, std::uint32_t var, int val) {
  std::vector<Clause> out;
  for (const auto& c : f.clauses) {
    bool sat = false;
    std::vector<std::int32_t> keep;
    for (auto l : c.lits) {
      if (static_cast<std::uint32_t>(std::abs(l)) == var) {
        if ((l > 0) == (val == 1)) {
          sat = true;
          break;
        }
      } else {
        keep.push_back(l);
      }
    }
    if (!sat) out.push_back(Clause(std::move(keep)));
  }
  return canonicalize(std::move(out));
}

inline std::size_t min_clause_width(const CanonFormula& f) {
  std::size_t w = SIZE_MAX;
  for (const auto& c : f.clauses) w = std::min(w, c.lits.size());
  return w;
}

struct DepthMemo {
  struct Bounds {
    std::uint32_t lo = 0;
    std::uint32_t hi = UINT32_MAX;
  };
  std::unordered_map<std::string, Bounds> map;
};

// is there a decision tree of depth <= k solving S_F under this restriction?
inline bool depth_leq(const CanonFormula& f, std::uint32_t k, DepthMemo& memo) {
  if (f.falsified) return true;
  if (f.clauses.empty())
    throw DomainError("depth oracle: reached a satisfying restriction of a satisfiable formula");
  // any output leaf must falsify a full clause along its path
  std::size_t minw = min_clause_width(f);
  if (k < minw) return false;
  auto key = f.key();
  auto& b = memo.map[key];
  if (b.lo == 0) b.lo = static_cast<std::uint32_t>(minw);
  if (k < b.lo) return false;
  if (k >= b.hi) return true;
  for (auto v : f.vars()) {
    if (depth_leq(restrict_canon(f, v, 0), k - 1, memo) &&
        depth_leq(restrict_canon(f, v, 1), k - 1, memo)) {
      auto& bb = memo.map[key];
      bb.hi = std::min(bb.hi, k);
      return true;
    }
  }
  auto& bb = memo.map[key];
  bb.lo = std::max(bb.lo, k + 1);
  return false;
}

}  // namespace detail

// d(F): least depth of a decision tree solving S_F.
inline OracleResult min_depth(const CnfFormula& f) {
  if (f.n_vars > 24) throw DomainError("min_depth: n > 24");
  if (is_satisfiable(f)) return OracleResult::sat();
  auto canon = detail::canonicalize(f.clauses);
  detail::DepthMemo memo;
  std::uint32_t k = canon.falsified ? 0 : static_cast<std::uint32_t>(detail::min_clause_width(canon));
  for (;; ++k) {
    if (detail::depth_leq(canon, k, memo)) return OracleResult::of(k);
    if (k > f.n_vars) throw DomainError("min_depth: internal search overran n");
  }
}

// resTree(F): least length of a tree-like Resolution refutation, via
// size(F) = 1 if a clause is falsified, else min_v size(F|v=0)+size(F|v=1)+1.
inline OracleResult min_tree_size(const CnfFormula& f) {
  if (f.n_vars > 15) throw DomainError("min_tree_size: n > 15");
  if (is_satisfiable(f)) return OracleResult::sat();
  std::unordered_map<std::string, std::uint64_t> memo;
  std::function<std::uint64_t(const detail::CanonFormula&)> rec =
      [&](const detail::CanonFormula& cf) -> std::uint64_t {
    if (cf.falsified) return 1;
    auto key = cf.key();
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::uint64_t best = UINT64_MAX;
    for (auto v : cf.vars()) {
      std::uint64_t s0 = rec(detail::restrict_canon(cf, v, 0));
      if (s0 + 1 >= best) continue;
      std::uint64_t s1 = rec(detail::restrict_canon(cf, v, 1));
      best = std::min(best, s0 + s1 + 1);
    }
    memo[key] = best;
    return best;
  };
  return OracleResult::of(rec(detail::canonicalize(f.clauses)));
}

namespace detail {

// saturation closure with a clause filter; true iff the empty clause appears
template <typename Keep>
bool saturate(const CnfFormula& f, Keep&& keep) {
  std::set<Clause> pool;
  std::vector<Clause> work;
  for (const auto& c : f.clauses)
    if (keep(c) && pool.insert(c).second) work.push_back(c);
  for (const auto& c : pool)
    if (c.empty()) return true;
  while (!work.empty()) {
    Clause c = work.back();
    work.pop_back();
    std::vector<Clause> snapshot(pool.begin(), pool.end());
    for (const auto& d : snapshot) {
      for (auto l : c.lits) {
        if (!d.contains(-l)) continue;
        auto r = resolve(c, d, static_cast<std::uint32_t>(std::abs(l)));
        if (!r || r->tautological() || !keep(*r)) continue;
        if (pool.insert(*r).second) {
          if (r->empty()) return true;
          work.push_back(*r);
        }
      }
    }
  }
  return false;
}

}  // namespace detail

// w(S_F): least w such that width-w resolution saturation (axioms included)
// derives the empty clause.
inline OracleResult min_width(const CnfFormula& f) {
  if (f.n_vars > 20) throw DomainError("min_width: n > 20");
  if (is_satisfiable(f)) return OracleResult::sat();
  for (std::uint32_t w = 0;; ++w) {
    if (detail::saturate(f, [&](const Clause& c) { return c.width() <= w; }))
      return OracleResult::of(w);
    if (w > f.n_vars) throw DomainError("min_width: saturation overran n");
  }
}

// bw(S_F): least b such that saturation restricted to block-width <= b
// derives the empty clause.
inline OracleResult min_block_width(const CnfFormula& f, const BlockStructure& blocks) {
  if (f.n_vars > 16) throw DomainError("min_block_width: n*l > 16");
  if (is_satisfiable(f)) return OracleResult::sat();
  for (std::uint32_t b = 0;; ++b) {
    if (detail::saturate(
            f, [&](const Clause& c) { return clause_block_width(c, blocks) <= b; }))
      return OracleResult::of(b);
    if (b > blocks.n_blocks) throw DomainError("min_block_width: saturation overran n");
  }
}

// Least decision-tree depth solving an arbitrary total search relation. The
// CNF-backed case delegates to the formula recursion (identical problem);
// explicit tables run a game search memoized on packed partial assignments.
inline OracleResult min_relation_depth(const SearchRelation& s) {
  if (auto* f = std::get_if<CnfFormula>(&s.impl)) {
    return min_depth(*f);
  }
  const auto& e = std::get<SearchRelation::Explicit>(s.impl);
  if (e.bits > 16) throw DomainError("min_relation_depth: explicit table limited to 16 bits");
  if (!s.is_total()) throw DomainError("min_relation_depth: relation is not total");

  std::uint32_t bits = e.bits;
  std::uint32_t words = (e.n_outputs + 63) / 64;
  // covers[key] = bitmask of outputs valid on every completion
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> cover_memo;
  std::unordered_map<std::uint64_t, std::uint32_t> depth_memo;

  auto pack_key = [&](const std::vector<std::int8_t>& a) {
    std::uint64_t k = 0;
    for (std::uint32_t v = 0; v < bits; ++v) k = k * 3 + static_cast<std::uint64_t>(a[v] + 1);
    return k;
  };

  std::function<std::vector<std::uint64_t>(std::vector<std::int8_t>&)> cover =
      [&](std::vector<std::int8_t>& a) -> std::vector<std::uint64_t> {
    std::uint64_t key = pack_key(a);
    auto it = cover_memo.find(key);
    if (it != cover_memo.end()) return it->second;
    std::vector<std::uint64_t> mask(words, 0);
    std::int32_t freev = -1;
    for (std::uint32_t v = 0; v < bits; ++v)
      if (a[v] < 0) {
        freev = static_cast<std::int32_t>(v);
        break;
      }
    if (freev < 0) {
      std::uint64_t x = 0;
      for (std::uint32_t v = 0; v < bits; ++v)
        x |= static_cast<std::uint64_t>(a[v]) << v;
      for (auto o : e.valid[x]) mask[(o - 1) / 64] |= 1ull << ((o - 1) % 64);
    } else {
      a[freev] = 0;
      std::vector<std::uint64_t> m0 = cover(a);
      a[freev] = 1;
      std::vector<std::uint64_t> m1 = cover(a);
      a[freev] = -1;
      for (std::uint32_t w = 0; w < words; ++w) mask[w] = m0[w] & m1[w];
    }
    cover_memo.emplace(key, mask);
    return mask;
  };

  std::function<std::uint32_t(std::vector<std::int8_t>&)> rec =
      [&](std::vector<std::int8_t>& a) -> std::uint32_t {
    auto cov = cover(a);
    bool any = false;
    for (auto w : cov) any |= (w != 0);
    if (any) return 0;
    std::uint64_t key = pack_key(a);
    auto it = depth_memo.find(key);
    if (it != depth_memo.end()) return it->second;
    std::uint32_t best = UINT32_MAX;
    for (std::uint32_t v = 0; v < bits; ++v) {
      if (a[v] >= 0) continue;
      a[v] = 0;
      std::uint32_t d0 = rec(a);
      a[v] = 1;
      std::uint32_t d1 = rec(a);
      a[v] = -1;
      best = std::min(best, 1 + std::max(d0, d1));
    }
    depth_memo[key] = best;
    return best;
  };

  std::vector<std::int8_t> a(bits, -1);
  return OracleResult::of(rec(a));
}

// Exact decision-dag block-width via a feasibility fixed point over all
// conjunctions of block-width <= b: a conjunction is solvable if it sits
// inside some output's set, or two solvable conjunctions cover its subcube.
// Independent of the saturation route; micro domains only (n*l <= 6).
inline bool dag_block_width_leq(const SearchRelation& s, const BlockStructure& blocks,
                                std::uint32_t b) {
  std::uint32_t bits = s.bits();
  if (bits > 6) throw DomainError("dag_block_width_leq: more than 6 bits");
  if (blocks.n_vars() != bits) throw DomainError("dag_block_width_leq: block mismatch");
  std::uint64_t points = 1ull << bits;

  // subcube mask per conjunction, conjunction encoded base-3 (0 unset, 1 pos, 2 neg)
  std::uint64_t n_conj = 1;
  for (std::uint32_t v = 0; v < bits; ++v) n_conj *= 3;
  auto conj_mask = [&](std::uint64_t code) -> std::uint64_t {
    std::uint64_t mask = 0;
    for (std::uint64_t x = 0; x < points; ++x) {
      bool ok = true;
      std::uint64_t c = code;
      for (std::uint32_t v = 0; v < bits && ok; ++v) {
        std::uint32_t tr = c % 3;
        c /= 3;
        std::uint32_t bit = (x >> v) & 1u;
        if (tr == 1 && bit != 1) ok = false;
        if (tr == 2 && bit != 0) ok = false;
      }
      if (ok) mask |= 1ull << x;
    }
    return mask;
  };
  auto conj_bw = [&](std::uint64_t code) -> std::uint32_t {
    std::set<std::uint32_t> touched;
    std::uint64_t c = code;
    for (std::uint32_t v = 1; v <= bits; ++v) {
      if (c % 3 != 0) touched.insert(blocks.block_of[v]);
      c /= 3;
    }
    return static_cast<std::uint32_t>(touched.size());
  };

  std::vector<std::uint64_t> outputs_mask;  // per output, falsifying inputs
  for (std::uint32_t o = 1; o <= s.n_outputs(); ++o) {
    std::uint64_t mask = 0;
    for (std::uint64_t x = 0; x < points; ++x)
      if (s.is_valid(SearchRelation::unpack(x, bits), o)) mask |= 1ull << x;
    outputs_mask.push_back(mask);
  }

  std::vector<std::uint64_t> codes, masks;
  for (std::uint64_t code = 0; code < n_conj; ++code)
    if (conj_bw(code) <= b) {
      codes.push_back(code);
      masks.push_back(conj_mask(code));
    }
  std::vector<bool> good(codes.size(), false);
  std::vector<std::uint64_t> good_masks;
  for (std::size_t i = 0; i < codes.size(); ++i)
    for (auto om : outputs_mask)
      if ((masks[i] & ~om) == 0) {
        good[i] = true;
        good_masks.push_back(masks[i]);
        break;
      }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (good[i]) continue;
      bool found = false;
      for (std::size_t p = 0; p < good_masks.size() && !found; ++p)
        for (std::size_t q = p; q < good_masks.size() && !found; ++q)
          if ((masks[i] & ~(good_masks[p] | good_masks[q])) == 0) found = true;
      if (found) {
        good[i] = true;
        good_masks.push_back(masks[i]);
        changed = true;
      }
    }
  }
  // the empty conjunction is code 0 and is always within block-width 0
  for (std::size_t i = 0; i < codes.size(); ++i)
    if (codes[i] == 0) return good[i];
  return false;
}

inline OracleResult dag_block_width_exact(const SearchRelation& s, const BlockStructure& blocks) {
  if (auto* f = std::get_if<CnfFormula>(&s.impl))
    if (is_satisfiable(*f)) return OracleResult::sat();
  for (std::uint32_t b = 0; b <= blocks.n_blocks; ++b)
    if (dag_block_width_leq(s, blocks, b)) return OracleResult::of(b);
  throw DomainError("dag_block_width_exact: no dag found at full block-width");
}

}  // namespace liftlab
