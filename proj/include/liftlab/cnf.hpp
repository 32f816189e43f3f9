#pragma once

// CNF formulas, assignments, block structure, and the falsified-clause
// search problem. Literals use the DIMACS signed-integer convention.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/rational.hpp"

namespace liftlab {

// value per variable: 0, 1, or -1 for unset. Index 0 unused (vars are 1-based).
using PartialAssignment = std::vector<std::int8_t>;

inline PartialAssignment make_unset(std::uint32_t n_vars) {
  return PartialAssignment(n_vars + 1, -1);
}

struct Clause {
  // sorted by variable index, no duplicates; a tautology never survives
  // canonicalize() of a formula clause but may appear inside proof objects
  std::vector<std::int32_t> lits;

  Clause() = default;
  explicit Clause(std::vector<std::int32_t> ls) : lits(std::move(ls)) { canonicalize(); }

  void canonicalize() {
    std::sort(lits.begin(), lits.end(), [](std::int32_t a, std::int32_t b) {
      return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  }

  std::size_t width() const { return lits.size(); }
  bool empty() const { return lits.empty(); }

  bool tautological() const {
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i] == -lits[i + 1]) return true;
    return false;
  }

  bool contains(std::int32_t lit) const {
    return std::binary_search(lits.begin(), lits.end(), lit,
                              [](std::int32_t a, std::int32_t b) {
                                return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b)
                                                                  : a < b;
                              });
  }

  bool has_var(std::uint32_t v) const {
    for (auto l : lits)
      if (std::abs(l) == static_cast<std::int32_t>(v)) return true;
    return false;
  }

  // 1 satisfied, 0 falsified, -1 undetermined
  int eval(const PartialAssignment& a) const {
    bool open = false;
    for (auto l : lits) {
      std::int8_t v = a[static_cast<std::size_t>(std::abs(l))];
      if (v < 0) {
        open = true;
      } else if ((l > 0) == (v == 1)) {
        return 1;
      }
    }
    return open ? -1 : 0;
  }

  bool operator==(const Clause& o) const { return lits == o.lits; }
  bool operator<(const Clause& o) const { return lits < o.lits; }
};

struct CnfFormula {
  std::uint32_t n_vars = 0;
  std::vector<Clause> clauses;  // order is stable: clause index = 1 + position

  bool has_empty_clause() const {
    for (const auto& c : clauses)
      if (c.empty()) return true;
    return false;
  }
};

// --- DIMACS ---------------------------------------------------------------

inline CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  std::string line;
  bool header_seen = false;
  std::vector<std::int32_t> cur;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "p") {
      std::string fmt;
      long long nv = -1, nc = -1;
      if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
        throw ParseError("malformed DIMACS header: " + line);
      if (header_seen) throw ParseError("duplicate DIMACS header");
      header_seen = true;
      f.n_vars = static_cast<std::uint32_t>(nv);
      continue;
    }
    if (!header_seen) throw ParseError("clause before DIMACS header");
    ls.clear();
    ls.seekg(0);
    std::int64_t lit;
    while (ls >> lit) {
      if (lit == 0) {
        Clause c(cur);
        if (c.tautological())
          throw ParseError("tautological clause in formula (clause " +
                           std::to_string(f.clauses.size() + 1) + ")");
        f.clauses.push_back(std::move(c));
        cur.clear();
      } else {
        if (std::abs(lit) > static_cast<std::int64_t>(f.n_vars))
          throw ParseError("literal out of range: " + std::to_string(lit));
        cur.push_back(static_cast<std::int32_t>(lit));
      }
    }
    if (!ls.eof()) throw ParseError("bad token in clause line: " + line);
  }
  if (!header_seen) throw ParseError("missing DIMACS header");
  if (!cur.empty()) throw ParseError("unterminated clause at end of input");
  return f;
}

inline CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

inline void write_dimacs(std::ostream& out, const CnfFormula& f) {
  out << "p cnf " << f.n_vars << " " << f.clauses.size() << "\n";
  for (const auto& c : f.clauses) {
    for (auto l : c.lits) out << l << " ";
    out << "0\n";
  }
}

inline std::string dimacs_str(const CnfFormula& f) {
  std::ostringstream os;
  write_dimacs(os, f);
  return os.str();
}

// FNV-1a over the canonical DIMACS serialization
inline std::uint64_t formula_hash(const CnfFormula& f) {
  std::string s = dimacs_str(f);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// --- operations ------------------------------------------------------------

// Satisfied clauses removed, falsified literals removed; an empty clause is
// retained if produced. Variable count is unchanged.
inline CnfFormula restrict_formula(const CnfFormula& f, const PartialAssignment& a) {
  if (a.size() != f.n_vars + 1) throw DomainError("restrict: assignment domain mismatch");
  CnfFormula r;
  r.n_vars = f.n_vars;
  for (const auto& c : f.clauses) {
    bool sat = false;
    std::vector<std::int32_t> keep;
    for (auto l : c.lits) {
      std::int8_t v = a[static_cast<std::size_t>(std::abs(l))];
      if (v < 0) {
        keep.push_back(l);
      } else if ((l > 0) == (v == 1)) {
        sat = true;
        break;
      }
    }
    if (!sat) r.clauses.push_back(Clause(std::move(keep)));
  }
  return r;
}

// 1-based indices of exactly the clauses falsified by the total assignment z.
inline std::vector<std::uint32_t> falsified_clauses(const CnfFormula& f,
                                                    const PartialAssignment& z) {
  if (z.size() != f.n_vars + 1) throw DomainError("falsified_clauses: domain mismatch");
  for (std::uint32_t v = 1; v <= f.n_vars; ++v)
    if (z[v] < 0) throw DomainError("falsified_clauses: partial assignment");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < f.clauses.size(); ++i)
    if (f.clauses[i].eval(z) == 0) out.push_back(static_cast<std::uint32_t>(i + 1));
  return out;
}

// --- blocks ----------------------------------------------------------------

struct BlockStructure {
  std::uint32_t n_blocks = 0;
  std::uint32_t block_size = 0;
  std::vector<std::uint32_t> block_of;                 // var -> block (1-based; idx 0 unused)
  std::vector<std::vector<std::uint32_t>> block_vars;  // block (0-based) -> vars in offset order

  static BlockStructure contiguous(std::uint32_t n_blocks, std::uint32_t block_size) {
    BlockStructure b;
    b.n_blocks = n_blocks;
    b.block_size = block_size;
    b.block_of.assign(static_cast<std::size_t>(n_blocks) * block_size + 1, 0);
    b.block_vars.resize(n_blocks);
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      for (std::uint32_t j = 0; j < block_size; ++j) {
        std::uint32_t v = i * block_size + j + 1;
        b.block_of[v] = i + 1;
        b.block_vars[i].push_back(v);
      }
    return b;
  }

  // each variable its own block
  static BlockStructure unit(std::uint32_t n_vars) { return contiguous(n_vars, 1); }

  std::uint32_t n_vars() const { return n_blocks * block_size; }

  void validate() const {
    if (block_of.size() != static_cast<std::size_t>(n_blocks) * block_size + 1)
      throw DomainError("blocks: variable map does not cover [n*l]");
    std::vector<std::uint32_t> count(n_blocks, 0);
    for (std::uint32_t v = 1; v < block_of.size(); ++v) {
      if (block_of[v] < 1 || block_of[v] > n_blocks)
        throw DomainError("blocks: variable " + std::to_string(v) + " unassigned");
      count[block_of[v] - 1]++;
    }
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      if (count[i] != block_size)
        throw DomainError("blocks: block " + std::to_string(i + 1) + " has " +
                          std::to_string(count[i]) + " vars, expected " +
                          std::to_string(block_size));
  }
};

inline std::uint32_t clause_block_width(const Clause& c, const BlockStructure& b) {
  std::set<std::uint32_t> touched;
  for (auto l : c.lits) {
    std::uint32_t v = static_cast<std::uint32_t>(std::abs(l));
    if (v >= b.block_of.size() || b.block_of[v] == 0)
      throw DomainError("clause_block_width: variable not covered by blocks");
    touched.insert(b.block_of[v]);
  }
  return static_cast<std::uint32_t>(touched.size());
}

inline BlockStructure parse_blocks(std::istream& in) {
  BlockStructure b;
  std::string line;
  bool header = false;
  std::vector<bool> seen;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "blocks") {
      if (!(ls >> b.n_blocks >> b.block_size) || b.n_blocks == 0 || b.block_size == 0)
        throw ParseError("malformed blocks header: " + line);
      b.block_of.assign(static_cast<std::size_t>(b.n_blocks) * b.block_size + 1, 0);
      b.block_vars.assign(b.n_blocks, {});
      seen.assign(b.n_blocks, false);
      header = true;
    } else if (tok == "block") {
      if (!header) throw ParseError("block line before blocks header");
      std::uint32_t idx;
      if (!(ls >> idx) || idx < 1 || idx > b.n_blocks)
        throw ParseError("bad block index: " + line);
      if (seen[idx - 1]) throw ParseError("duplicate block " + std::to_string(idx));
      seen[idx - 1] = true;
      std::uint32_t v;
      while (ls >> v) {
        if (v == 0 || v >= b.block_of.size())
          throw ParseError("block variable out of range: " + std::to_string(v));
        if (b.block_of[v] != 0)
          throw ParseError("variable " + std::to_string(v) + " in two blocks");
        b.block_of[v] = idx;
        b.block_vars[idx - 1].push_back(v);
      }
    } else {
      throw ParseError("unknown blocks line: " + line);
    }
  }
  if (!header) throw ParseError("missing blocks header");
  b.validate();
  return b;
}

inline void write_blocks(std::ostream& out, const BlockStructure& b) {
  out << "blocks " << b.n_blocks << " " << b.block_size << "\n";
  for (std::uint32_t i = 0; i < b.n_blocks; ++i) {
    out << "block " << (i + 1);
    for (auto v : b.block_vars[i]) out << " " << v;
    out << "\n";
  }
}

// Per-block value in {0,1}^l or unset. Block values are l-bit integers with
// offset 0 in the most significant bit.
struct BlockPartialAssignment {
  std::uint32_t n_blocks = 0;
  std::uint32_t block_size = 0;
  std::vector<std::optional<std::uint32_t>> value;  // 0-based block index

  static BlockPartialAssignment all_free(std::uint32_t n, std::uint32_t l) {
    BlockPartialAssignment r;
    r.n_blocks = n;
    r.block_size = l;
    r.value.assign(n, std::nullopt);
    return r;
  }

  std::vector<std::uint32_t> fixed_blocks() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      if (value[i]) out.push_back(i);
    return out;
  }
  std::vector<std::uint32_t> free_blocks() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      if (!value[i]) out.push_back(i);
    return out;
  }

  // z given per block, z[i] an l-bit value
  bool cube_contains(const std::vector<std::uint32_t>& z) const {
    if (z.size() != n_blocks) throw DomainError("cube_contains: block count mismatch");
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      if (value[i] && *value[i] != z[i]) return false;
    return true;
  }

  // translate to a per-variable assignment through a block structure
  PartialAssignment to_partial(const BlockStructure& b) const {
    if (b.n_blocks != n_blocks || b.block_size != block_size)
      throw DomainError("to_partial: block structure mismatch");
    PartialAssignment a = make_unset(b.n_vars());
    for (std::uint32_t i = 0; i < n_blocks; ++i)
      if (value[i])
        for (std::uint32_t j = 0; j < block_size; ++j)
          a[b.block_vars[i][j]] =
              static_cast<std::int8_t>((*value[i] >> (block_size - 1 - j)) & 1u);
    return a;
  }
};

}  // namespace liftlab
