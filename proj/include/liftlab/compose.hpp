#pragma once

// Build composed CNF formulas F o Ind_{l x m}^n by certificate enumeration.
// One composed clause per certificate (source clause, selector assignment
// over its touched blocks), in lexicographic enumeration order.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/gadget.hpp"

namespace liftlab {

struct ComposeLayout {
  std::uint32_t n = 0;  // blocks
  std::uint32_t ell = 1;
  std::uint32_t m = 2;
  std::uint32_t t = 1;

  std::uint32_t vars_per_block() const { return t + ell * m; }
  std::uint32_t total_vars() const { return n * vars_per_block(); }
  // block and positions 0-based, result 1-based composed variable ids
  std::uint32_t sel_var(std::uint32_t block, std::uint32_t bit) const {
    return block * vars_per_block() + bit + 1;
  }
  std::uint32_t mat_var(std::uint32_t block, std::uint32_t row, std::uint32_t col) const {
    return block * vars_per_block() + t + row * m + col + 1;
  }
};

struct Provenance {
  std::uint32_t src_clause = 0;  // 1-based
  // (block 0-based, selector 0-based), blocks ascending
  std::vector<std::pair<std::uint32_t, std::uint32_t>> alpha;
};

struct CompositionManifest {
  std::uint64_t src_hash = 0;
  ComposeLayout layout;
  BlockStructure blocks;  // source block structure (carries original var ids)
  std::vector<Provenance> prov;  // per composed clause, in output order
};

namespace detail {

inline void append_certificate_clause(const ComposeLayout& lay, const Clause& src,
                                      const BlockStructure& b,
                                      const std::vector<std::uint32_t>& touched,
                                      const std::vector<std::uint32_t>& alpha,
                                      CnfFormula& out, std::vector<Provenance>& prov,
                                      std::uint32_t src_idx) {
  std::vector<std::int32_t> lits;
  // selector literals: falsified exactly when block i's selector equals alpha
  for (std::size_t k = 0; k < touched.size(); ++k) {
    std::uint32_t i = touched[k];
    for (std::uint32_t p = 0; p < lay.t; ++p) {
      std::uint32_t bit = (alpha[k] >> (lay.t - 1 - p)) & 1u;
      auto v = static_cast<std::int32_t>(lay.sel_var(i, p));
      lits.push_back(bit ? -v : v);
    }
  }
  // pointed-bit literals: same polarity as the source literal
  for (auto l : src.lits) {
    std::uint32_t v = static_cast<std::uint32_t>(std::abs(l));
    std::uint32_t blk = b.block_of[v] - 1;
    std::uint32_t row = 0;
    while (b.block_vars[blk][row] != v) ++row;
    std::size_t k = static_cast<std::size_t>(
        std::lower_bound(touched.begin(), touched.end(), blk) - touched.begin());
    auto mv = static_cast<std::int32_t>(lay.mat_var(blk, row, alpha[k]));
    lits.push_back(l > 0 ? mv : -mv);
  }
  out.clauses.push_back(Clause(std::move(lits)));
  Provenance p;
  p.src_clause = src_idx;
  for (std::size_t k = 0; k < touched.size(); ++k) p.alpha.emplace_back(touched[k], alpha[k]);
  prov.push_back(std::move(p));
}

}  // namespace detail

struct ComposeResult {
  CnfFormula formula;
  CompositionManifest manifest;
};

// Composed clause count is sum over clauses D of m^bw(D); an exception is
// raised before any work if that exceeds the clause budget.
inline ComposeResult compose_block(const CnfFormula& f, const BlockStructure& b,
                                   std::uint32_t m, std::uint64_t clause_budget = 10000000) {
  b.validate();
  if (b.n_vars() != f.n_vars)
    throw DomainError("compose: block structure covers " + std::to_string(b.n_vars()) +
                      " vars, formula has " + std::to_string(f.n_vars));
  GadgetParams gp(m, b.block_size);  // validates m
  ComposeLayout lay;
  lay.n = b.n_blocks;
  lay.ell = b.block_size;
  lay.m = m;
  lay.t = gp.t;

  Int total = 0;
  for (const auto& c : f.clauses) {
    Int term = 1;
    for (std::uint32_t k = 0; k < clause_block_width(c, b); ++k) term *= m;
    total += term;
  }
  if (total > clause_budget)
    throw BudgetError("compose: " + total.str() + " composed clauses exceed budget " +
                      std::to_string(clause_budget));

  ComposeResult res;
  res.formula.n_vars = lay.total_vars();
  res.manifest.src_hash = formula_hash(f);
  res.manifest.layout = lay;
  res.manifest.blocks = b;

  for (std::size_t ci = 0; ci < f.clauses.size(); ++ci) {
    const Clause& src = f.clauses[ci];
    std::vector<std::uint32_t> touched;
    for (auto l : src.lits) {
      std::uint32_t blk = b.block_of[static_cast<std::uint32_t>(std::abs(l))] - 1;
      if (touched.empty() || touched.back() != blk) {
        if (std::find(touched.begin(), touched.end(), blk) == touched.end())
          touched.push_back(blk);
      }
    }
    std::sort(touched.begin(), touched.end());
    // odometer over [m]^touched, last coordinate fastest
    std::vector<std::uint32_t> alpha(touched.size(), 0);
    while (true) {
      detail::append_certificate_clause(lay, src, b, touched, alpha, res.formula,
                                        res.manifest.prov, static_cast<std::uint32_t>(ci + 1));
      std::size_t k = touched.size();
      while (k > 0 && ++alpha[k - 1] == m) alpha[--k] = 0;
      if (k == 0) break;
    }
  }
  return res;
}

inline ComposeResult compose_single(const CnfFormula& f, std::uint32_t m,
                                    std::uint64_t clause_budget = 10000000) {
  return compose_block(f, BlockStructure::unit(f.n_vars), m, clause_budget);
}

// z := (Ind(x_1,y_1), ..., Ind(x_n,y_n)) pulled back to the source variables.
inline PartialAssignment decode_assignment(const CompositionManifest& man,
                                           const PartialAssignment& composed) {
  const ComposeLayout& lay = man.layout;
  if (composed.size() != lay.total_vars() + 1)
    throw DomainError("decode: composed assignment domain mismatch");
  for (std::size_t v = 1; v < composed.size(); ++v)
    if (composed[v] < 0) throw DomainError("decode: partial composed assignment");
  PartialAssignment z = make_unset(man.blocks.n_vars());
  for (std::uint32_t i = 0; i < lay.n; ++i) {
    std::uint32_t sel = 0;
    for (std::uint32_t p = 0; p < lay.t; ++p)
      sel = (sel << 1) | static_cast<std::uint32_t>(composed[lay.sel_var(i, p)]);
    for (std::uint32_t j = 0; j < lay.ell; ++j)
      z[man.blocks.block_vars[i][j]] = composed[lay.mat_var(i, j, sel)];
  }
  return z;
}

// --- manifest io -----------------------------------------------------------

inline void write_manifest(std::ostream& out, const CompositionManifest& man) {
  out << "manifest 1\n";
  out << "hash " << std::hex << std::setw(16) << std::setfill('0') << man.src_hash
      << std::dec << std::setfill(' ') << "\n";
  out << "params " << man.layout.n << " " << man.layout.ell << " " << man.layout.m << "\n";
  for (std::uint32_t i = 0; i < man.blocks.n_blocks; ++i) {
    out << "block " << (i + 1);
    for (auto v : man.blocks.block_vars[i]) out << " " << v;
    out << "\n";
  }
  for (std::size_t c = 0; c < man.prov.size(); ++c) {
    out << "clause " << (c + 1) << " from " << man.prov[c].src_clause << " sel";
    for (auto& [blk, sel] : man.prov[c].alpha) out << " " << (blk + 1) << ":" << sel;
    out << "\n";
  }
}

inline CompositionManifest parse_manifest(std::istream& in) {
  CompositionManifest man;
  std::string line;
  bool got_params = false;
  std::map<std::uint32_t, std::vector<std::uint32_t>> blocks;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "manifest") {
      int ver;
      if (!(ls >> ver) || ver != 1) throw ParseError("unsupported manifest version: " + line);
    } else if (tok == "hash") {
      std::string h;
      if (!(ls >> h)) throw ParseError("bad hash line");
      man.src_hash = std::stoull(h, nullptr, 16);
    } else if (tok == "params") {
      std::uint32_t n, ell, m;
      if (!(ls >> n >> ell >> m)) throw ParseError("bad params line: " + line);
      man.layout.n = n;
      man.layout.ell = ell;
      man.layout.m = m;
      man.layout.t = GadgetParams(m, ell).t;
      got_params = true;
    } else if (tok == "block") {
      std::uint32_t idx;
      if (!(ls >> idx)) throw ParseError("bad block line: " + line);
      std::uint32_t v;
      while (ls >> v) blocks[idx].push_back(v);
    } else if (tok == "clause") {
      std::size_t idx;
      std::string from, sel;
      Provenance p;
      if (!(ls >> idx >> from >> p.src_clause >> sel) || from != "from" || sel != "sel")
        throw ParseError("bad clause line: " + line);
      std::string pair;
      while (ls >> pair) {
        auto colon = pair.find(':');
        if (colon == std::string::npos) throw ParseError("bad sel pair: " + pair);
        std::uint32_t blk = static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
        std::uint32_t s = static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
        if (blk == 0) throw ParseError("bad block id in sel pair: " + pair);
        p.alpha.emplace_back(blk - 1, s);
      }
      if (idx != man.prov.size() + 1) throw ParseError("clause lines out of order");
      man.prov.push_back(std::move(p));
    } else {
      throw ParseError("unknown manifest line: " + line);
    }
  }
  if (!got_params) throw ParseError("manifest missing params");
  man.blocks.n_blocks = man.layout.n;
  man.blocks.block_size = man.layout.ell;
  man.blocks.block_of.assign(static_cast<std::size_t>(man.layout.n) * man.layout.ell + 1, 0);
  man.blocks.block_vars.assign(man.layout.n, {});
  for (auto& [idx, vars] : blocks) {
    if (idx < 1 || idx > man.layout.n) throw ParseError("manifest block index out of range");
    man.blocks.block_vars[idx - 1] = vars;
    for (auto v : vars) {
      if (v == 0 || v >= man.blocks.block_of.size())
        throw ParseError("manifest block variable out of range");
      man.blocks.block_of[v] = idx;
    }
  }
  man.blocks.validate();
  return man;
}

}  // namespace liftlab
