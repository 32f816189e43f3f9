#pragma once

// Resolution proofs (tree or dag) and their verifier. A proof is a list of
// steps; step indices are 1-based, premises must precede their use, and the
// final step must derive the empty clause.
//
// Text format, one step per line:
//   a <k>            clause k of the formula as an axiom
//   r <i> <j> <var>  resolvent of steps i and j on pivot <var>
// An optional first line "tree" marks the proof tree-like.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"

namespace liftlab {

struct ResolutionProof {
  struct Step {
    enum class Kind { axiom, resolve } kind = Kind::axiom;
    std::uint32_t clause = 0;       // axiom: 1-based formula clause
    std::uint32_t prem[2] = {0, 0}; // resolve: 1-based step indices
    std::uint32_t pivot = 0;        // resolve: pivot variable
  };
  std::vector<Step> steps;
  bool tree_like = false;

  static ResolutionProof axiom_step(std::uint32_t k) {
    ResolutionProof p;
    p.steps.push_back(Step{Step::Kind::axiom, k, {0, 0}, 0});
    return p;
  }
  void add_axiom(std::uint32_t k) { steps.push_back(Step{Step::Kind::axiom, k, {0, 0}, 0}); }
  void add_resolve(std::uint32_t i, std::uint32_t j, std::uint32_t pivot) {
    steps.push_back(Step{Step::Kind::resolve, 0, {i, j}, pivot});
  }
};

struct ResolutionMeasures {
  std::size_t length = 0;
  std::size_t width = 0;
  std::size_t block_width = 0;  // only when blocks given
  std::size_t depth = 0;        // only for tree-like proofs
};

struct ResolutionVerdict {
  bool ok = false;
  std::string reason;
  std::size_t bad_step = 0;  // 1-based, when !ok
  ResolutionMeasures measures;
  std::vector<Clause> derived;  // clause of each step, when ok
};

// The resolvent of (A or x) and (B or not-x) on pivot x is (A or B); the
// pivot must occur with opposite polarities in the premises. Tautological
// resolvents are permitted inside proofs.
inline std::optional<Clause> resolve(const Clause& c1, const Clause& c2, std::uint32_t pivot) {
  auto pv = static_cast<std::int32_t>(pivot);
  const Clause* pos = nullptr;
  const Clause* neg = nullptr;
  if (c1.contains(pv)) pos = &c1;
  if (c1.contains(-pv)) neg = &c1;
  if (c2.contains(pv)) {
    if (pos) return std::nullopt;  // pivot positive in both
    pos = &c2;
  }
  if (c2.contains(-pv)) {
    if (neg) return std::nullopt;
    neg = &c2;
  }
  if (!pos || !neg) return std::nullopt;
  std::vector<std::int32_t> lits;
  for (auto l : pos->lits)
    if (l != pv) lits.push_back(l);
  for (auto l : neg->lits)
    if (l != -pv) lits.push_back(l);
  return Clause(std::move(lits));
}

inline ResolutionVerdict verify_resolution(const CnfFormula& f, const ResolutionProof& p,
                                           const BlockStructure* blocks = nullptr) {
  ResolutionVerdict v;
  auto fail = [&](std::size_t step, const std::string& why) {
    v.ok = false;
    v.bad_step = step;
    v.reason = why;
    return v;
  };
  if (p.steps.empty()) return fail(0, "empty proof");
  std::vector<Clause> derived;
  std::vector<std::size_t> depth;
  std::vector<std::uint32_t> used(p.steps.size() + 1, 0);
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    const auto& st = p.steps[s];
    if (st.kind == ResolutionProof::Step::Kind::axiom) {
      if (st.clause < 1 || st.clause > f.clauses.size())
        return fail(s + 1, "axiom index out of range");
      derived.push_back(f.clauses[st.clause - 1]);
      depth.push_back(0);
    } else {
      for (int k = 0; k < 2; ++k)
        if (st.prem[k] < 1 || st.prem[k] > s) return fail(s + 1, "bad premise index");
      auto r = resolve(derived[st.prem[0] - 1], derived[st.prem[1] - 1], st.pivot);
      if (!r) return fail(s + 1, "pivot " + std::to_string(st.pivot) +
                                     " does not occur with opposite polarities");
      derived.push_back(*r);
      depth.push_back(1 + std::max(depth[st.prem[0] - 1], depth[st.prem[1] - 1]));
      if (p.tree_like) {
        for (int k = 0; k < 2; ++k)
          if (++used[st.prem[k]] > 1)
            return fail(s + 1, "tree violation: step " + std::to_string(st.prem[k]) +
                                   " used as premise twice");
      }
    }
  }
  if (!derived.back().empty()) return fail(p.steps.size(), "final clause not empty");
  v.ok = true;
  v.measures.length = p.steps.size();
  for (const auto& c : derived) v.measures.width = std::max(v.measures.width, c.width());
  if (blocks)
    for (const auto& c : derived)
      v.measures.block_width =
          std::max<std::size_t>(v.measures.block_width, clause_block_width(c, *blocks));
  if (p.tree_like) v.measures.depth = depth.back();
  v.derived = std::move(derived);
  return v;
}

// --- io ----------------------------------------------------------------

inline ResolutionProof parse_resolution(std::istream& in) {
  ResolutionProof p;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "tree") {
      p.tree_like = true;
    } else if (tok == "a") {
      std::uint32_t k;
      if (!(ls >> k)) throw ParseError("bad axiom line: " + line);
      p.add_axiom(k);
    } else if (tok == "r") {
      std::uint32_t i, j, piv;
      if (!(ls >> i >> j >> piv)) throw ParseError("bad resolve line: " + line);
      p.add_resolve(i, j, piv);
    } else {
      throw ParseError("unknown resolution line: " + line);
    }
  }
  return p;
}

inline void write_resolution(std::ostream& out, const ResolutionProof& p) {
  if (p.tree_like) out << "tree\n";
  for (const auto& st : p.steps) {
    if (st.kind == ResolutionProof::Step::Kind::axiom)
      out << "a " << st.clause << "\n";
    else
      out << "r " << st.prem[0] << " " << st.prem[1] << " " << st.pivot << "\n";
  }
}

}  // namespace liftlab
