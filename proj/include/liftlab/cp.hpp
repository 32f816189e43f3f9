#pragma once

// Cutting Planes lines, proofs, and the syntactic/semantic verifier.
//
// A line is sum_i a_i x_i >= b with arbitrary-precision integer
// coefficients; zero coefficients are stored implicitly. Rules follow the
// original system: nonnegative integer linear combinations and division by
// the gcd of the nonzero coefficients with a rounded-up bound. The semantic
// rule accepts any inference sound over boolean assignments; it is checked
// by brute force over the joint support of premises and conclusion
// (variables outside every support cannot affect satisfaction).
//
// Text format, one step per line, step ids 1-based:
//   a <k>                              clause k of the formula
//   b <var> <0|1>                      x_var >= 0  |  -x_var >= -1
//   l <i> <j> <c1> <c2>                c1 * step_i + c2 * step_j
//   d <i> <c>                          divide step i by c = gcd
//   s <i> <j> : <a_1> ... <a_n> >= <b> semantic inference (dense coeffs)
// An optional first line "tree" marks the proof tree-like.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/rational.hpp"

namespace liftlab {

struct CpLine {
  std::map<std::uint32_t, Int> coeffs;  // var -> nonzero coefficient
  Int bound = 0;

  void set(std::uint32_t var, Int c) {
    if (c == 0)
      coeffs.erase(var);
    else
      coeffs[var] = std::move(c);
  }

  std::vector<std::uint32_t> support() const {
    std::vector<std::uint32_t> s;
    for (auto& [v, c] : coeffs) s.push_back(v);
    return s;
  }

  bool is_contradiction() const { return coeffs.empty() && bound >= 1; }

  bool satisfied(const PartialAssignment& a) const {
    Int lhs = 0;
    for (auto& [v, c] : coeffs) {
      if (a[v] < 0) throw DomainError("CpLine: unassigned variable");
      if (a[v] == 1) lhs += c;
    }
    return lhs >= bound;
  }

  CpLine scaled_sum(const CpLine& o, const Int& c1, const Int& c2) const {
    CpLine r;
    for (auto& [v, c] : coeffs) r.set(v, c1 * c);
    for (auto& [v, c] : o.coeffs) {
      auto it = r.coeffs.find(v);
      Int nc = (it == r.coeffs.end() ? Int(0) : it->second) + c2 * c;
      r.set(v, nc);
    }
    r.bound = c1 * bound + c2 * o.bound;
    return r;
  }

  Int coeff_gcd() const {
    Int g = 0;
    for (auto& [v, c] : coeffs) g = boost::multiprecision::gcd(g, abs(c));
    return g;
  }

  bool operator==(const CpLine& o) const { return coeffs == o.coeffs && bound == o.bound; }

  std::string str(std::uint32_t n_vars) const {
    std::ostringstream os;
    bool first = true;
    for (std::uint32_t v = 1; v <= n_vars; ++v) {
      auto it = coeffs.find(v);
      if (it == coeffs.end()) continue;
      if (!first) os << " + ";
      os << it->second << "*x" << v;
      first = false;
    }
    if (first) os << "0";
    os << " >= " << bound;
    return os.str();
  }
};

// Clause (l1 or ... or lk) encodes as sum of x_i over positive literals plus
// (1 - x_i) over negative literals >= 1, normalized to integer form.
inline CpLine clause_to_inequality(const Clause& c) {
  CpLine line;
  line.bound = 1;
  for (auto l : c.lits) {
    auto v = static_cast<std::uint32_t>(std::abs(l));
    if (l > 0) {
      line.set(v, 1);
    } else {
      line.set(v, -1);
      line.bound -= 1;
    }
  }
  return line;
}

struct CpProof {
  struct Step {
    enum class Kind { clause_axiom, bool_axiom, lincomb, divide, semantic } kind;
    std::uint32_t clause = 0;        // clause_axiom
    std::uint32_t var = 0;           // bool_axiom
    std::uint32_t sign = 0;          // bool_axiom: 0 -> x>=0, 1 -> -x>=-1
    std::uint32_t prem[2] = {0, 0};  // lincomb/semantic (divide uses prem[0])
    Int c1 = 0, c2 = 0;              // lincomb coefficients / divide divisor in c1
    CpLine asserted;                 // semantic
  };
  std::vector<Step> steps;
  bool tree_like = false;

  void add_clause_axiom(std::uint32_t k) {
    Step s;
    s.kind = Step::Kind::clause_axiom;
    s.clause = k;
    steps.push_back(std::move(s));
  }
  void add_bool_axiom(std::uint32_t var, std::uint32_t sign) {
    Step s;
    s.kind = Step::Kind::bool_axiom;
    s.var = var;
    s.sign = sign;
    steps.push_back(std::move(s));
  }
  void add_lincomb(std::uint32_t i, std::uint32_t j, Int c1, Int c2) {
    Step s;
    s.kind = Step::Kind::lincomb;
    s.prem[0] = i;
    s.prem[1] = j;
    s.c1 = std::move(c1);
    s.c2 = std::move(c2);
    steps.push_back(std::move(s));
  }
  void add_divide(std::uint32_t i, Int c) {
    Step s;
    s.kind = Step::Kind::divide;
    s.prem[0] = i;
    s.c1 = std::move(c);
    steps.push_back(std::move(s));
  }
  void add_semantic(std::uint32_t i, std::uint32_t j, CpLine line) {
    Step s;
    s.kind = Step::Kind::semantic;
    s.prem[0] = i;
    s.prem[1] = j;
    s.asserted = std::move(line);
    steps.push_back(std::move(s));
  }
};

enum class CpMode { syntactic, semantic };

struct CpVerdict {
  bool ok = false;
  std::string reason;
  std::size_t bad_step = 0;
  std::size_t length = 0;
  std::vector<CpLine> lines;  // when ok
};

namespace detail {

// soundness of premises |- conclusion over the joint support
inline bool cp_sound(const std::vector<const CpLine*>& premises, const CpLine& conclusion,
                     std::uint32_t support_cap, std::string& why,
                     PartialAssignment* counterexample = nullptr) {
  std::vector<std::uint32_t> sup = conclusion.support();
  for (auto* p : premises)
    for (auto v : p->support()) sup.push_back(v);
  std::sort(sup.begin(), sup.end());
  sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
  if (sup.size() > support_cap) {
    why = "joint support " + std::to_string(sup.size()) + " exceeds cap " +
          std::to_string(support_cap);
    return false;
  }
  std::uint32_t maxvar = sup.empty() ? 0 : sup.back();
  for (std::uint64_t mask = 0; mask < (1ull << sup.size()); ++mask) {
    PartialAssignment a = make_unset(maxvar);
    for (std::size_t k = 0; k < sup.size(); ++k)
      a[sup[k]] = static_cast<std::int8_t>((mask >> k) & 1u);
    bool prem_ok = true;
    for (auto* p : premises)
      if (!p->satisfied(a)) {
        prem_ok = false;
        break;
      }
    if (prem_ok && !conclusion.satisfied(a)) {
      why = "counter-assignment found";
      if (counterexample) *counterexample = a;
      return false;
    }
  }
  return true;
}

}  // namespace detail

inline CpVerdict verify_cp(const CnfFormula& f, const CpProof& p, CpMode mode,
                           std::uint32_t support_cap = 24) {
  CpVerdict v;
  auto fail = [&](std::size_t step, const std::string& why) {
    v.ok = false;
    v.bad_step = step;
    v.reason = why;
    return v;
  };
  if (p.steps.empty()) return fail(0, "empty proof");
  std::vector<CpLine> lines;
  std::vector<std::uint32_t> used(p.steps.size() + 1, 0);
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    const auto& st = p.steps[s];
    using K = CpProof::Step::Kind;
    auto check_prem = [&](std::uint32_t idx) { return idx >= 1 && idx <= s; };
    auto count_use = [&](std::uint32_t idx) -> bool {
      if (!p.tree_like) return true;
      return ++used[idx] <= 1;
    };
    switch (st.kind) {
      case K::clause_axiom: {
        if (st.clause < 1 || st.clause > f.clauses.size())
          return fail(s + 1, "clause axiom index out of range");
        lines.push_back(clause_to_inequality(f.clauses[st.clause - 1]));
        break;
      }
      case K::bool_axiom: {
        if (st.var < 1 || st.var > f.n_vars) return fail(s + 1, "boolean axiom variable out of range");
        CpLine line;
        if (st.sign == 0) {
          line.set(st.var, 1);
          line.bound = 0;
        } else {
          line.set(st.var, -1);
          line.bound = -1;
        }
        lines.push_back(std::move(line));
        break;
      }
      case K::lincomb: {
        if (!check_prem(st.prem[0]) || !check_prem(st.prem[1]))
          return fail(s + 1, "bad premise index");
        if (st.c1 < 0 || st.c2 < 0) return fail(s + 1, "negative combination coefficient");
        if (!count_use(st.prem[0]) || !count_use(st.prem[1]))
          return fail(s + 1, "tree violation: premise reused");
        CpLine line = lines[st.prem[0] - 1].scaled_sum(lines[st.prem[1] - 1], st.c1, st.c2);
        if (mode == CpMode::semantic) {
          std::string why;
          if (!detail::cp_sound({&lines[st.prem[0] - 1], &lines[st.prem[1] - 1]}, line,
                                support_cap, why))
            return fail(s + 1, "unsound linear combination: " + why);
        }
        lines.push_back(std::move(line));
        break;
      }
      case K::divide: {
        if (!check_prem(st.prem[0])) return fail(s + 1, "bad premise index");
        if (!count_use(st.prem[0])) return fail(s + 1, "tree violation: premise reused");
        const CpLine& prem = lines[st.prem[0] - 1];
        Int g = prem.coeff_gcd();
        if (g == 0) return fail(s + 1, "division on all-zero coefficients");
        if (st.c1 != g)
          return fail(s + 1, "divisor " + st.c1.str() + " is not the gcd " + g.str());
        CpLine line;
        for (auto& [var, c] : prem.coeffs) line.set(var, c / g);
        // ceil(bound / g): truncation is ceil for negative values
        Int q = prem.bound / g;
        if (prem.bound % g != 0 && prem.bound > 0) q += 1;
        line.bound = q;
        if (mode == CpMode::semantic) {
          std::string why;
          if (!detail::cp_sound({&prem}, line, support_cap, why))
            return fail(s + 1, "unsound division: " + why);
        }
        lines.push_back(std::move(line));
        break;
      }
      case K::semantic: {
        if (mode == CpMode::syntactic)
          return fail(s + 1, "semantic step in syntactic mode");
        if (!check_prem(st.prem[0]) || !check_prem(st.prem[1]))
          return fail(s + 1, "bad premise index");
        if (!count_use(st.prem[0]) || !count_use(st.prem[1]))
          return fail(s + 1, "tree violation: premise reused");
        std::string why;
        if (!detail::cp_sound({&lines[st.prem[0] - 1], &lines[st.prem[1] - 1]}, st.asserted,
                              support_cap, why))
          return fail(s + 1, "unsound semantic step: " + why);
        lines.push_back(st.asserted);
        break;
      }
    }
  }
  if (!lines.back().is_contradiction()) return fail(p.steps.size(), "final line is not 0 >= 1");
  v.ok = true;
  v.length = p.steps.size();
  v.lines = std::move(lines);
  return v;
}

// --- io ----------------------------------------------------------------

inline CpProof parse_cp(std::istream& in, std::uint32_t n_vars) {
  CpProof p;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "tree") {
      p.tree_like = true;
    } else if (tok == "a") {
      std::uint32_t k;
      if (!(ls >> k)) throw ParseError("bad cp axiom: " + line);
      p.add_clause_axiom(k);
    } else if (tok == "b") {
      std::uint32_t var, sign;
      if (!(ls >> var >> sign) || sign > 1) throw ParseError("bad bool axiom: " + line);
      p.add_bool_axiom(var, sign);
    } else if (tok == "l") {
      std::uint32_t i, j;
      std::string c1, c2;
      if (!(ls >> i >> j >> c1 >> c2)) throw ParseError("bad lincomb: " + line);
      p.add_lincomb(i, j, Int(c1), Int(c2));
    } else if (tok == "d") {
      std::uint32_t i;
      std::string c;
      if (!(ls >> i >> c)) throw ParseError("bad divide: " + line);
      p.add_divide(i, Int(c));
    } else if (tok == "s") {
      std::uint32_t i, j;
      std::string colon;
      if (!(ls >> i >> j >> colon) || colon != ":") throw ParseError("bad semantic step: " + line);
      CpLine asserted;
      std::string c;
      for (std::uint32_t var = 1; var <= n_vars; ++var) {
        if (!(ls >> c)) throw ParseError("semantic step: expected " + std::to_string(n_vars) +
                                         " coefficients: " + line);
        asserted.set(var, Int(c));
      }
      std::string geq, b;
      if (!(ls >> geq >> b) || geq != ">=") throw ParseError("bad semantic bound: " + line);
      asserted.bound = Int(b);
      p.add_semantic(i, j, std::move(asserted));
    } else {
      throw ParseError("unknown cp line: " + line);
    }
  }
  return p;
}

inline void write_cp(std::ostream& out, const CpProof& p, std::uint32_t n_vars) {
  if (p.tree_like) out << "tree\n";
  for (const auto& st : p.steps) {
    using K = CpProof::Step::Kind;
    switch (st.kind) {
      case K::clause_axiom:
        out << "a " << st.clause << "\n";
        break;
      case K::bool_axiom:
        out << "b " << st.var << " " << st.sign << "\n";
        break;
      case K::lincomb:
        out << "l " << st.prem[0] << " " << st.prem[1] << " " << st.c1 << " " << st.c2 << "\n";
        break;
      case K::divide:
        out << "d " << st.prem[0] << " " << st.c1 << "\n";
        break;
      case K::semantic: {
        out << "s " << st.prem[0] << " " << st.prem[1] << " :";
        for (std::uint32_t v = 1; v <= n_vars; ++v) {
          auto it = st.asserted.coeffs.find(v);
          out << " " << (it == st.asserted.coeffs.end() ? Int(0) : it->second);
        }
        out << " >= " << st.asserted.bound << "\n";
        break;
      }
    }
  }
}

}  // namespace liftlab
