#pragma once

// Conjunction-labeled dags (decision-dags) solving a search relation, their
// verifier, and the standard translation from Resolution proofs.
//
// Dag conditions: a unique root with the empty conjunction; every non-leaf
// with children u, u' covers its feasible set by the children's; every leaf
// carries an output o with feasible set inside S^-1(o). Out-degree <= 2.
//
// Text format:
//   dag <n_bits> <n_vertices>
//   vertex <id> conj <lits...> 0 children <ids...> 0 [output <o>]
// Vertex ids are 0-based except inside the 0-terminated children list,
// where they are shifted up by one; conjunction literals are DIMACS-signed.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/relation.hpp"
#include "liftlab/resolution.hpp"

namespace liftlab {

struct ConjunctionDag {
  struct Vertex {
    Clause conj;  // conjunction of literals (same canonical storage)
    std::vector<std::int32_t> children;  // 0..2 entries
    bool has_output = false;
    std::uint32_t output = 0;
  };
  std::uint32_t n_bits = 0;
  std::vector<Vertex> vertices;

  std::size_t size() const { return vertices.size(); }

  std::size_t max_block_width(const BlockStructure& b) const {
    std::size_t w = 0;
    for (const auto& v : vertices)
      w = std::max<std::size_t>(w, clause_block_width(v.conj, b));
    return w;
  }
};

struct DagVerdict {
  bool ok = false;
  std::string reason;
  std::int32_t bad_vertex = -1;
};

namespace detail {

// enumerate total assignments consistent with the conjunction; callback
// returns false to abort early
template <typename F>
bool for_each_in_subcube(const Clause& conj, std::uint32_t n_bits, F&& cb) {
  PartialAssignment a = make_unset(n_bits);
  std::vector<std::uint32_t> free_vars;
  for (auto l : conj.lits) {
    auto v = static_cast<std::uint32_t>(std::abs(l));
    if (v > n_bits) throw DomainError("dag: conjunction variable out of range");
    a[v] = l > 0 ? 1 : 0;
  }
  for (std::uint32_t v = 1; v <= n_bits; ++v)
    if (a[v] < 0) free_vars.push_back(v);
  if (free_vars.size() > 26) throw DomainError("dag: subcube too large to enumerate");
  for (std::uint64_t mask = 0; mask < (1ull << free_vars.size()); ++mask) {
    for (std::size_t k = 0; k < free_vars.size(); ++k)
      a[free_vars[k]] = static_cast<std::int8_t>((mask >> k) & 1u);
    if (!cb(a)) return false;
  }
  return true;
}

inline bool conj_satisfied(const Clause& conj, const PartialAssignment& a) {
  for (auto l : conj.lits) {
    std::int8_t v = a[static_cast<std::size_t>(std::abs(l))];
    if ((l > 0) != (v == 1)) return false;
  }
  return true;
}

}  // namespace detail

inline DagVerdict verify_decision_dag(const SearchRelation& s, const ConjunctionDag& dag) {
  DagVerdict v;
  auto fail = [&](std::int32_t vertex, const std::string& why) {
    v.ok = false;
    v.bad_vertex = vertex;
    v.reason = why;
    return v;
  };
  if (dag.vertices.empty()) return fail(-1, "empty dag");
  if (dag.n_bits != s.bits()) return fail(-1, "dag bit-count does not match relation");

  // structure: in-degrees, out-degrees, acyclicity
  std::vector<std::uint32_t> indeg(dag.vertices.size(), 0);
  for (std::size_t i = 0; i < dag.vertices.size(); ++i) {
    const auto& vx = dag.vertices[i];
    if (vx.children.size() > 2) return fail(static_cast<std::int32_t>(i), "out-degree > 2");
    for (auto c : vx.children) {
      if (c < 0 || c >= static_cast<std::int32_t>(dag.vertices.size()))
        return fail(static_cast<std::int32_t>(i), "child index out of range");
      indeg[static_cast<std::size_t>(c)]++;
    }
  }
  std::int32_t root = -1;
  for (std::size_t i = 0; i < dag.vertices.size(); ++i) {
    if (indeg[i] == 0) {
      if (root >= 0) return fail(static_cast<std::int32_t>(i), "multiple roots");
      root = static_cast<std::int32_t>(i);
    }
  }
  if (root < 0) return fail(-1, "no root (cycle)");
  if (!dag.vertices[static_cast<std::size_t>(root)].conj.empty())
    return fail(root, "root conjunction not empty");
  // acyclicity via Kahn's algorithm
  {
    std::vector<std::uint32_t> deg = indeg;
    std::vector<std::int32_t> queue{root};
    std::size_t seen = 0;
    while (!queue.empty()) {
      std::int32_t u = queue.back();
      queue.pop_back();
      ++seen;
      for (auto c : dag.vertices[static_cast<std::size_t>(u)].children)
        if (--deg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
    }
    if (seen != dag.vertices.size()) return fail(-1, "dag contains a cycle");
  }

  for (std::size_t i = 0; i < dag.vertices.size(); ++i) {
    const auto& vx = dag.vertices[i];
    if (vx.children.empty()) {
      if (!vx.has_output) return fail(static_cast<std::int32_t>(i), "leaf with no output");
      bool ok = detail::for_each_in_subcube(vx.conj, dag.n_bits, [&](const PartialAssignment& a) {
        return s.is_valid(a, vx.output);
      });
      if (!ok)
        return fail(static_cast<std::int32_t>(i),
                    "leaf output " + std::to_string(vx.output) + " invalid on some input");
    } else {
      if (vx.has_output) return fail(static_cast<std::int32_t>(i), "internal vertex with output");
      const Clause& c0 = dag.vertices[static_cast<std::size_t>(vx.children[0])].conj;
      const Clause& c1 =
          dag.vertices[static_cast<std::size_t>(vx.children[vx.children.size() - 1])].conj;
      bool ok = detail::for_each_in_subcube(vx.conj, dag.n_bits, [&](const PartialAssignment& a) {
        return detail::conj_satisfied(c0, a) || detail::conj_satisfied(c1, a);
      });
      if (!ok)
        return fail(static_cast<std::int32_t>(i), "children do not cover the feasible set");
    }
  }
  v.ok = true;
  return v;
}

// Standard proof-to-dag translation: one vertex per step reachable from the
// final (empty-clause) step, labeled with the negation of the step's clause;
// a resolvent's children are its premises; axiom steps become leaves that
// output their formula clause index. Dead steps are pruned so the dag has a
// single root.
inline ConjunctionDag resolution_to_dag(const CnfFormula& f, const ResolutionVerdict& verdict,
                                        const ResolutionProof& proof) {
  if (!verdict.ok) throw DomainError("resolution_to_dag: proof did not verify");
  std::size_t n = proof.steps.size();
  std::vector<bool> reach(n, false);
  std::vector<std::size_t> stack{n - 1};
  reach[n - 1] = true;
  while (!stack.empty()) {
    std::size_t s = stack.back();
    stack.pop_back();
    const auto& st = proof.steps[s];
    if (st.kind == ResolutionProof::Step::Kind::resolve)
      for (int k = 0; k < 2; ++k)
        if (!reach[st.prem[k] - 1]) {
          reach[st.prem[k] - 1] = true;
          stack.push_back(st.prem[k] - 1);
        }
  }
  std::vector<std::int32_t> id(n, -1);
  ConjunctionDag dag;
  dag.n_bits = f.n_vars;
  for (std::size_t s = 0; s < n; ++s) {
    if (!reach[s]) continue;
    ConjunctionDag::Vertex vx;
    std::vector<std::int32_t> neg;
    for (auto l : verdict.derived[s].lits) neg.push_back(-l);
    vx.conj = Clause(std::move(neg));
    const auto& st = proof.steps[s];
    if (st.kind == ResolutionProof::Step::Kind::axiom) {
      vx.has_output = true;
      vx.output = st.clause;
    } else {
      vx.children.push_back(id[st.prem[0] - 1]);
      vx.children.push_back(id[st.prem[1] - 1]);
    }
    dag.vertices.push_back(std::move(vx));
    id[s] = static_cast<std::int32_t>(dag.vertices.size() - 1);
  }
  return dag;
}

// --- io ----------------------------------------------------------------

inline void write_dag(std::ostream& out, const ConjunctionDag& dag) {
  out << "dag " << dag.n_bits << " " << dag.vertices.size() << "\n";
  for (std::size_t i = 0; i < dag.vertices.size(); ++i) {
    const auto& vx = dag.vertices[i];
    out << "vertex " << i << " conj";
    for (auto l : vx.conj.lits) out << " " << l;
    out << " 0 children";
    for (auto c : vx.children) out << " " << (c + 1);
    out << " 0";
    if (vx.has_output) out << " output " << vx.output;
    out << "\n";
  }
}

inline ConjunctionDag parse_dag(std::istream& in) {
  ConjunctionDag dag;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "dag") {
      std::size_t nv;
      if (!(ls >> dag.n_bits >> nv)) throw ParseError("bad dag header: " + line);
      dag.vertices.resize(nv);
      header = true;
    } else if (tok == "vertex") {
      if (!header) throw ParseError("vertex before dag header");
      std::size_t id;
      std::string kw;
      if (!(ls >> id >> kw) || id >= dag.vertices.size() || kw != "conj")
        throw ParseError("bad vertex line: " + line);
      ConjunctionDag::Vertex vx;
      std::int64_t l;
      std::vector<std::int32_t> lits;
      while (ls >> l && l != 0) lits.push_back(static_cast<std::int32_t>(l));
      vx.conj = Clause(std::move(lits));
      if (!(ls >> kw) || kw != "children") throw ParseError("bad vertex line: " + line);
      while (ls >> l && l != 0) vx.children.push_back(static_cast<std::int32_t>(l - 1));
      if (ls >> kw) {
        if (kw != "output") throw ParseError("bad vertex tail: " + line);
        if (!(ls >> vx.output)) throw ParseError("bad output: " + line);
        vx.has_output = true;
      }
      dag.vertices[id] = std::move(vx);
    } else {
      throw ParseError("unknown dag line: " + line);
    }
  }
  if (!header) throw ParseError("missing dag header");
  return dag;
}

}  // namespace liftlab
