#pragma once

// The two constructive refutation-lifting transformations.
//
// Dag lifting: each block-width-b conjunction of the source dag expands
// into the family of m^b conjunctions that pin its touched blocks'
// selectors and point at the witnessing matrix bits; children touching one
// new block are joined through connector trees that query that block's
// selector MSB-first.
//
// Tree lifting: each query of z_i is replaced by the gadget query tree of
// block i (selector bits then the pointed bit); leaves output the composed
// certificate clause of the source leaf's clause under the path's selector
// assignment.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftlab/compose.hpp"
#include "liftlab/dag.hpp"
#include "liftlab/dtree.hpp"
#include "liftlab/oracle.hpp"
#include "liftlab/resolution.hpp"

namespace liftlab {

struct LiftedDag {
  ConjunctionDag dag;
  ComposeResult composed;  // formula + manifest for F o Ind
  // provenance: per dag vertex, the source proof step (1-based; 0 for
  // connector-tree vertices)
  std::vector<std::uint32_t> source_step;
  std::size_t family_vertices = 0;
  std::size_t connector_vertices = 0;
};

namespace detail {

inline std::string alpha_key(std::uint32_t src,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& alpha) {
  std::string k = std::to_string(src);
  for (auto& [b, s] : alpha) {
    k += ':';
    k += std::to_string(b);
    k += ',';
    k += std::to_string(s);
  }
  return k;
}

}  // namespace detail

inline LiftedDag lift_dag_refutation(const CnfFormula& f, const BlockStructure& blocks,
                                     const ResolutionProof& proof, std::uint32_t m,
                                     std::uint64_t size_budget = 10000000) {
  auto verdict = verify_resolution(f, proof, &blocks);
  if (!verdict.ok)
    throw DomainError("lift_dag_refutation: proof does not verify: " + verdict.reason);

  LiftedDag out;
  out.composed = compose_block(f, blocks, m, size_budget);
  const ComposeLayout& lay = out.composed.manifest.layout;

  // composed clause index by (source clause, alpha)
  std::unordered_map<std::string, std::uint32_t> clause_index;
  for (std::size_t c = 0; c < out.composed.manifest.prov.size(); ++c)
    clause_index[detail::alpha_key(out.composed.manifest.prov[c].src_clause,
                                   out.composed.manifest.prov[c].alpha)] =
        static_cast<std::uint32_t>(c + 1);

  // reachable source steps (dead steps pruned, as in resolution_to_dag)
  std::size_t n_steps = proof.steps.size();
  std::vector<bool> reach(n_steps, false);
  {
    std::vector<std::size_t> stack{n_steps - 1};
    reach[n_steps - 1] = true;
    while (!stack.empty()) {
      std::size_t s = stack.back();
      stack.pop_back();
      if (proof.steps[s].kind == ResolutionProof::Step::Kind::resolve)
        for (int k = 0; k < 2; ++k)
          if (!reach[proof.steps[s].prem[k] - 1]) {
            reach[proof.steps[s].prem[k] - 1] = true;
            stack.push_back(proof.steps[s].prem[k] - 1);
          }
    }
  }

  // touched blocks (0-based, ascending) of each step's clause
  std::vector<std::vector<std::uint32_t>> touched(n_steps);
  for (std::size_t s = 0; s < n_steps; ++s) {
    if (!reach[s]) continue;
    std::set<std::uint32_t> tb;
    for (auto l : verdict.derived[s].lits)
      tb.insert(blocks.block_of[static_cast<std::uint32_t>(std::abs(l))] - 1);
    touched[s] = {tb.begin(), tb.end()};
  }

  // the lifted conjunction for (step, alpha over its touched blocks)
  auto lifted_conj = [&](std::size_t s, const Tuple& alpha) -> Clause {
    std::vector<std::int32_t> lits;
    for (std::size_t k = 0; k < touched[s].size(); ++k) {
      std::uint32_t i = touched[s][k];
      for (std::uint32_t p = 0; p < lay.t; ++p) {
        std::uint32_t bit = (alpha[k] >> (lay.t - 1 - p)) & 1u;
        auto sv = static_cast<std::int32_t>(lay.sel_var(i, p));
        lits.push_back(bit ? sv : -sv);
      }
    }
    for (auto l : verdict.derived[s].lits) {
      // conjunction literal is the negation of the clause literal; the
      // pointed matrix bit carries the same negated polarity
      std::uint32_t v = static_cast<std::uint32_t>(std::abs(l));
      std::uint32_t blk = blocks.block_of[v] - 1;
      std::uint32_t row = 0;
      while (blocks.block_vars[blk][row] != v) ++row;
      std::size_t k = static_cast<std::size_t>(
          std::lower_bound(touched[s].begin(), touched[s].end(), blk) - touched[s].begin());
      auto mv = static_cast<std::int32_t>(lay.mat_var(blk, row, alpha[k]));
      lits.push_back(l > 0 ? -mv : mv);
    }
    return Clause(std::move(lits));
  };

  // vertex ids per (step, alpha) — alpha in odometer order, last block fastest
  std::vector<std::map<Tuple, std::int32_t>> family(n_steps);
  ConjunctionDag& dag = out.dag;
  dag.n_bits = lay.total_vars();

  auto add_vertex = [&](Clause conj, std::uint32_t src_step) -> std::int32_t {
    if (dag.vertices.size() >= size_budget)
      throw BudgetError("lift_dag_refutation: size budget exceeded");
    ConjunctionDag::Vertex vx;
    vx.conj = std::move(conj);
    dag.vertices.push_back(std::move(vx));
    out.source_step.push_back(src_step);
    return static_cast<std::int32_t>(dag.vertices.size() - 1);
  };

  // process steps in proof order so premises' families exist first
  for (std::size_t s = 0; s < n_steps; ++s) {
    if (!reach[s]) continue;
    const auto& st = proof.steps[s];
    Tuple alpha(touched[s].size(), 0);
    while (true) {
      std::int32_t vid = add_vertex(lifted_conj(s, alpha), static_cast<std::uint32_t>(s + 1));
      ++out.family_vertices;
      family[s][alpha] = vid;

      if (st.kind == ResolutionProof::Step::Kind::axiom) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> key;
        for (std::size_t k = 0; k < touched[s].size(); ++k)
          key.emplace_back(touched[s][k], alpha[k]);
        auto it = clause_index.find(detail::alpha_key(st.clause, key));
        if (it == clause_index.end())
          throw DomainError("lift_dag_refutation: missing composed clause for certificate");
        dag.vertices[static_cast<std::size_t>(vid)].has_output = true;
        dag.vertices[static_cast<std::size_t>(vid)].output = it->second;
      } else {
        std::size_t p0 = st.prem[0] - 1, p1 = st.prem[1] - 1;
        // restriction of alpha to a premise's touched blocks
        auto restrict_alpha = [&](std::size_t prem, std::uint32_t new_block,
                                  std::uint32_t new_sel) -> Tuple {
          Tuple a;
          for (auto b : touched[prem]) {
            if (b == new_block) {
              a.push_back(new_sel);
              continue;
            }
            auto pos = std::lower_bound(touched[s].begin(), touched[s].end(), b);
            if (pos == touched[s].end() || *pos != b)
              throw DomainError("lift_dag_refutation: child touches more than one new block");
            a.push_back(alpha[static_cast<std::size_t>(pos - touched[s].begin())]);
          }
          return a;
        };
        std::vector<std::uint32_t> new_blocks;
        for (int kk = 0; kk < 2; ++kk)
          for (auto b : touched[kk == 0 ? p0 : p1])
            if (!std::binary_search(touched[s].begin(), touched[s].end(), b))
              new_blocks.push_back(b);
        std::sort(new_blocks.begin(), new_blocks.end());
        new_blocks.erase(std::unique(new_blocks.begin(), new_blocks.end()), new_blocks.end());
        if (new_blocks.size() > 1)
          throw DomainError("lift_dag_refutation: children touch more than one new block");

        if (new_blocks.empty()) {
          std::uint32_t sentinel = UINT32_MAX;
          dag.vertices[static_cast<std::size_t>(vid)].children.push_back(
              family[p0].at(restrict_alpha(p0, sentinel, 0)));
          dag.vertices[static_cast<std::size_t>(vid)].children.push_back(
              family[p1].at(restrict_alpha(p1, sentinel, 0)));
        } else {
          // connector tree: query the new block's selector bits MSB-first
          std::uint32_t nb = new_blocks[0];
          std::function<std::int32_t(std::uint32_t, std::uint32_t, std::int32_t)> connect =
              [&](std::uint32_t depth, std::uint32_t prefix, std::int32_t at) -> std::int32_t {
            if (depth == lay.t) {
              dag.vertices[static_cast<std::size_t>(at)].children.push_back(
                  family[p0].at(restrict_alpha(p0, nb, prefix)));
              dag.vertices[static_cast<std::size_t>(at)].children.push_back(
                  family[p1].at(restrict_alpha(p1, nb, prefix)));
              return at;
            }
            for (std::uint32_t bit = 0; bit < 2; ++bit) {
              Clause conj = dag.vertices[static_cast<std::size_t>(at)].conj;
              std::vector<std::int32_t> lits = conj.lits;
              auto sv = static_cast<std::int32_t>(lay.sel_var(nb, depth));
              lits.push_back(bit ? sv : -sv);
              std::int32_t child = add_vertex(Clause(std::move(lits)), 0);
              ++out.connector_vertices;
              dag.vertices[static_cast<std::size_t>(at)].children.push_back(child);
              connect(depth + 1, (prefix << 1) | bit, child);
            }
            return at;
          };
          connect(0, 0, vid);
        }
      }

      std::size_t k = alpha.size();
      while (k > 0 && ++alpha[k - 1] == m) alpha[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

struct LiftedTree {
  DTree tree;
  ComposeResult composed;
};

// Replace each query of z_i with the gadget query tree of block i; the
// source leaf's clause together with the selectors read along the path
// names the composed certificate clause the lifted leaf outputs.
inline LiftedTree lift_tree_refutation(const CnfFormula& f, const DTree& tree, std::uint32_t m,
                                       std::uint64_t size_budget = 10000000) {
  std::string why;
  if (!tree_solves_formula(tree, f, &why))
    throw DomainError("lift_tree_refutation: tree does not solve S_F: " + why);

  LiftedTree out;
  out.composed = compose_single(f, m, size_budget);
  const ComposeLayout& lay = out.composed.manifest.layout;

  std::unordered_map<std::string, std::uint32_t> clause_index;
  for (std::size_t c = 0; c < out.composed.manifest.prov.size(); ++c)
    clause_index[detail::alpha_key(out.composed.manifest.prov[c].src_clause,
                                   out.composed.manifest.prov[c].alpha)] =
        static_cast<std::uint32_t>(c + 1);

  // sel[i] = selector fixed for block i on the current path (m = unset)
  std::vector<std::uint32_t> sel(f.n_vars, m);
  std::function<std::int32_t(std::int32_t)> build = [&](std::int32_t src) -> std::int32_t {
    if (out.tree.nodes.size() >= size_budget)
      throw BudgetError("lift_tree_refutation: size budget exceeded");
    const DTree::Node& n = tree.nodes[static_cast<std::size_t>(src)];
    if (n.leaf()) {
      const Clause& c = f.clauses[n.label - 1];
      std::vector<std::pair<std::uint32_t, std::uint32_t>> key;
      std::set<std::uint32_t> tb;
      for (auto l : c.lits) tb.insert(static_cast<std::uint32_t>(std::abs(l)) - 1);
      for (auto b : tb) {
        if (sel[b] == m)
          throw DomainError("lift_tree_refutation: leaf clause block without selector on path");
        key.emplace_back(b, sel[b]);
      }
      auto it = clause_index.find(detail::alpha_key(n.label, key));
      if (it == clause_index.end())
        throw DomainError("lift_tree_refutation: missing composed clause for certificate");
      return out.tree.add_leaf(it->second);
    }
    std::uint32_t block = n.var - 1;  // unit blocks: variable i is block i-1
    // selector subtree, then the pointed bit, then the source children
    std::function<std::int32_t(std::uint32_t, std::uint32_t)> desc =
        [&](std::uint32_t depth, std::uint32_t prefix) -> std::int32_t {
      if (depth == lay.t) {
        std::uint32_t saved = sel[block];
        sel[block] = prefix;
        std::int32_t c0 = build(n.child[0]);
        std::int32_t c1 = build(n.child[1]);
        sel[block] = saved;
        return out.tree.add_query(lay.mat_var(block, 0, prefix), c0, c1);
      }
      std::int32_t b0 = desc(depth + 1, prefix << 1);
      std::int32_t b1 = desc(depth + 1, (prefix << 1) | 1u);
      return out.tree.add_query(lay.sel_var(block, depth), b0, b1);
    };
    return desc(0, 0);
  };
  out.tree.root = build(tree.root);
  return out;
}

// exhaustive check that a lifted tree solves the composed formula's search
// problem
inline bool tree_solves_composed(const DTree& t, const CnfFormula& composed) {
  return tree_solves_formula(t, composed);
}

}  // namespace liftlab
