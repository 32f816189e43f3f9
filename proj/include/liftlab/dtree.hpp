#pragma once

// Binary decision trees over 1-based bit variables. Leaf labels are opaque
// 32-bit payloads; gadget trees store output strings, formula trees store
// clause indices.

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"

namespace liftlab {

struct DTree {
  struct Node {
    std::uint32_t var = 0;  // 0 for leaf
    std::int32_t child[2] = {-1, -1};
    std::uint32_t label = 0;  // leaf payload
    bool leaf() const { return var == 0; }
  };
  std::vector<Node> nodes;
  std::int32_t root = -1;

  std::int32_t add_leaf(std::uint32_t label) {
    nodes.push_back(Node{0, {-1, -1}, label});
    return static_cast<std::int32_t>(nodes.size() - 1);
  }
  std::int32_t add_query(std::uint32_t var, std::int32_t c0, std::int32_t c1) {
    if (var == 0) throw DomainError("DTree: variable 0");
    nodes.push_back(Node{var, {c0, c1}, 0});
    return static_cast<std::int32_t>(nodes.size() - 1);
  }

  std::size_t size() const { return nodes.size(); }

  std::size_t depth() const { return depth_of(root); }
  std::size_t depth_of(std::int32_t v) const {
    if (v < 0) throw DomainError("DTree: missing child");
    const Node& n = nodes[static_cast<std::size_t>(v)];
    if (n.leaf()) return 0;
    return 1 + std::max(depth_of(n.child[0]), depth_of(n.child[1]));
  }

  // walk under a total assignment; returns leaf label
  std::uint32_t eval(const PartialAssignment& a) const {
    std::vector<std::uint32_t> path;
    return eval_path(a, path);
  }
  std::uint32_t eval_path(const PartialAssignment& a, std::vector<std::uint32_t>& queried) const {
    std::int32_t v = root;
    while (true) {
      if (v < 0) throw DomainError("DTree: missing child");
      const Node& n = nodes[static_cast<std::size_t>(v)];
      if (n.leaf()) return n.label;
      std::int8_t val = a[n.var];
      if (val < 0) throw DomainError("DTree: unassigned variable queried");
      queried.push_back(n.var);
      v = n.child[val];
    }
  }
};

// exhaustive check that a tree solves S_F (leaf labels are 1-based clause
// indices falsified by every input reaching them)
inline bool tree_solves_formula(const DTree& t, const CnfFormula& f, std::string* why = nullptr) {
  if (f.n_vars > 24) throw DomainError("tree_solves_formula: too many variables");
  std::uint64_t total = 1ull << f.n_vars;
  for (std::uint64_t x = 0; x < total; ++x) {
    PartialAssignment a = make_unset(f.n_vars);
    for (std::uint32_t v = 1; v <= f.n_vars; ++v)
      a[v] = static_cast<std::int8_t>((x >> (v - 1)) & 1u);
    std::uint32_t k = t.eval(a);
    if (k < 1 || k > f.clauses.size() || f.clauses[k - 1].eval(a) != 0) {
      if (why) {
        std::ostringstream os;
        os << "input " << x << " reaches leaf labeled " << k << " which is not falsified";
        *why = os.str();
      }
      return false;
    }
  }
  return true;
}

inline void write_dtree(std::ostream& out, const DTree& t) {
  out << "dtree " << t.nodes.size() << "\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (n.leaf())
      out << "node " << i << " leaf " << n.label << "\n";
    else
      out << "node " << i << " query " << n.var << " " << n.child[0] << " " << n.child[1]
          << "\n";
  }
  out << "root " << t.root << "\n";
}

inline DTree parse_dtree(std::istream& in) {
  DTree t;
  std::string line;
  long long count = -1;
  bool root_seen = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "dtree") {
      if (!(ls >> count) || count < 0) throw ParseError("bad dtree header: " + line);
      t.nodes.resize(static_cast<std::size_t>(count));
    } else if (tok == "node") {
      std::size_t id;
      std::string kind;
      if (count < 0 || !(ls >> id >> kind) || id >= t.nodes.size())
        throw ParseError("bad dtree node: " + line);
      if (kind == "leaf") {
        std::uint32_t label;
        if (!(ls >> label)) throw ParseError("bad leaf: " + line);
        t.nodes[id] = DTree::Node{0, {-1, -1}, label};
      } else if (kind == "query") {
        std::uint32_t var;
        std::int32_t c0, c1;
        if (!(ls >> var >> c0 >> c1) || var == 0) throw ParseError("bad query: " + line);
        t.nodes[id] = DTree::Node{var, {c0, c1}, 0};
      } else {
        throw ParseError("bad node kind: " + line);
      }
    } else if (tok == "root") {
      if (!(ls >> t.root)) throw ParseError("bad root: " + line);
      root_seen = true;
    } else {
      throw ParseError("unknown dtree line: " + line);
    }
  }
  if (count < 0 || !root_seen) throw ParseError("incomplete dtree");
  if (t.root < 0 || t.root >= static_cast<std::int32_t>(t.nodes.size()))
    throw ParseError("dtree root out of range");
  return t;
}

}  // namespace liftlab
