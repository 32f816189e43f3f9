#pragma once

// Real communication protocols: binary trees whose internal nodes carry
// rational row/column labelings a_T, b_T defining the triangle
// T = {(x,y) : a_T(x) < b_T(y)}; an input walks left at v iff it lies in
// T_v. Labelings are exact rationals over the declared finite domains.
//
// Text format:
//   protocol <x_size> <y_size>
//   leaf <id> <output>
//   node <id> <left> <right>
//   arow <id> <q_0> ... <q_{x_size-1}>
//   brow <id> <q_0> ... <q_{y_size-1}>
//   root <id>

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/compose.hpp"
#include "liftlab/dtree.hpp"
#include "liftlab/points.hpp"
#include "liftlab/rational.hpp"

namespace liftlab {

struct RealProtocol {
  struct Node {
    bool leaf = false;
    std::uint32_t output = 0;
    std::int32_t left = -1, right = -1;
    std::vector<Rat> arow, brow;  // internal nodes only, sizes x_size/y_size
  };
  std::uint64_t x_size = 0, y_size = 0;
  std::vector<Node> nodes;
  std::int32_t root = -1;

  void validate() const {
    if (root < 0 || root >= static_cast<std::int32_t>(nodes.size()))
      throw DomainError("protocol: bad root");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (n.leaf) continue;
      if (n.arow.size() != x_size || n.brow.size() != y_size)
        throw DomainError("protocol: labeling not total at node " + std::to_string(i));
      if (n.left < 0 || n.right < 0 || n.left >= static_cast<std::int32_t>(nodes.size()) ||
          n.right >= static_cast<std::int32_t>(nodes.size()))
        throw DomainError("protocol: bad child at node " + std::to_string(i));
    }
  }

  std::size_t depth_of(std::int32_t v) const {
    const Node& n = nodes[static_cast<std::size_t>(v)];
    if (n.leaf) return 0;
    return 1 + std::max(depth_of(n.left), depth_of(n.right));
  }
  std::size_t depth() const { return depth_of(root); }

  bool in_triangle(std::int32_t v, std::uint64_t xi, std::uint64_t yi) const {
    const Node& n = nodes[static_cast<std::size_t>(v)];
    return n.arow[xi] < n.brow[yi];
  }
};

struct ProtocolRun {
  std::uint32_t output = 0;
  std::vector<std::int32_t> path;  // node ids, root to leaf
};

inline ProtocolRun eval_protocol(const RealProtocol& p, std::uint64_t xi, std::uint64_t yi) {
  if (xi >= p.x_size || yi >= p.y_size) throw DomainError("eval_protocol: input out of domain");
  ProtocolRun run;
  std::int32_t v = p.root;
  while (true) {
    run.path.push_back(v);
    const auto& n = p.nodes[static_cast<std::size_t>(v)];
    if (n.leaf) {
      run.output = n.output;
      return run;
    }
    v = p.in_triangle(v, xi, yi) ? n.left : n.right;
  }
}

// Exhaustive check that a protocol solves S_F composed with Ind_m^n: on
// every (x, y) the leaf's source clause is falsified by the decoded z.
inline bool protocol_solves_composed(const RealProtocol& p, const CnfFormula& f,
                                     std::uint32_t n, std::uint32_t m,
                                     std::string* why = nullptr) {
  GadgetParams gp(m, 1);
  if (f.n_vars != n) throw DomainError("protocol_solves_composed: n mismatch");
  std::uint64_t xs = 1, ys = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    xs *= m;
    ys <<= m;
  }
  if (xs != p.x_size || ys != p.y_size)
    throw DomainError("protocol_solves_composed: domain size mismatch");
  if (n * m + n * gp.t > 26) throw DomainError("protocol_solves_composed: domain too large");
  for (std::uint64_t xi = 0; xi < xs; ++xi) {
    Tuple x = x_from_index(xi, n, m);
    for (std::uint64_t yi = 0; yi < ys; ++yi) {
      Tuple y = y_from_index(yi, n, m);
      Tuple z = decode_z(x, y, m);
      PartialAssignment za = make_unset(n);
      for (std::uint32_t i = 0; i < n; ++i) za[i + 1] = static_cast<std::int8_t>(z[i]);
      std::uint32_t o = eval_protocol(p, xi, yi).output;
      if (o < 1 || o > f.clauses.size() || f.clauses[o - 1].eval(za) != 0) {
        if (why)
          *why = "input (x=" + std::to_string(xi) + ", y=" + std::to_string(yi) +
                 ") gets invalid output " + std::to_string(o);
        return false;
      }
    }
  }
  return true;
}

// Turn a decision tree over composed variables (layout from compose_single)
// into a real protocol of the same depth. A query of Alice's selector bit
// uses a_T(x) = -bit, b_T == -1/2; a query of Bob's matrix bit uses
// a_T == 1/2, b_T(y) = bit; in both cases bit 1 walks left. Leaf labels are
// remapped through `leaf_out` (identity when null).
inline RealProtocol protocol_from_decision_tree(
    const DTree& t, const ComposeLayout& lay,
    const std::vector<std::uint32_t>* leaf_out = nullptr) {
  if (lay.ell != 1) throw DomainError("protocol_from_decision_tree: gadget must have l = 1");
  RealProtocol p;
  std::uint64_t xs = 1, ys = 1;
  for (std::uint32_t i = 0; i < lay.n; ++i) {
    xs *= lay.m;
    ys <<= lay.m;
  }
  p.x_size = xs;
  p.y_size = ys;

  std::function<std::int32_t(std::int32_t)> build = [&](std::int32_t ti) -> std::int32_t {
    const auto& n = t.nodes[static_cast<std::size_t>(ti)];
    RealProtocol::Node pn;
    if (n.leaf()) {
      pn.leaf = true;
      pn.output = leaf_out ? (*leaf_out)[n.label] : n.label;
    } else {
      std::uint32_t w = n.var - 1;
      std::uint32_t block = w / lay.vars_per_block();
      std::uint32_t off = w % lay.vars_per_block();
      pn.left = build(n.child[1]);
      pn.right = build(n.child[0]);
      if (off < lay.t) {
        // Alice's bit: selector bit `off` of block `block`
        pn.arow.resize(xs);
        for (std::uint64_t xi = 0; xi < xs; ++xi) {
          Tuple x = x_from_index(xi, lay.n, lay.m);
          std::uint32_t bit = (x[block] >> (lay.t - 1 - off)) & 1u;
          pn.arow[xi] = bit ? Rat(-1) : Rat(0);
        }
        pn.brow.assign(ys, Rat(-1, 2));
      } else {
        std::uint32_t col = off - lay.t;  // row 0 of the block, column `col`
        pn.arow.assign(xs, Rat(1, 2));
        pn.brow.resize(ys);
        for (std::uint64_t yi = 0; yi < ys; ++yi) {
          Tuple y = y_from_index(yi, lay.n, lay.m);
          pn.brow[yi] = Rat(row_bit(y[block], col, lay.m));
        }
      }
    }
    p.nodes.push_back(std::move(pn));
    return static_cast<std::int32_t>(p.nodes.size() - 1);
  };
  p.root = build(t.root);
  p.validate();
  return p;
}

// --- io ----------------------------------------------------------------

inline void write_protocol(std::ostream& out, const RealProtocol& p) {
  out << "protocol " << p.x_size << " " << p.y_size << "\n";
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const auto& n = p.nodes[i];
    if (n.leaf) {
      out << "leaf " << i << " " << n.output << "\n";
    } else {
      out << "node " << i << " " << n.left << " " << n.right << "\n";
      out << "arow " << i;
      for (const auto& q : n.arow) out << " " << rat_str(q);
      out << "\n";
      out << "brow " << i;
      for (const auto& q : n.brow) out << " " << rat_str(q);
      out << "\n";
    }
  }
  out << "root " << p.root << "\n";
}

inline RealProtocol parse_protocol(std::istream& in) {
  RealProtocol p;
  std::string line;
  bool header = false, root_seen = false;
  auto need = [&](std::size_t id) -> RealProtocol::Node& {
    if (id >= p.nodes.size()) p.nodes.resize(id + 1);
    return p.nodes[id];
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "protocol") {
      if (!(ls >> p.x_size >> p.y_size) || p.x_size == 0 || p.y_size == 0)
        throw ParseError("bad protocol header: " + line);
      header = true;
    } else if (tok == "leaf") {
      std::size_t id;
      std::uint32_t o;
      if (!(ls >> id >> o)) throw ParseError("bad leaf: " + line);
      auto& n = need(id);
      n.leaf = true;
      n.output = o;
    } else if (tok == "node") {
      std::size_t id;
      std::int32_t l, r;
      if (!(ls >> id >> l >> r)) throw ParseError("bad node: " + line);
      auto& n = need(id);
      n.leaf = false;
      n.left = l;
      n.right = r;
    } else if (tok == "arow" || tok == "brow") {
      std::size_t id;
      if (!(ls >> id)) throw ParseError("bad labeling: " + line);
      auto& n = need(id);
      std::vector<Rat>& row = tok == "arow" ? n.arow : n.brow;
      std::string q;
      while (ls >> q) row.push_back(parse_rat(q));
      std::uint64_t want = tok == "arow" ? p.x_size : p.y_size;
      if (!header || row.size() != want)
        throw ParseError("labeling has wrong length: " + line);
    } else if (tok == "root") {
      if (!(ls >> p.root)) throw ParseError("bad root: " + line);
      root_seen = true;
    } else {
      throw ParseError("unknown protocol line: " + line);
    }
  }
  if (!header || !root_seen) throw ParseError("incomplete protocol");
  p.validate();
  return p;
}

}  // namespace liftlab
