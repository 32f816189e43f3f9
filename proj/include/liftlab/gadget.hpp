#pragma once

// The index gadget Ind_m and the multi-output column-index gadget
// Ind_{l x m}, plus their canonical query trees.
//
// Conventions, fixed for bit-exact reproducibility:
//  - selector values are 0-based in every API (sel in [0, m)); a selector
//    encodes into t = log2(m) bits most-significant-first, so sel's binary
//    expansion *is* its encoding;
//  - an m-bit row value stores the bit for selector s at position m-1-s
//    (i.e. the written-out bitstring "b(0) b(1) ... b(m-1)" reads left to
//    right by selector).

#include <cstdint>
#include <string>
#include <vector>

#include "liftlab/dtree.hpp"
#include "liftlab/rational.hpp"

namespace liftlab {

struct GadgetParams {
  std::uint32_t m = 2;    // selector-domain size, power of two
  std::uint32_t ell = 1;  // output width
  std::uint32_t t = 1;    // log2(m)

  GadgetParams() = default;
  GadgetParams(std::uint32_t m_, std::uint32_t ell_) : m(m_), ell(ell_) {
    if (m < 2 || !is_power_of_two(Int(m)))
      throw DomainError("gadget: m must be a power of two, m >= 2");
    if (ell == 0) throw DomainError("gadget: l must be positive");
    t = static_cast<std::uint32_t>(ilog2(Int(m)));
  }
};

inline std::uint32_t row_bit(std::uint32_t row, std::uint32_t sel, std::uint32_t m) {
  return (row >> (m - 1 - sel)) & 1u;
}

inline std::uint32_t set_row_bit(std::uint32_t row, std::uint32_t sel, std::uint32_t m,
                                 std::uint32_t bit) {
  std::uint32_t mask = 1u << (m - 1 - sel);
  return bit ? (row | mask) : (row & ~mask);
}

// Ind_m(x, y) := y_x, for l = 1. `row` holds the m bits of y.
inline std::uint32_t eval_index(const GadgetParams& p, std::uint32_t sel, std::uint32_t row) {
  if (p.ell != 1) throw DomainError("eval_index: gadget has l != 1");
  if (sel >= p.m) throw DomainError("eval_index: selector out of range");
  return row_bit(row, sel, p.m);
}

// Ind_{l x m}(x, y) := x-th column of y, read top row to bottom row. The
// matrix is given as l row values; the result packs output bit of row j at
// position l-1-j (same most-significant-first convention as block values).
inline std::uint32_t eval_column_index(const GadgetParams& p, std::uint32_t sel,
                                       const std::vector<std::uint32_t>& rows) {
  if (sel >= p.m) throw DomainError("eval_column_index: selector out of range");
  if (rows.size() != p.ell) throw DomainError("eval_column_index: row count mismatch");
  std::uint32_t out = 0;
  for (std::uint32_t j = 0; j < p.ell; ++j)
    out = (out << 1) | row_bit(rows[j], sel, p.m);
  return out;
}

// Local variable numbering for one gadget: selector bits 1..t (MSB first),
// then matrix bits row-major, var(j, c) = t + j*m + c + 1.
inline std::uint32_t gadget_sel_var(const GadgetParams& p, std::uint32_t bit) {
  (void)p;
  return bit + 1;
}
inline std::uint32_t gadget_mat_var(const GadgetParams& p, std::uint32_t row, std::uint32_t col) {
  return p.t + row * p.m + col + 1;
}
inline std::uint32_t gadget_var_count(const GadgetParams& p) { return p.t + p.ell * p.m; }

// Canonical query tree: read the t selector bits MSB-first, then the l bits
// of the pointed-to column. Depth is exactly t + l; leaves carry the gadget
// output value.
inline DTree gadget_query_tree(const GadgetParams& p) {
  DTree tree;
  // build recursively: selector prefix -> subtree
  std::function<std::int32_t(std::uint32_t, std::uint32_t)> build_col =
      [&](std::uint32_t sel, std::uint32_t j) -> std::int32_t {
    // j bits of the column already decided are encoded in the path; leaves
    // enumerate the remaining suffixes
    std::function<std::int32_t(std::uint32_t, std::uint32_t)> rec =
        [&](std::uint32_t depth, std::uint32_t prefix) -> std::int32_t {
      if (depth == p.ell) return tree.add_leaf(prefix);
      std::int32_t c0 = rec(depth + 1, prefix << 1);
      std::int32_t c1 = rec(depth + 1, (prefix << 1) | 1u);
      return tree.add_query(gadget_mat_var(p, depth, sel), c0, c1);
    };
    return rec(j, 0);
  };
  std::function<std::int32_t(std::uint32_t, std::uint32_t)> build_sel =
      [&](std::uint32_t bit, std::uint32_t prefix) -> std::int32_t {
    if (bit == p.t) return build_col(prefix, 0);
    std::int32_t c0 = build_sel(bit + 1, prefix << 1);
    std::int32_t c1 = build_sel(bit + 1, (prefix << 1) | 1u);
    return tree.add_query(gadget_sel_var(p, bit), c0, c1);
  };
  tree.root = build_sel(0, 0);
  return tree;
}

// evaluate the query tree's variable numbering against a concrete input
inline PartialAssignment gadget_input_assignment(const GadgetParams& p, std::uint32_t sel,
                                                 const std::vector<std::uint32_t>& rows) {
  PartialAssignment a = make_unset(gadget_var_count(p));
  for (std::uint32_t b = 0; b < p.t; ++b)
    a[gadget_sel_var(p, b)] = static_cast<std::int8_t>((sel >> (p.t - 1 - b)) & 1u);
  for (std::uint32_t j = 0; j < p.ell; ++j)
    for (std::uint32_t c = 0; c < p.m; ++c)
      a[gadget_mat_var(p, j, c)] = static_cast<std::int8_t>(row_bit(rows[j], c, p.m));
  return a;
}

}  // namespace liftlab
