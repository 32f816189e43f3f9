#pragma once

// rho-structured boxes and rho-like sets. A box is a product set
// X x prod_{ij} Y^{ij} inside [m]^n x prod ({0,1}^m); rho assigns each block
// an l-bit value or leaves it free. "R is rho-like" means the gadget image
// of R is exactly Cube(rho).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/entropy.hpp"
#include "liftlab/gadget.hpp"
#include "liftlab/logval.hpp"
#include "liftlab/report.hpp"

namespace liftlab {

struct Box {
  std::uint32_t n = 1, ell = 1, m = 2;
  std::vector<Tuple> xs;                        // X, sorted, selectors 0-based
  std::vector<std::vector<std::uint32_t>> rows;  // (i*ell + j) -> sorted row values

  const std::vector<std::uint32_t>& y(std::uint32_t i, std::uint32_t j) const {
    return rows[i * ell + j];
  }

  void validate() const {
    if (xs.empty()) throw DomainError("box: empty X");
    if (rows.size() != static_cast<std::size_t>(n) * ell)
      throw DomainError("box: wrong number of row sets");
    for (const auto& x : xs) {
      if (x.size() != n) throw DomainError("box: selector tuple arity mismatch");
      for (auto v : x)
        if (v >= m) throw DomainError("box: selector out of range");
    }
    for (const auto& yset : rows) {
      if (yset.empty()) throw DomainError("box: empty Y component");
      for (auto r : yset)
        if (r >= (1u << m)) throw DomainError("box: row value out of range");
    }
  }

  FiniteDistribution x_marginal(const std::vector<std::uint32_t>& blocks) const {
    FiniteDistribution full = FiniteDistribution::uniform_over(
        std::vector<std::uint32_t>(n, m), xs);
    return full.marginal(blocks);
  }
};

struct StructThresholds {
  Rat entropy_frac = Rat(9, 10);           // condition 2: >= frac * log m
  std::optional<BitsBound> defect_bound;   // condition 3; defaults to sqrt(m)
};

struct StructReport {
  bool pass = false;
  std::vector<ReportLine> lines;
};

// Definition of rho-structuredness, checked exactly:
//   1. gadgets on fixed blocks produce exactly rho there;
//   2. X marginal on free blocks has blockwise min-entropy >= frac * log m;
//   3. each free-block Y^{ij} has deficiency <= defect bound.
inline StructReport is_rho_structured(const Box& r, const BlockPartialAssignment& rho,
                                      const StructThresholds& th = {}) {
  r.validate();
  if (rho.n_blocks != r.n || rho.block_size != r.ell)
    throw DomainError("is_rho_structured: rho dimensions mismatch");
  GadgetParams gp(r.m, r.ell);
  BitsBound defect = th.defect_bound ? *th.defect_bound : BitsBound::sqrt_m(r.m);
  StructReport rep;

  // condition 1: fixed gadgets
  bool fixed_ok = true;
  for (auto i : rho.fixed_blocks()) {
    std::vector<bool> sel_used(r.m, false);
    for (const auto& x : r.xs) sel_used[x[i]] = true;
    for (std::uint32_t j = 0; j < r.ell && fixed_ok; ++j) {
      std::uint32_t want = (*rho.value[i] >> (r.ell - 1 - j)) & 1u;
      for (std::uint32_t sel = 0; sel < r.m && fixed_ok; ++sel) {
        if (!sel_used[sel]) continue;
        for (auto row : r.y(i, j))
          if (row_bit(row, sel, r.m) != want) {
            fixed_ok = false;
            break;
          }
      }
    }
  }
  rep.lines.push_back({"fixed_blocks_match_rho", fixed_ok ? "exact" : "violated", "exact",
                       fixed_ok});

  // condition 2: blockwise min-entropy of X on free blocks
  auto free = rho.free_blocks();
  Rat target = th.entropy_frac * gp.t;
  if (free.empty()) {
    rep.lines.push_back({"x_free_blockwise_min_entropy", "inf", rat_str(target) + " bits", true});
  } else {
    auto bw = r.x_marginal(free).blockwise_min_entropy();
    bool ok = geq_bits(bw.value, target);
    rep.lines.push_back(
        {"x_free_blockwise_min_entropy", bw.value.str(), rat_str(target) + " bits", ok});
  }

  // condition 3: Y^{ij} deficiency for free blocks
  bool y_ok = true;
  LogVal worst = LogVal::zero();
  for (auto i : free)
    for (std::uint32_t j = 0; j < r.ell; ++j) {
      LogVal d(Rat(pow2i(r.m), Int(r.y(i, j).size())), 1);
      if (cmp(d, worst) == Cmp::gt) worst = d;
      if (!leq_bound(d, defect)) y_ok = false;
    }
  rep.lines.push_back({"y_deficiency_max", free.empty() ? "none" : worst.str(),
                       defect.str() + " bits", y_ok});

  rep.pass = report_all_pass(rep.lines);
  return rep;
}

// gadget image of the slice {x} x prod Y^{ij}; output bits are independent,
// so the image is the product of the per-(i,j) pointed-bit sets
inline bool is_rho_like_slice(const Box& r, const Tuple& x, const BlockPartialAssignment& rho) {
  if (x.size() != r.n) throw DomainError("is_rho_like_slice: bad x");
  for (std::uint32_t i = 0; i < r.n; ++i)
    for (std::uint32_t j = 0; j < r.ell; ++j) {
      bool has[2] = {false, false};
      for (auto row : r.y(i, j)) has[row_bit(row, x[i], r.m)] = true;
      if (rho.value[i]) {
        std::uint32_t want = (*rho.value[i] >> (r.ell - 1 - j)) & 1u;
        if (has[1 - want] || !has[want]) return false;
      } else {
        if (!has[0] || !has[1]) return false;
      }
    }
  return true;
}

// Explicit composed points (x, all rows). Image computed by enumeration and
// compared with Cube(rho) exactly.
struct ComposedPoint {
  Tuple x;                          // n selectors
  std::vector<std::uint32_t> rows;  // n*l row values, (i*l + j)
};

inline bool is_rho_like(const std::vector<ComposedPoint>& a, std::uint32_t n, std::uint32_t ell,
                        std::uint32_t m, const BlockPartialAssignment& rho) {
  if (rho.n_blocks != n || rho.block_size != ell)
    throw DomainError("is_rho_like: rho dimensions mismatch");
  std::set<Tuple> image;
  for (const auto& pt : a) {
    Tuple z(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t zi = 0;
      for (std::uint32_t j = 0; j < ell; ++j)
        zi = (zi << 1) | row_bit(pt.rows[i * ell + j], pt.x[i], m);
      z[i] = zi;
    }
    if (!rho.cube_contains(z)) return false;
    image.insert(std::move(z));
  }
  Int cube_size = 1;
  for (std::uint32_t i = 0; i < n; ++i)
    if (!rho.value[i]) cube_size *= pow2i(ell);
  return Int(image.size()) == cube_size;
}

struct GoodXResult {
  bool found = false;
  Tuple x;
  Rat union_bound_total = 0;  // sum over free (i,j) of Pr[x_i bad for Y^{ij}]
  std::string error;
  std::vector<ReportLine> lines;
};

// Constructive form of the good-x lemma: measure the exact union bound
// sum_{ij} Pr[x_i in BAD_ij] where BAD_ij is the set of selectors whose bit
// is constant across Y^{ij}; when the total is < 1 a good x exists, and the
// first one in domain order is returned after an unconditional rho-likeness
// post-check of its slice.
inline GoodXResult find_good_x(const Box& r, const BlockPartialAssignment& rho,
                               const StructThresholds& th = {}) {
  GoodXResult res;
  auto srep = is_rho_structured(r, rho, th);
  if (!srep.pass) {
    res.error = "box is not rho-structured";
    res.lines = srep.lines;
    return res;
  }
  auto free = rho.free_blocks();
  Rat total = 0;
  for (auto i : free) {
    for (std::uint32_t j = 0; j < r.ell; ++j) {
      std::vector<bool> bad(r.m, true);
      const auto& yset = r.y(i, j);
      for (std::uint32_t sel = 0; sel < r.m; ++sel) {
        std::uint32_t first = row_bit(yset[0], sel, r.m);
        for (auto row : yset)
          if (row_bit(row, sel, r.m) != first) {
            bad[sel] = false;
            break;
          }
      }
      std::size_t cnt = 0;
      for (const auto& x : r.xs)
        if (bad[x[i]]) ++cnt;
      total += Rat(Int(cnt), Int(r.xs.size()));
    }
  }
  res.union_bound_total = total;
  bool feasible = total < 1;
  res.lines.push_back({"union_bound_total", rat_str(total), "1", feasible});
  if (!feasible) {
    res.error = "union bound infeasible at this scale (slack " + rat_str(total - 1) + ")";
    return res;
  }
  for (const auto& x : r.xs) {
    if (is_rho_like_slice(r, x, rho)) {
      res.found = true;
      res.x = x;
      res.lines.push_back({"good_x_slice_rho_like", "true", "true", true});
      return res;
    }
  }
  // unreachable when the union bound is feasible; kept as a hard error
  res.error = "no good x found despite feasible union bound";
  return res;
}

}  // namespace liftlab
