#pragma once

// Query simulation of a real protocol for S_F o Ind_m^n into a decision
// procedure for S_F (single-output gadgets, one block per variable).
//
// State per iteration: protocol node v, rectangle R = X x Y over the full
// composed domain, block partial assignment rho. Each round selects a
// quadrant R' of R that is contained in or disjoint from the node's
// triangle, applies the Round Lemma to the free-block projection of R',
// queries the returned blocks, and descends.

#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liftlab/cnf.hpp"
#include "liftlab/points.hpp"
#include "liftlab/protocol.hpp"
#include "liftlab/report.hpp"
#include "liftlab/round.hpp"

namespace liftlab {

struct SimRect {
  std::vector<Tuple> xs;  // sorted
  std::vector<Tuple> ys;  // sorted

  std::size_t size() const { return xs.size() * ys.size(); }

  static SimRect full(std::uint32_t n, std::uint32_t m) {
    SimRect r;
    std::uint64_t xd = 1, yd = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      xd *= m;
      yd <<= m;
    }
    if (n * m + 2 * n > 30) throw DomainError("SimRect::full: domain too large");
    for (std::uint64_t xi = 0; xi < xd; ++xi) r.xs.push_back(x_from_index(xi, n, m));
    for (std::uint64_t yi = 0; yi < yd; ++yi) r.ys.push_back(y_from_index(yi, n, m));
    return r;
  }
};

struct QuadrantChoice {
  SimRect rect;
  bool contained = false;  // in the triangle (else disjoint)
  bool took_r1 = true;
};

// Fig.-2 quadrant fact: sort rows by a_T and columns by b_T; the first
// quadrant (low-a x high-b, ceiling halves) is contained in T or the fourth
// (high-a x low-b) is disjoint from it. Preference order: R1 contained,
// R1 disjoint, R4. The winner's status is verified exhaustively.
inline QuadrantChoice quadrant_select(const SimRect& r, const RealProtocol::Node& node,
                                      std::uint32_t m) {
  if (r.xs.empty() || r.ys.empty()) throw DomainError("quadrant_select: empty rectangle");
  auto asort = r.xs;
  auto bsort = r.ys;
  std::stable_sort(asort.begin(), asort.end(), [&](const Tuple& p, const Tuple& q) {
    const Rat &ap = node.arow[x_index(p, m)], &aq = node.arow[x_index(q, m)];
    return ap != aq ? ap < aq : p < q;
  });
  std::stable_sort(bsort.begin(), bsort.end(), [&](const Tuple& p, const Tuple& q) {
    const Rat &bp = node.brow[y_index(p, m)], &bq = node.brow[y_index(q, m)];
    return bp != bq ? bp < bq : p < q;
  });
  std::size_t px = asort.size(), py = bsort.size();
  std::size_t hx = (px + 1) / 2, hy = (py + 1) / 2;

  auto in_tri = [&](const Tuple& x, const Tuple& y) {
    return node.arow[x_index(x, m)] < node.brow[y_index(y, m)];
  };
  auto status = [&](const std::vector<Tuple>& xs, const std::vector<Tuple>& ys, bool& contained,
                    bool& disjoint) {
    contained = true;
    disjoint = true;
    for (const auto& x : xs)
      for (const auto& y : ys) {
        if (in_tri(x, y))
          disjoint = false;
        else
          contained = false;
        if (!contained && !disjoint) return;
      }
  };

  auto make = [&](bool r1) {
    SimRect q;
    if (r1) {
      q.xs.assign(asort.begin(), asort.begin() + static_cast<std::ptrdiff_t>(hx));
      q.ys.assign(bsort.end() - static_cast<std::ptrdiff_t>(hy), bsort.end());
    } else {
      q.xs.assign(asort.end() - static_cast<std::ptrdiff_t>(hx), asort.end());
      q.ys.assign(bsort.begin(), bsort.begin() + static_cast<std::ptrdiff_t>(hy));
    }
    std::sort(q.xs.begin(), q.xs.end());
    std::sort(q.ys.begin(), q.ys.end());
    return q;
  };

  QuadrantChoice choice;
  choice.rect = make(true);
  bool c, d;
  status(choice.rect.xs, choice.rect.ys, c, d);
  if (c || d) {
    choice.contained = c;
    choice.took_r1 = true;
  } else {
    choice.rect = make(false);
    choice.took_r1 = false;
    status(choice.rect.xs, choice.rect.ys, c, d);
    if (!d) throw DomainError("quadrant_select: quadrant fact violated");
    choice.contained = false;
  }
  if (4 * choice.rect.size() < r.size())
    throw DomainError("quadrant_select: selected quadrant smaller than |R|/4");
  return choice;
}

struct FixingCheck {
  bool ok = false;
  std::int32_t bad_block = -1;
  std::string detail;
};

// Lemma-6.1-style image check: Z = Ind_m^n(R) has Z_i = {rho_i} on fixed
// blocks and Z_i = {0,1} on free blocks.
inline FixingCheck fixing_check(const SimRect& r, const BlockPartialAssignment& rho,
                                std::uint32_t m) {
  FixingCheck res;
  std::uint32_t n = rho.n_blocks;
  for (std::uint32_t i = 0; i < n; ++i) {
    bool has[2] = {false, false};
    for (const auto& x : r.xs)
      for (const auto& y : r.ys) has[row_bit(y[i], x[i], m)] = true;
    if (rho.value[i]) {
      std::uint32_t want = *rho.value[i];
      if (has[1 - want] || !has[want]) {
        res.bad_block = static_cast<std::int32_t>(i);
        res.detail = "fixed block " + std::to_string(i) + " image mismatch";
        return res;
      }
    } else if (!has[0] || !has[1]) {
      res.bad_block = static_cast<std::int32_t>(i);
      res.detail = "free block " + std::to_string(i) + " output collapsed";
      return res;
    }
  }
  res.ok = true;
  return res;
}

struct SimOptions {
  RoundThresholds round;
  std::uint64_t query_budget = UINT64_MAX;
  bool require_fixing = true;
};

struct SimResult {
  bool ok = false;
  std::uint32_t output = 0;  // 1-based source clause index
  std::uint64_t queried_blocks = 0;
  std::uint64_t fixing_violations = 0;
  std::vector<std::string> transcript;
  std::string error;
};

// Walk the protocol maintaining (v, R, rho); z supplies the queried values
// (z[i] for block i, 0-based). The returned clause is checked to be
// falsified within fix(rho) and by z itself.
inline SimResult simulate_protocol(const RealProtocol& p, const CnfFormula& f, std::uint32_t n,
                                   std::uint32_t m,
                                   const std::function<std::uint32_t(std::uint32_t)>& z,
                                   const SimOptions& opts = {}) {
  GadgetParams gp(m, 1);
  SimResult res;
  if (f.n_vars != n) {
    res.error = "formula/block count mismatch";
    return res;
  }
  SimRect r = SimRect::full(n, m);
  auto rho = BlockPartialAssignment::all_free(n, 1);
  std::int32_t v = p.root;
  std::uint64_t iter = 0;

  auto log_state = [&](const std::string& what) {
    std::ostringstream os;
    os << "iter=" << iter << " node=" << v << " |X|=" << r.xs.size() << " |Y|=" << r.ys.size()
       << " fixed=" << rho.fixed_blocks().size() << " " << what;
    res.transcript.push_back(os.str());
  };

  while (true) {
    const auto& node = p.nodes[static_cast<std::size_t>(v)];
    if (node.leaf) break;
    ++iter;
    QuadrantChoice quad = quadrant_select(r, node, m);
    auto free = rho.free_blocks();

    // project the quadrant onto the free blocks
    Rect proj;
    proj.N = static_cast<std::uint32_t>(free.size());
    proj.m = m;
    {
      std::set<Tuple> px, py;
      for (const auto& x : quad.rect.xs) {
        Tuple t;
        for (auto i : free) t.push_back(x[i]);
        px.insert(std::move(t));
      }
      for (const auto& y : quad.rect.ys) {
        Tuple t;
        for (auto i : free) t.push_back(y[i]);
        py.insert(std::move(t));
      }
      proj.xs.assign(px.begin(), px.end());
      proj.ys.assign(py.begin(), py.end());
    }

    RoundOutcome round = round_lemma_find(proj, opts.round);
    if (!round.success) {
      res.error = "round lemma failed: " + round.error;
      log_state("round-lemma-failure");
      return res;
    }

    // query the chosen blocks
    std::vector<std::uint32_t> blocks;
    for (auto k : round.I) blocks.push_back(free[k]);
    std::uint32_t zmask = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      std::uint32_t bit = z(blocks[k]);
      if (bit > 1) throw DomainError("simulate: query callback returned a non-bit");
      zmask = (zmask << 1) | bit;
    }
    res.queried_blocks += blocks.size();
    const RoundBranch& br = round.branches[zmask];

    // pull the branch subrectangle back to the full domain
    std::set<Tuple> keep_x(br.x_prime.begin(), br.x_prime.end());
    std::set<Tuple> keep_y(br.y_prime.begin(), br.y_prime.end());
    SimRect next;
    for (const auto& x : quad.rect.xs) {
      Tuple t;
      for (auto i : free) t.push_back(x[i]);
      if (keep_x.count(t)) next.xs.push_back(x);
    }
    for (const auto& y : quad.rect.ys) {
      Tuple t;
      for (auto i : free) t.push_back(y[i]);
      if (keep_y.count(t)) next.ys.push_back(y);
    }
    r = std::move(next);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      rho.value[blocks[k]] = (zmask >> (blocks.size() - 1 - k)) & 1u;

    {
      std::ostringstream os;
      os << "quadrant=" << (quad.took_r1 ? "R1" : "R4")
         << (quad.contained ? " contained" : " disjoint") << " queried=";
      for (auto b : blocks) os << b << ",";
      os << " z=" << zmask;
      log_state(os.str());
    }

    FixingCheck fc = fixing_check(r, rho, m);
    if (!fc.ok) {
      ++res.fixing_violations;
      log_state("fixing-check-failure: " + fc.detail);
      if (opts.require_fixing) {
        res.error = "fixing check failed: " + fc.detail;
        return res;
      }
    }
    if (res.queried_blocks > opts.query_budget) {
      res.error = "query budget exceeded";
      log_state("budget-exceeded");
      return res;
    }
    v = quad.contained ? node.left : node.right;
  }

  const auto& leaf = p.nodes[static_cast<std::size_t>(v)];
  res.output = leaf.output;
  if (leaf.output < 1 || leaf.output > f.clauses.size()) {
    res.error = "leaf output is not a clause index";
    return res;
  }
  // justification: the clause must be falsified within fix(rho)
  const Clause& c = f.clauses[leaf.output - 1];
  for (auto l : c.lits) {
    std::uint32_t blk = static_cast<std::uint32_t>(std::abs(l)) - 1;
    if (!rho.value[blk]) {
      res.error = "leaf clause touches a free block (protocol does not solve the problem)";
      return res;
    }
    std::uint32_t zv = *rho.value[blk];
    if ((l > 0) == (zv == 1)) {
      res.error = "leaf clause not falsified by the fixed assignment";
      return res;
    }
  }
  // and by the actual input
  for (auto l : c.lits) {
    std::uint32_t bit = z(static_cast<std::uint32_t>(std::abs(l)) - 1);
    if ((l > 0) == (bit == 1)) {
      res.error = "leaf clause not falsified by z";
      return res;
    }
  }
  res.ok = res.error.empty();
  log_state("output=" + std::to_string(res.output));
  return res;
}

inline SimResult simulate_protocol(const RealProtocol& p, const CnfFormula& f, std::uint32_t n,
                                   std::uint32_t m, const PartialAssignment& z,
                                   const SimOptions& opts = {}) {
  return simulate_protocol(
      p, f, n, m,
      [&](std::uint32_t block) { return static_cast<std::uint32_t>(z[block + 1]); }, opts);
}

}  // namespace liftlab
