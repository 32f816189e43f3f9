#pragma once

// Total search relations S over bit-string inputs: either an explicit table
// or backed by a CNF formula (outputs = falsified clause indices).

#include <cstdint>
#include <variant>
#include <vector>

#include "liftlab/cnf.hpp"

namespace liftlab {

// valid[x] = sorted list of outputs (1-based) valid on input x; input x has
// the bit of variable v at position v-1
struct ExplicitRelation {
  std::uint32_t bits = 0;
  std::uint32_t n_outputs = 0;
  std::vector<std::vector<std::uint32_t>> valid;
};

struct SearchRelation {
  using Explicit = ExplicitRelation;

  std::variant<Explicit, CnfFormula> impl;

  static SearchRelation from_cnf(CnfFormula f) {
    SearchRelation s;
    s.impl = std::move(f);
    return s;
  }
  static SearchRelation from_table(Explicit e) {
    if (e.valid.size() != (1ull << e.bits))
      throw DomainError("relation: table size mismatch");
    SearchRelation s;
    s.impl = std::move(e);
    return s;
  }

  std::uint32_t bits() const {
    if (auto* e = std::get_if<Explicit>(&impl)) return e->bits;
    return std::get<CnfFormula>(impl).n_vars;
  }

  std::uint32_t n_outputs() const {
    if (auto* e = std::get_if<Explicit>(&impl)) return e->n_outputs;
    return static_cast<std::uint32_t>(std::get<CnfFormula>(impl).clauses.size());
  }

  static std::uint64_t pack(const PartialAssignment& a) {
    std::uint64_t x = 0;
    for (std::size_t v = 1; v < a.size(); ++v) {
      if (a[v] < 0) throw DomainError("relation: partial assignment");
      x |= static_cast<std::uint64_t>(a[v]) << (v - 1);
    }
    return x;
  }

  static PartialAssignment unpack(std::uint64_t x, std::uint32_t bits) {
    PartialAssignment a = make_unset(bits);
    for (std::uint32_t v = 1; v <= bits; ++v)
      a[v] = static_cast<std::int8_t>((x >> (v - 1)) & 1u);
    return a;
  }

  bool is_valid(const PartialAssignment& a, std::uint32_t output) const {
    if (auto* e = std::get_if<Explicit>(&impl)) {
      const auto& outs = e->valid[pack(a)];
      return std::binary_search(outs.begin(), outs.end(), output);
    }
    const auto& f = std::get<CnfFormula>(impl);
    if (output < 1 || output > f.clauses.size()) return false;
    return f.clauses[output - 1].eval(a) == 0;
  }

  std::vector<std::uint32_t> outputs_for(const PartialAssignment& a) const {
    if (auto* e = std::get_if<Explicit>(&impl)) return e->valid[pack(a)];
    return falsified_clauses(std::get<CnfFormula>(impl), a);
  }

  // totality: S(x) nonempty for every input (enumerable sizes only)
  bool is_total() const {
    std::uint32_t b = bits();
    if (b > 24) throw DomainError("relation: too many bits to enumerate");
    for (std::uint64_t x = 0; x < (1ull << b); ++x)
      if (outputs_for(unpack(x, b)).empty()) return false;
    return true;
  }
};

}  // namespace liftlab
