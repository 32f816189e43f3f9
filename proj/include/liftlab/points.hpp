#pragma once

// Tuples and index codecs for composed domains [m]^n x ({0,1}^m)^n with
// single-output gadgets. Indices are block-0-most-significant mixed radix.

#include <cstdint>
#include <vector>

#include "liftlab/gadget.hpp"
#include "liftlab/rational.hpp"

namespace liftlab {

using Tuple = std::vector<std::uint32_t>;

inline std::uint64_t x_index(const Tuple& xs, std::uint32_t m) {
  std::uint64_t idx = 0;
  for (auto v : xs) {
    if (v >= m) throw DomainError("x_index: selector out of range");
    idx = idx * m + v;
  }
  return idx;
}

inline Tuple x_from_index(std::uint64_t idx, std::uint32_t n, std::uint32_t m) {
  Tuple xs(n);
  for (std::uint32_t i = n; i-- > 0;) {
    xs[i] = static_cast<std::uint32_t>(idx % m);
    idx /= m;
  }
  return xs;
}

inline std::uint64_t y_index(const Tuple& ys, std::uint32_t m) {
  std::uint64_t idx = 0;
  for (auto r : ys) {
    if (r >= (1u << m)) throw DomainError("y_index: row out of range");
    idx = (idx << m) | r;
  }
  return idx;
}

inline Tuple y_from_index(std::uint64_t idx, std::uint32_t n, std::uint32_t m) {
  Tuple ys(n);
  for (std::uint32_t i = n; i-- > 0;) {
    ys[i] = static_cast<std::uint32_t>(idx & ((1ull << m) - 1));
    idx >>= m;
  }
  return ys;
}

// z_i = Ind_m(x_i, y_i) for single-output gadgets
inline Tuple decode_z(const Tuple& xs, const Tuple& ys, std::uint32_t m) {
  if (xs.size() != ys.size()) throw DomainError("decode_z: tuple length mismatch");
  Tuple z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = row_bit(ys[i], xs[i], m);
  return z;
}

}  // namespace liftlab
