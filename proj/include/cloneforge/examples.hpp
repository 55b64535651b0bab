#pragma once
// Small algebras that come up repeatedly. Domain {-,0,+} is encoded 0,1,2.

#include <numeric>
#include <stdexcept>

#include "naming.hpp"
#include "op_table.hpp"

namespace cloneforge {

// sgn(x_1 + ... + x_k) on {-,0,+}.
inline OpTable sign_sum(int k) {
  return OpTable::from_function(3, k, [](const Tuple& x) {
    int s = 0;
    for (Elem e : x) s += static_cast<int>(e) - 1;
    return static_cast<Elem>((s > 0) - (s < 0) + 1);
  });
}

inline Algebra sign_algebra() { return {3, {sign_sum(2)}}; }

// (x_1 + ... + x_k) / k mod p.
inline OpTable mod_average(int p, int k) {
  if (k % p == 0) throw std::invalid_argument("k must be invertible mod p");
  int inv = 1;
  while ((inv * k) % p != 1) ++inv;
  return OpTable::from_function(p, k, [&](const Tuple& x) {
    int s = std::accumulate(x.begin(), x.end(), 0);
    return static_cast<Elem>((s * inv) % p);
  });
}

// Averaging ops of arities 1..p-1 on Z/p: symmetric below p, none of arity p.
inline Algebra averaging_algebra(int p) {
  Algebra a{p, {}};
  for (int k = 1; k < p; ++k) a.ops.push_back(mod_average(p, k));
  return a;
}

inline Algebra binary_algebra(const std::string& name, int n = 0) {
  OpTable f = n ? binary_from_name(name, n) : binary_from_name(name);
  return {f.domain_size(), {f}};
}

}  // namespace cloneforge
