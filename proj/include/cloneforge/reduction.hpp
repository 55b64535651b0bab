#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "op_table.hpp"

namespace cloneforge {

struct IdempotentReduction {
  std::vector<OpTable> ops;                       // g_1, g_2, ...
  bool collapsed = false;                         // second construction used
  std::optional<std::pair<Elem, Elem>> merged;    // (a, b) with u^N(a) = u^N(b) = a
  std::vector<int> exponents;                     // N_k, or the single N when collapsed
};

inline std::vector<Elem> unary_of(const OpTable& f) {
  std::vector<Elem> u(static_cast<std::size_t>(f.domain_size()));
  Tuple x(static_cast<std::size_t>(f.arity()));
  for (int a = 0; a < f.domain_size(); ++a) {
    std::fill(x.begin(), x.end(), static_cast<Elem>(a));
    u[static_cast<std::size_t>(a)] = f(x);
  }
  return u;
}

inline std::vector<Elem> unary_power(const std::vector<Elem>& u, int e) {
  std::vector<Elem> r(u.size());
  for (std::size_t a = 0; a < u.size(); ++a) {
    Elem x = static_cast<Elem>(a);
    for (int i = 0; i < e; ++i) x = u[x];
    r[a] = x;
  }
  return r;
}

inline bool injective(const std::vector<Elem>& u) {
  std::vector<bool> hit(u.size(), false);
  for (Elem e : u) {
    if (hit[e]) return false;
    hit[e] = true;
  }
  return true;
}

inline OpTable map_inputs_outputs(const OpTable& f, const std::vector<Elem>& in, const std::vector<Elem>* out) {
  Tuple y(static_cast<std::size_t>(f.arity()));
  return OpTable::from_function(f.domain_size(), f.arity(), [&](const Tuple& x) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = in[x[i]];
    Elem v = f(y);
    return out ? (*out)[v] : v;
  });
}

/**
 * Idempotent reduction of symmetric f_1..f_m (f_j of arity j).
 * All u_k(x) = f_k(x..x) permutations: g_k = f_k(u_k^{N_k-1}(x_i)) with N_k the order of u_k.
 * Otherwise, for the first non-injective u_k with idempotent power u^N:
 * g_k = u^N(f_k(u^N(x_i))), which cannot tell a from b.
 */
inline IdempotentReduction idempotent_reduction(const std::vector<OpTable>& fs) {
  IdempotentReduction out;
  for (std::size_t j = 0; j < fs.size(); ++j)
    if (fs[j].arity() != static_cast<int>(j + 1) || !is_symmetric(fs[j]))
      throw std::invalid_argument("expected symmetric f_j of arity j");
  std::vector<std::vector<Elem>> us;
  for (const auto& f : fs) us.push_back(unary_of(f));
  const int n = fs.empty() ? 1 : fs[0].domain_size();
  const std::vector<Elem> id = identity_perm(n);

  auto bad = std::find_if(us.begin(), us.end(), [](const auto& u) { return !injective(u); });
  if (bad == us.end()) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      int N = 1;
      while (unary_power(us[j], N) != id) ++N;
      out.exponents.push_back(N);
      out.ops.push_back(map_inputs_outputs(fs[j], unary_power(us[j], N - 1), nullptr));
    }
    return out;
  }
  const auto& u = *bad;
  int N = 1;
  while (unary_power(u, 2 * N) != unary_power(u, N)) ++N;
  const auto uN = unary_power(u, N);
  for (int b = 0; b < n && !out.merged; ++b)
    if (uN[static_cast<std::size_t>(b)] != b) out.merged = std::make_pair(uN[static_cast<std::size_t>(b)], static_cast<Elem>(b));
  out.collapsed = true;
  out.exponents.push_back(N);
  for (const auto& f : fs) out.ops.push_back(map_inputs_outputs(f, uN, &uN));
  return out;
}

}  // namespace cloneforge
