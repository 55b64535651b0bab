#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "op_table.hpp"

namespace cloneforge {

// Off-diagonal cells that name a symmetric idempotent binary op.
// n = 3 lists f(0,+), f(-,+), f(-,0); n >= 4 lists f(0,1), f(0,2), ..., f(n-2,n-1).
inline std::vector<std::pair<int, int>> name_cells(int n) {
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cells.emplace_back(i, j);
  if (n == 3) std::reverse(cells.begin(), cells.end());
  return cells;
}

inline char sign_symbol(Elem e) { return "-0+"[e]; }

inline int parse_symbol(char c, int n) {
  if (n == 3) {
    if (c == '-') return 0;
    if (c == '0') return 1;
    if (c == '+') return 2;
  } else if (c >= '0' && c - '0' < n) {
    return c - '0';
  }
  throw std::invalid_argument(std::string("bad symbol in operation name: ") + c);
}

// "f_000132" / "f_+-0" for symmetric idempotent binary ops.
inline std::string binary_name(const OpTable& op) {
  if (op.arity() != 2 || !is_idempotent(op) || !is_symmetric(op))
    throw std::invalid_argument("names exist only for symmetric idempotent binary ops");
  std::string s = "f_";
  for (auto [i, j] : name_cells(op.domain_size())) {
    Elem v = op({static_cast<Elem>(i), static_cast<Elem>(j)});
    s += op.domain_size() == 3 ? sign_symbol(v) : static_cast<char>('0' + v);
  }
  return s;
}

inline OpTable binary_from_name(std::string s, int n) {
  if (s.rfind("f_", 0) == 0) s = s.substr(2);
  auto cells = name_cells(n);
  if (s.size() != cells.size()) throw std::invalid_argument("operation name has wrong length");
  std::vector<Elem> t(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i * n + i)] = static_cast<Elem>(i);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto [i, j] = cells[c];
    Elem v = static_cast<Elem>(parse_symbol(s[c], n));
    t[static_cast<std::size_t>(i * n + j)] = v;
    t[static_cast<std::size_t>(j * n + i)] = v;
  }
  return OpTable(n, 2, std::move(t));
}

// Domain size is read off the name length when it is unambiguous.
inline OpTable binary_from_name(const std::string& s) {
  std::string body = s.rfind("f_", 0) == 0 ? s.substr(2) : s;
  for (int n = 2; n <= kMaxDomain; ++n)
    if (static_cast<int>(body.size()) == n * (n - 1) / 2) return binary_from_name(body, n);
  throw std::invalid_argument("cannot infer domain size from name");
}

}  // namespace cloneforge
