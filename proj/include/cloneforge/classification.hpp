#pragma once
// Binary symmetric idempotent ops: enumeration, isomorphism classes, the
// reduction maps M1..M4, action detectors and the small-domain pipeline.

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "naming.hpp"
#include "op_table.hpp"
#include "term.hpp"

namespace cloneforge {

inline std::vector<OpTable> enumerate_binary_sym_idem(int n) {
  if (n < 1 || n > 5) throw std::invalid_argument("enumeration supports 1 <= n <= 5");
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cells.emplace_back(i, j);
  std::vector<Elem> t(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i * n + i)] = static_cast<Elem>(i);
  std::vector<OpTable> out;
  std::vector<int> digit(cells.size(), 0);
  for (;;) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto [i, j] = cells[c];
      t[static_cast<std::size_t>(i * n + j)] = t[static_cast<std::size_t>(j * n + i)] = static_cast<Elem>(digit[c]);
    }
    out.emplace_back(n, 2, t);
    std::size_t c = cells.size();
    while (c > 0 && ++digit[c - 1] == n) digit[--c] = 0;
    if (c == 0) break;
  }
  return out;
}

inline std::vector<OpTable> iso_classes(const std::vector<OpTable>& ops) {
  std::set<OpTable> s;
  for (const auto& f : ops) s.insert(canonical_form(f));
  return {s.begin(), s.end()};
}

inline std::vector<std::string> names_of(const std::vector<OpTable>& ops) {
  std::vector<std::string> out;
  for (const auto& f : ops) out.push_back(binary_name(f));
  return out;
}

// ---------------------------------------------------------------------------
// Reduction maps

enum class ReductionMap { M1, M2, M3, M4 };

inline const char* to_string(ReductionMap m) {
  static const char* names[] = {"M1", "M2", "M3", "M4"};
  return names[static_cast<int>(m)];
}

inline Elem map_value(const OpTable& t, ReductionMap m, Elem a, Elem b) {
  auto f = [&](Elem x, Elem y) { return t({x, y}); };
  switch (m) {
    case ReductionMap::M1: return f(f(a, f(a, b)), f(b, f(a, b)));
    case ReductionMap::M2: return f(f(a, f(a, f(a, b))), f(b, f(b, f(a, b))));
    case ReductionMap::M3: return f(f(a, f(b, f(a, b))), f(b, f(a, f(a, b))));
    default: return f(a, f(a, f(b, f(b, f(a, b)))));
  }
}

inline OpTable apply_map(const OpTable& f, ReductionMap m) {
  if (f.arity() != 2) throw std::invalid_argument("reduction maps act on binary ops");
  return binary_from_function(f.domain_size(), [&](int a, int b) {
    return map_value(f, m, static_cast<Elem>(a), static_cast<Elem>(b));
  });
}

// The defining two-variable term, over basic op 0.
inline Term map_term(ReductionMap m) {
  const Term a = Term::var(0), b = Term::var(1);
  auto f = [](const Term& x, const Term& y) { return Term::basic(0, {x, y}); };
  switch (m) {
    case ReductionMap::M1: return f(f(a, f(a, b)), f(b, f(a, b)));
    case ReductionMap::M2: return f(f(a, f(a, f(a, b))), f(b, f(b, f(a, b))));
    case ReductionMap::M3: return f(f(a, f(b, f(a, b))), f(b, f(a, f(a, b))));
    default: return f(a, f(a, f(b, f(b, f(a, b)))));
  }
}

// The periodic part of the orbit of f under m.
inline std::vector<OpTable> map_cycle(const OpTable& f, ReductionMap m) {
  std::vector<OpTable> seen{f};
  for (;;) {
    OpTable g = apply_map(seen.back(), m);
    auto it = std::find(seen.begin(), seen.end(), g);
    if (it != seen.end()) return {it, seen.end()};
    seen.push_back(std::move(g));
  }
}

inline OpTable map_fixpoint(const OpTable& f, ReductionMap m) {
  OpTable best = canonical_form(f);
  bool first = true;
  for (const auto& g : map_cycle(f, m)) {
    OpTable c = canonical_form(g);
    if (first || c < best) best = c;
    first = false;
  }
  return best;
}

// Binary part of the clone generated by f: all binary term ops.
inline std::unordered_set<Tuple, TupleHash> binary_layer(const OpTable& f) {
  const int n = f.domain_size();
  std::vector<Tuple> elems{OpTable::projection(n, 2, 0).table(), OpTable::projection(n, 2, 1).table()};
  std::unordered_set<Tuple, TupleHash> seen(elems.begin(), elems.end());
  Tuple z(elems[0].size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (int o = 0; o < 2; ++o) {
        const Tuple& u = o ? elems[j] : elems[i];
        const Tuple& v = o ? elems[i] : elems[j];
        for (std::size_t c = 0; c < z.size(); ++c) z[c] = f({u[c], v[c]});
        if (seen.insert(z).second) elems.push_back(z);
      }
  return seen;
}

// ---------------------------------------------------------------------------
// Action detectors

inline bool detect_semilattice(const OpTable& f) {
  if (f.arity() != 2 || !is_idempotent(f) || !is_symmetric(f)) return false;
  const int n = f.domain_size();
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      for (Elem c = 0; c < n; ++c)
        if (f({f({a, b}), c}) != f({a, f({b, c})})) return false;
  return true;
}

inline bool closed_on(const OpTable& f, const std::vector<Elem>& sub) {
  Tuple x(static_cast<std::size_t>(f.arity()));
  std::vector<std::size_t> idx(x.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sub[idx[i]];
    if (std::find(sub.begin(), sub.end(), f(x)) == sub.end()) return false;
    std::size_t i = x.size();
    while (i > 0 && ++idx[i - 1] == sub.size()) idx[--i] = 0;
    if (i == 0) return true;
  }
}

// The constant c when f is idempotent on sub and equals c on every
// non-constant tuple over sub.
inline std::optional<Elem> detect_height1(const OpTable& f, const std::vector<Elem>& sub) {
  if (sub.size() < 2) return std::nullopt;
  Tuple x(static_cast<std::size_t>(f.arity()));
  std::vector<std::size_t> idx(x.size(), 0);
  std::optional<Elem> c;
  for (;;) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sub[idx[i]];
    const Elem v = f(x);
    if (std::all_of(x.begin(), x.end(), [&](Elem e) { return e == x[0]; })) {
      if (v != x[0]) return std::nullopt;
    } else if (c && *c != v) {
      return std::nullopt;
    } else {
      c = v;
    }
    std::size_t i = x.size();
    while (i > 0 && ++idx[i - 1] == sub.size()) idx[--i] = 0;
    if (i == 0) break;
  }
  if (!c || std::find(sub.begin(), sub.end(), *c) == sub.end()) return std::nullopt;
  return c;
}

// A renaming sigma (sigma[i] is the image of sub[i]) under which f on sub is
// (x + y) / 2 mod |sub|; the lexicographically first one is returned.
inline std::optional<std::vector<int>> detect_linear(const OpTable& f, const std::vector<Elem>& sub) {
  const int m = static_cast<int>(sub.size());
  if (f.arity() != 2 || m % 2 == 0) return std::nullopt;
  const int half = (m + 1) / 2;  // inverse of 2 mod m
  std::vector<int> sigma(static_cast<std::size_t>(m));
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = 0; j < m && ok; ++j) {
        const Elem v = f({sub[static_cast<std::size_t>(i)], sub[static_cast<std::size_t>(j)]});
        auto it = std::find(sub.begin(), sub.end(), v);
        if (it == sub.end()) {
          ok = false;
          break;
        }
        const int want = (sigma[static_cast<std::size_t>(i)] + sigma[static_cast<std::size_t>(j)]) * half % m;
        ok = sigma[static_cast<std::size_t>(it - sub.begin())] == want;
      }
    if (ok) return sigma;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return std::nullopt;
}

inline std::vector<std::vector<Elem>> subsets_of_size(int n, int m) {
  std::vector<std::vector<Elem>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != m) continue;
    std::vector<Elem> s;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(static_cast<Elem>(i));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ActionReport {
  enum class Kind { Semilattice, Height1, Linear, None } kind = Kind::None;
  std::vector<Elem> subset;
  Elem c = 0;               // Height1
  std::vector<int> sigma;   // Linear
};

inline const char* to_string(ActionReport::Kind k) {
  switch (k) {
    case ActionReport::Kind::Semilattice: return "semilattice";
    case ActionReport::Kind::Height1: return "height1";
    case ActionReport::Kind::Linear: return "linear";
    default: return "none";
  }
}

inline ActionReport classify_action(const OpTable& f, const std::vector<Elem>& sub) {
  ActionReport r;
  r.subset = sub;
  if (auto c = detect_height1(f, sub)) {
    r.kind = ActionReport::Kind::Height1;
    r.c = *c;
  } else if (auto s = detect_linear(f, sub)) {
    r.kind = ActionReport::Kind::Linear;
    r.sigma = *s;
  } else if (static_cast<int>(sub.size()) == f.domain_size() && detect_semilattice(f)) {
    r.kind = ActionReport::Kind::Semilattice;
  }
  return r;
}

// First odd subset of size >= 3 on which f acts linearly.
inline std::optional<ActionReport> linear_subset(const OpTable& f) {
  for (int m = 3; m <= f.domain_size(); m += 2)
    for (const auto& s : subsets_of_size(f.domain_size(), m))
      if (auto sig = detect_linear(f, s)) return ActionReport{ActionReport::Kind::Linear, s, 0, *sig};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineReport {
  int n = 0;
  std::size_t total_ops = 0;
  std::vector<std::string> classes;
  std::vector<std::string> m1_survivors;
  std::array<std::vector<std::string>, 3> removed;  // by M2, M3, M4
  std::vector<std::string> linear_removed;
  std::vector<std::string> final_list;
};

namespace detail {

inline std::vector<std::string> sorted_names(std::set<OpTable> s) {
  return names_of({s.begin(), s.end()});
}

}  // namespace detail

/**
 * Enumerate, canonicalize, keep the M1-periodic classes, prune with M2..M4,
 * then drop ops acting linearly on a three-element subset.
 *
 * f is dropped by map M when some symmetric op g on f's M-cycle leads (via
 * its M1 cycle) to a different surviving class h whose binary layer does
 * not contain f: then <f> properly contains the clone of a survivor.
 */
inline PipelineReport run_pipeline(int n) {
  if (n < 2 || n > 4) throw std::invalid_argument("pipeline supports 2 <= n <= 4");
  PipelineReport rep;
  rep.n = n;
  auto ops = enumerate_binary_sym_idem(n);
  rep.total_ops = ops.size();
  auto classes = iso_classes(ops);
  rep.classes = names_of(classes);

  std::set<OpTable> periodic;
  for (const auto& c : classes)
    for (const auto& g : map_cycle(c, ReductionMap::M1)) periodic.insert(canonical_form(g));
  rep.m1_survivors = detail::sorted_names(periodic);

  std::set<OpTable> alive = periodic;
  const ReductionMap later[] = {ReductionMap::M2, ReductionMap::M3, ReductionMap::M4};
  for (int s = 0; s < 3; ++s) {
    std::set<OpTable> out;
    for (const auto& f : alive) {
      bool drop = false;
      for (const auto& g : map_cycle(f, later[s])) {
        if (drop) break;
        if (!is_symmetric(g)) continue;
        for (const auto& h : map_cycle(g, ReductionMap::M1)) {
          const OpTable hc = canonical_form(h);
          if (hc == f || !alive.count(hc)) continue;
          if (!binary_layer(h).count(f.table())) {
            drop = true;
            break;
          }
        }
      }
      if (drop) out.insert(f);
    }
    rep.removed[static_cast<std::size_t>(s)] = detail::sorted_names(out);
    for (const auto& f : out) alive.erase(f);
  }

  std::set<OpTable> lin;
  for (const auto& f : alive)
    for (const auto& s : subsets_of_size(n, 3))
      if (detect_linear(f, s)) {
        lin.insert(f);
        break;
      }
  rep.linear_removed = detail::sorted_names(lin);
  for (const auto& f : lin) alive.erase(f);
  rep.final_list = detail::sorted_names(alive);
  return rep;
}

}  // namespace cloneforge
