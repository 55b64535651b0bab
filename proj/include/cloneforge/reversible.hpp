#pragma once
// Reversible relations: the six checks for binary relations and the general
// composition-closure definition for arbitrary arity.

#include <optional>
#include <string>
#include <vector>

#include "binrel.hpp"
#include "lp.hpp"

namespace cloneforge {

enum class RevCondition { A, B, C, D, E, F };

inline const char* to_string(RevCondition c) {
  static const char* names[] = {"a", "b", "c", "d", "e", "f"};
  return names[static_cast<int>(c)];
}

inline RevCondition parse_condition(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == to_string(static_cast<RevCondition>(i))) return static_cast<RevCondition>(i);
  throw std::invalid_argument("unknown condition " + s);
}

struct RevResult {
  bool holds = true;
  std::optional<ElemSet> set;                     // B with B + P = B but B - P != B
  std::optional<std::pair<Elem, Elem>> edge;      // edge on no directed cycle
  std::optional<int> exponent;                    // (d): R^- within R^{o n}
  std::vector<Rational> distribution;             // (e): weights on the edges, in edge order
  std::vector<int> word;                          // (f) / general: composition word
};

// First B (by mask) with B + P = B and B - P != B.
inline std::optional<ElemSet> plus_minus_violation(const BinRel& p, ElemSet universe) {
  for (ElemSet b = 1; b <= universe; ++b) {
    if ((b & ~universe) != 0) continue;
    if (plus(b, p) == b && minus(b, p) != b) return b;
  }
  return std::nullopt;
}

namespace detail {

// reach[x]: vertices reachable from x by a path of length >= 0
inline std::vector<ElemSet> reachability(const BinRel& r) {
  const int n = r.n();
  std::vector<ElemSet> reach(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) reach[static_cast<std::size_t>(x)] = (ElemSet{1} << x) | r.successors(x);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      if ((reach[static_cast<std::size_t>(x)] >> k) & 1u) reach[static_cast<std::size_t>(x)] |= reach[static_cast<std::size_t>(k)];
  return reach;
}

inline RevResult check_a(const BinRel& r) {
  RevResult res;
  if (auto b = plus_minus_violation(r, full_set(r.n()))) {
    res.holds = false;
    res.set = b;
  }
  return res;
}

// weak components equal strong components
inline RevResult check_b(const BinRel& r) {
  RevResult res;
  const auto reach = reachability(r);
  const auto wreach = reachability(BinRel(r.n(), r.bits() | reverse(r).bits()));
  for (int x = 0; x < r.n(); ++x)
    for (Elem y : set_elems(wreach[static_cast<std::size_t>(x)])) {
      const bool strong = ((reach[static_cast<std::size_t>(x)] >> y) & 1u) && ((reach[y] >> x) & 1u);
      if (!strong) {
        res.holds = false;
        // an edge leaving the strong component of x within the weak component
        for (int u = 0; u < r.n(); ++u)
          for (int v = 0; v < r.n(); ++v)
            if (r.has(u, v) && !((reach[static_cast<std::size_t>(v)] >> u) & 1u)) {
              res.edge = {static_cast<Elem>(u), static_cast<Elem>(v)};
              return res;
            }
        return res;
      }
    }
  return res;
}

// every edge lies on a directed cycle
inline RevResult check_c(const BinRel& r) {
  RevResult res;
  const auto reach = reachability(r);
  for (int u = 0; u < r.n(); ++u)
    for (int v = 0; v < r.n(); ++v)
      if (r.has(u, v) && !((reach[static_cast<std::size_t>(v)] >> u) & 1u)) {
        res.holds = false;
        res.edge = {static_cast<Elem>(u), static_cast<Elem>(v)};
        return res;
      }
  return res;
}

// R^- within R^{o k} for some k; powers of R are eventually periodic
inline RevResult check_d(const BinRel& r) {
  RevResult res;
  const BinRel rev = reverse(r);
  std::map<std::uint64_t, int> seen;
  BinRel p = r;
  for (int k = 1;; ++k) {
    if (rev.subset_of(p)) {
      res.exponent = k;
      return res;
    }
    if (!seen.emplace(p.bits(), k).second) break;
    p = compose(p, r);
  }
  res.holds = false;
  return res;
}

// positive distribution on R with equal marginals: maximize t, p_e >= t
inline RevResult check_e(const BinRel& r) {
  RevResult res;
  std::vector<std::pair<int, int>> edges;
  for (int x = 0; x < r.n(); ++x)
    for (int y = 0; y < r.n(); ++y)
      if (r.has(x, y)) edges.emplace_back(x, y);
  const int m = static_cast<int>(edges.size());
  if (m == 0) {
    res.holds = false;
    return res;
  }
  LinearProgram lp(m + 1);
  std::vector<std::pair<int, Rational>> sum;
  for (int e = 0; e < m; ++e) sum.emplace_back(e, 1);
  lp.add_row(sum, RowSense::Eq, 1);
  for (int a = 0; a < r.n(); ++a) {
    std::vector<std::pair<int, Rational>> row;
    for (int e = 0; e < m; ++e) {
      if (edges[static_cast<std::size_t>(e)].first == a) row.emplace_back(e, 1);
      if (edges[static_cast<std::size_t>(e)].second == a) row.emplace_back(e, -1);
    }
    if (!row.empty()) lp.add_row(row, RowSense::Eq, 0);
  }
  for (int e = 0; e < m; ++e) lp.add_row({{e, 1}, {m, -1}}, RowSense::Ge, 0);
  lp.objective.assign(static_cast<std::size_t>(m + 1), Rational(0));
  lp.objective[static_cast<std::size_t>(m)] = 1;
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal || sgn(sol.value) <= 0) {
    res.holds = false;
    return res;
  }
  res.distribution.assign(sol.x.begin(), sol.x.begin() + m);
  return res;
}

inline RevResult check_f(const BinRel& r) {
  RevResult res;
  RelMonoid mon({r, reverse(r)});
  for (std::size_t i = 0; i < mon.size(); ++i)
    if (auto b = plus_minus_violation(mon.elements()[i], full_set(r.n()))) {
      res.holds = false;
      res.set = b;
      res.word = mon.word(i);
      return res;
    }
  return res;
}

}  // namespace detail

inline RevResult reversible_bin(const BinRel& r, RevCondition c) {
  switch (c) {
    case RevCondition::A: return detail::check_a(r);
    case RevCondition::B: return detail::check_b(r);
    case RevCondition::C: return detail::check_c(r);
    case RevCondition::D: return detail::check_d(r);
    case RevCondition::E: return detail::check_e(r);
    default: return detail::check_f(r);
  }
}

struct GeneralRevResult {
  bool reversible = true;
  std::string reason;
  std::vector<std::pair<int, int>> word;  // coordinate pairs, 0-based
  std::optional<ElemSet> set;
  std::size_t monoid_size = 0;
};

/**
 * All unary projections equal, and every composition of binary projections
 * P satisfies B + P = B => B - P = B for B within the common projection.
 * Sequences are finitized by the composition monoid of the projections.
 */
inline GeneralRevResult reversible_general(const Relation& rel) {
  GeneralRevResult res;
  const int m = rel.arity(), n = rel.domain_size();
  const ElemSet u = set_of(rel.values_at(0));
  for (int i = 1; i < m; ++i)
    if (set_of(rel.values_at(i)) != u) {
      res.reversible = false;
      res.reason = "unary projections differ";
      return res;
    }
  std::vector<BinRel> gens;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      gens.push_back(project2(rel, i, j));
      pairs.emplace_back(i, j);
    }
  if (n > 8) throw std::invalid_argument("domain too large for bitset relations");
  RelMonoid mon(std::move(gens));
  res.monoid_size = mon.size();
  for (std::size_t k = 0; k < mon.size(); ++k)
    if (auto b = plus_minus_violation(mon.elements()[k], u)) {
      res.reversible = false;
      res.reason = "B + P = B but B - P != B";
      res.set = b;
      for (int g : mon.word(k)) res.word.push_back(pairs[static_cast<std::size_t>(g)]);
      return res;
    }
  return res;
}

/**
 * A class B of theta with B + R = B, where theta relates vertices joined by
 * a path with as many forward as backward edges. Throws when R/theta is not
 * the graph of a permutation of the classes.
 */
inline std::optional<std::vector<Elem>> fixed_class_search(const BinRel& r, const Partition& theta) {
  std::vector<ElemSet> cls;
  for (const auto& c : theta) cls.push_back(set_of(c));
  std::vector<int> image(cls.size(), -1);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const ElemSet img = plus(cls[i], r);
    for (std::size_t j = 0; j < cls.size(); ++j)
      if (img == cls[j]) image[i] = static_cast<int>(j);
    if (image[i] < 0) throw std::invalid_argument("R/theta is not the graph of a map on classes");
  }
  std::vector<int> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("R/theta is not a permutation of the classes");
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (image[i] == static_cast<int>(i)) return theta[i];
  return std::nullopt;
}

inline std::optional<std::vector<Elem>> fixed_class_search(const BinRel& r) {
  if (!r.subdirect()) throw std::invalid_argument("fixed_class_search needs a subdirect relation");
  return fixed_class_search(r, balanced_path_congruence(r));
}

}  // namespace cloneforge
