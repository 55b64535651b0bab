#pragma once
// Searching for reversible relations without a constant tuple, plus the
// sign-algebra relations used to test that search.

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "binrel.hpp"
#include "examples.hpp"
#include "reversible.hpp"
#include "subpower.hpp"

namespace cloneforge {

/** Binary subdirect relations preserved by every basic op (2^(n*n) candidates). */
inline std::vector<BinRel> binary_subdirect_relations(const Algebra& alg) {
  if (alg.n > 4) throw std::invalid_argument("census limited to n <= 4");
  std::vector<BinRel> out;
  const std::uint64_t total = std::uint64_t{1} << (alg.n * alg.n);
  for (std::uint64_t bits = 1; bits < total; ++bits) {
    const BinRel r(alg.n, bits);
    if (!r.subdirect()) continue;
    const Relation rel = r.to_relation();
    bool ok = true;
    for (const auto& f : alg.ops)
      if (!preserves(f, rel)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(r);
  }
  return out;
}

// The seven subdirect binary relations of ({-,0,+}, sgn(x+y)), by name.
inline BinRel sign_relation(const std::string& name) {
  auto v = [](int e) { return e - 1; };
  std::function<bool(int, int)> p;
  if (name == "x=y") p = [&](int x, int y) { return x == y; };
  else if (name == "x=-y") p = [&](int x, int y) { return v(x) == -v(y); };
  else if (name == "x<=y") p = [&](int x, int y) { return v(x) <= v(y); };
  else if (name == "x>=y") p = [&](int x, int y) { return v(x) >= v(y); };
  else if (name == "x+y>=0") p = [&](int x, int y) { return v(x) + v(y) >= 0; };
  else if (name == "x+y<=0") p = [&](int x, int y) { return v(x) + v(y) <= 0; };
  else if (name == "full") p = [](int, int) { return true; };
  else throw std::invalid_argument("unknown sign relation " + name);
  return BinRel::from_predicate(3, p);
}

inline const std::vector<std::string>& sign_relation_names() {
  static const std::vector<std::string> v{"x=y", "x=-y", "x<=y", "x>=y", "x+y>=0", "x+y<=0", "full"};
  return v;
}

// {x in A^5 | x1 + x2 + x3 >= 1, x4 = -x5}
inline Relation sum_negation_relation() {
  return Relation::from_predicate(3, 5, [](const Tuple& t) {
    auto v = [&](int i) { return static_cast<int>(t[static_cast<std::size_t>(i)]) - 1; };
    return v(0) + v(1) + v(2) >= 1 && v(3) == -v(4);
  });
}

/**
 * Which of the three cases a subdirect sign relation falls in: every binary
 * projection of distinct coordinates lies in {=, x=-y, full} (a),
 * {=, x+y>=0, full} (b) or {=, x+y<=0, full} (c). The expected constant
 * tuple is 0, + or - respectively.
 */
inline std::vector<char> sign_cases(const Relation& rel) {
  const BinRel eq = sign_relation("x=y"), full = sign_relation("full");
  const BinRel other[] = {sign_relation("x=-y"), sign_relation("x+y>=0"), sign_relation("x+y<=0")};
  std::vector<char> out;
  for (int c = 0; c < 3; ++c) {
    bool ok = true;
    for (int i = 0; i < rel.arity() && ok; ++i)
      for (int j = 0; j < rel.arity() && ok; ++j) {
        if (i == j) continue;
        const BinRel p = project2(rel, i, j);
        ok = p == eq || p == full || p == other[c];
      }
    if (ok) out.push_back(static_cast<char>('a' + c));
  }
  return out;
}

inline Elem sign_case_constant(char c) { return c == 'a' ? 1 : c == 'b' ? 2 : 0; }

struct ConjectureCandidate {
  Relation rel;
  std::vector<Tuple> generators;
};

struct ConjectureReport {
  std::size_t generator_sets = 0;
  std::size_t distinct_relations = 0;
  std::size_t reversible = 0;
  std::size_t truncated = 0;
  std::vector<ConjectureCandidate> candidates;  // reversible, no constant tuple
};

namespace detail {

inline void consider(const Algebra& alg, int m, const std::vector<Tuple>& gens, ClosureLimits lim,
                     std::set<std::vector<Tuple>>& seen, ConjectureReport& rep,
                     const std::function<void(const Relation&)>& on_reversible) {
  ++rep.generator_sets;
  auto sg = sg_power(alg, m, gens, lim);
  if (!sg.complete()) {
    ++rep.truncated;
    return;
  }
  if (!seen.insert(sg.closure.tuples()).second) return;
  ++rep.distinct_relations;
  if (!reversible_general(sg.closure).reversible) return;
  ++rep.reversible;
  if (on_reversible) on_reversible(sg.closure);
  if (!has_constant_tuple(sg.closure)) rep.candidates.push_back({sg.closure, gens});
}

}  // namespace detail

/** Random generator sets of 1..max_gens tuples at arities 1..max_arity. */
inline ConjectureReport conjecture_search(const Algebra& alg, int max_arity, std::size_t samples, std::uint64_t seed,
                                          int max_gens = 3, ClosureLimits lim = {200000, 0}) {
  ConjectureReport rep;
  std::set<std::vector<Tuple>> seen;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> elem(0, alg.n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_arity));
    const int g = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_gens));
    std::vector<Tuple> gens;
    for (int i = 0; i < g; ++i) {
      Tuple t(static_cast<std::size_t>(m));
      for (auto& e : t) e = static_cast<Elem>(elem(rng));
      gens.push_back(std::move(t));
    }
    detail::consider(alg, m, gens, lim, seen, rep, {});
  }
  return rep;
}

/** Every set of at most max_gens tuples of arity m. */
inline ConjectureReport exhaustive_reversible_census(const Algebra& alg, int m, int max_gens,
                                                     const std::function<void(const Relation&)>& on_reversible = {},
                                                     ClosureLimits lim = {200000, 0}) {
  ConjectureReport rep;
  std::set<std::vector<Tuple>> seen;
  std::vector<Tuple> all;
  for_each_tuple(alg.n, m, [&](const Tuple& t) { all.push_back(t); });
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!pick.empty()) {
      std::vector<Tuple> gens;
      for (auto i : pick) gens.push_back(all[i]);
      detail::consider(alg, m, gens, lim, seen, rep, on_reversible);
    }
    if (static_cast<int>(pick.size()) == max_gens) return;
    for (std::size_t i = from; i < all.size(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return rep;
}

}  // namespace cloneforge
