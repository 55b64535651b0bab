#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "op_table.hpp"
#include "relation.hpp"
#include "subpower.hpp"
#include "term.hpp"
#include "levels.hpp"

namespace cloneforge {

// ---------------------------------------------------------------------------
// Coordinates of Sym(a)

// Distinct rearrangements of a, in lexicographic order. Sym(a) lives on these
// coordinates; the k! permutation columns of the definition only repeat them.
inline std::vector<Tuple> rearrangements(const Tuple& a) {
  Tuple s = a;
  std::sort(s.begin(), s.end());
  std::vector<Tuple> out;
  do out.push_back(s);
  while (std::next_permutation(s.begin(), s.end()));
  return out;
}

// Number of distinct rearrangements of a sorted tuple.
inline std::size_t rearrangement_count(const Tuple& sorted) {
  std::size_t c = 1, run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    run = i > 0 && sorted[i] == sorted[i - 1] ? run + 1 : 1;
    c = c * (i + 1) / run;
  }
  return c;
}

struct SymCoordinates {
  Tuple base;
  std::vector<Tuple> words;
  std::map<Tuple, std::size_t> word_index;
  // action[t][w] = index of word w o tau_t, for tau_t ranging over S_k
  std::vector<std::vector<std::size_t>> action;

  explicit SymCoordinates(const Tuple& a, bool with_action = true) : base(a), words(rearrangements(a)) {
    for (std::size_t i = 0; i < words.size(); ++i) word_index.emplace(words[i], i);
    if (!with_action) return;
    std::set<std::vector<std::size_t>> seen;
    Perm tau = identity_perm(static_cast<int>(a.size()));
    do {
      std::vector<std::size_t> map(words.size());
      Tuple w2(a.size());
      for (std::size_t w = 0; w < words.size(); ++w) {
        for (std::size_t j = 0; j < a.size(); ++j) w2[j] = words[w][tau[j]];
        map[w] = word_index.at(w2);
      }
      if (seen.insert(map).second) action.push_back(std::move(map));
    } while (std::next_permutation(tau.begin(), tau.end()));
  }

  int arity() const { return static_cast<int>(base.size()); }

  // Generator j: the j-th entry of every word.
  std::vector<Tuple> generators() const {
    std::vector<Tuple> gens(base.size(), Tuple(words.size()));
    for (std::size_t w = 0; w < words.size(); ++w)
      for (std::size_t j = 0; j < base.size(); ++j) gens[j][w] = words[w][j];
    return gens;
  }

  Tuple act(const std::vector<std::size_t>& map, const Tuple& t) const {
    Tuple r(t.size());
    for (std::size_t w = 0; w < t.size(); ++w) r[w] = t[map[w]];
    return r;
  }

  Tuple canonical(const Tuple& t) const {
    Tuple best = t;
    for (const auto& m : action) {
      Tuple r = act(m, t);
      if (r < best) best = std::move(r);
    }
    return best;
  }

  std::vector<Tuple> orbit(const Tuple& t) const {
    std::set<Tuple> s;
    for (const auto& m : action) s.insert(act(m, t));
    return {s.begin(), s.end()};
  }

  // Value list on the k! permutation columns (permutations in lex order).
  Tuple expand(const Tuple& t) const {
    Tuple out;
    Perm sigma = identity_perm(arity());
    Tuple w(base.size());
    do {
      for (std::size_t j = 0; j < base.size(); ++j) w[j] = base[sigma[j]];
      out.push_back(t[word_index.at(w)]);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return out;
  }
};

/**
 * Sym(a), stored as orbit representatives under the S_k action on
 * coordinates (lexicographically least member of each orbit).
 */
struct SymRelation {
  Tuple base;
  std::vector<Tuple> words;
  std::vector<Tuple> orbit_reps;
  ClosureStatus status = ClosureStatus::Complete;
  std::optional<Elem> constant;  // set when a constant tuple was seen

  bool complete() const { return status == ClosureStatus::Complete; }

  // All elements over the distinct-word coordinates.
  Relation closure(int n) const {
    SymCoordinates sc(base);
    std::vector<Tuple> all;
    for (const auto& r : orbit_reps)
      for (auto& t : sc.orbit(r)) all.push_back(std::move(t));
    return Relation(n, static_cast<int>(words.size()), std::move(all));
  }

  // The relation at power k!, one coordinate per permutation.
  Relation expanded(int n) const {
    SymCoordinates sc(base);
    std::vector<Tuple> all;
    for (const auto& r : orbit_reps)
      for (const auto& t : sc.orbit(r)) all.push_back(sc.expand(t));
    int kf = 1;
    for (int i = 2; i <= sc.arity(); ++i) kf *= i;
    return Relation(n, kf, std::move(all));
  }
};

namespace detail {

// Closure of Sym(a) on orbit representatives. A new combination only needs
// one argument fixed to the newest representative; the equivariance of the
// pointwise ops lets that argument be moved onto the representative itself.
inline SymRelation orbit_closure(const Algebra& alg, const Tuple& a, ClosureLimits limits, bool stop_at_constant) {
  SymCoordinates sc(a);
  SymRelation out;
  out.base = a;
  out.words = sc.words;
  std::vector<Tuple>& reps = out.orbit_reps;
  std::vector<Tuple> flat;               // orbit members, grouped by rep
  std::vector<std::size_t> begin, end;   // orbit ranges inside flat
  std::unordered_set<Tuple, TupleHash> known;
  std::uint64_t work = 0;
  const std::size_t m = sc.words.size();

  auto add = [&](const Tuple& t) -> bool {
    Tuple c = sc.canonical(t);
    if (!known.insert(c).second) return false;
    begin.push_back(flat.size());
    for (auto& o : sc.orbit(c)) flat.push_back(std::move(o));
    end.push_back(flat.size());
    if (is_constant(c) && !out.constant) out.constant = c[0];
    reps.push_back(std::move(c));
    return true;
  };
  for (const auto& g : sc.generators()) add(g);
  if (stop_at_constant && out.constant) {
    out.status = ClosureStatus::Stopped;
    return out;
  }

  std::vector<bool> sym;
  for (const auto& f : alg.ops) sym.push_back(is_symmetric(f));
  Tuple res(m);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Tuple rep = reps[r];
    for (std::size_t g = 0; g < alg.ops.size(); ++g) {
      const OpTable& f = alg.ops[g];
      const int ar = f.arity();
      std::vector<const Tuple*> args(static_cast<std::size_t>(ar));
      std::vector<std::size_t> pick(static_cast<std::size_t>(ar));
      auto emit = [&]() -> bool {
        ++work;
        for (std::size_t c = 0; c < m; ++c) {
          std::size_t idx = 0;
          for (int x = 0; x < ar; ++x) idx = idx * static_cast<std::size_t>(alg.n) + (*args[static_cast<std::size_t>(x)])[c];
          res[c] = f.at(idx);
        }
        if (add(res)) {
          if (stop_at_constant && out.constant) {
            out.status = ClosureStatus::Stopped;
            return true;
          }
          if (flat.size() > limits.max_tuples) {
            out.status = ClosureStatus::Truncated;
            return true;
          }
        }
        if (limits.max_work && work > limits.max_work) {
          out.status = ClosureStatus::Truncated;
          return true;
        }
        return false;
      };
      const std::size_t hi = end[r];
      if (ar == 1) {
        args[0] = &rep;
        if (emit()) return out;
        continue;
      }
      if (sym[g]) {
        args[0] = &rep;
        std::fill(pick.begin(), pick.end(), 0);
        for (;;) {
          for (int x = 1; x < ar; ++x) args[static_cast<std::size_t>(x)] = &flat[pick[static_cast<std::size_t>(x)]];
          if (emit()) return out;
          int x = ar - 1;
          while (x >= 1 && pick[static_cast<std::size_t>(x)] + 1 == hi) --x;
          if (x < 1) break;
          const std::size_t v = pick[static_cast<std::size_t>(x)] + 1;
          for (int y = x; y < ar; ++y) pick[static_cast<std::size_t>(y)] = v;
        }
        continue;
      }
      const std::size_t lo_hi = begin[r];  // orbits strictly before r
      for (int p = 0; p < ar; ++p) {
        if (p > 0 && lo_hi == 0) break;
        std::fill(pick.begin(), pick.end(), 0);
        bool done = false;
        while (!done) {
          for (int x = 0; x < ar; ++x)
            args[static_cast<std::size_t>(x)] = x == p ? &rep : &flat[pick[static_cast<std::size_t>(x)]];
          if (emit()) return out;
          int x = ar - 1;
          for (; x >= 0; --x) {
            if (x == p) continue;
            const std::size_t lim = x < p ? lo_hi : hi;
            if (++pick[static_cast<std::size_t>(x)] < lim) break;
            pick[static_cast<std::size_t>(x)] = 0;
          }
          done = x < 0;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

inline SymRelation sym_relation(const Algebra& alg, const Tuple& a, ClosureLimits limits = {}) {
  if (a.empty() || a.size() > 5) throw std::invalid_argument("sym_relation needs 1 <= k <= 5");
  for (Elem e : a)
    if (e >= alg.n) throw std::invalid_argument("tuple entry out of range");
  return detail::orbit_closure(alg, a, limits, false);
}

// Plain closure on the distinct-word coordinates; no orbit bookkeeping.
inline GeneratedSubpower sym_relation_plain(const Algebra& alg, const Tuple& a, ClosureLimits limits = {}) {
  SymCoordinates sc(a, false);
  return sg_power(alg, static_cast<int>(sc.words.size()), sc.generators(), limits);
}

// ---------------------------------------------------------------------------
// Symmetric witnesses

// Values a constant of Sym(a) may take: fixed by every automorphism that
// maps the multiset of a onto itself (h(s a) = s h(a) and s a is a
// rearrangement of a).
inline std::vector<Elem> automorphism_allowed_values(const std::vector<Perm>& auts, const Tuple& a, int n) {
  Tuple sa = a;
  std::sort(sa.begin(), sa.end());
  std::vector<Elem> out;
  for (int v = 0; v < n; ++v) {
    bool ok = true;
    for (const auto& s : auts) {
      Tuple img;
      for (Elem e : a) img.push_back(s[e]);
      std::sort(img.begin(), img.end());
      if (img == sa && s[static_cast<std::size_t>(v)] != v) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(static_cast<Elem>(v));
  }
  return out;
}

namespace detail {

// Maps A^k -> A^k that commute with permuting coordinates. Composed with
// pointwise basic operations they stay equivariant, so a constant tuple
// reached from a gives a term (first coordinate) acting symmetrically on a.
struct EquivariantMap {
  enum class Kind { LeaveOneOut, Mix, Broadcast, Program } kind;
  OpTable outer;  // (k-1)-ary symmetric, or k-ary symmetric for Broadcast
  Term outer_term;
  OpTable inner;  // binary, Mix only
  Term inner_term;
  std::shared_ptr<const LevelProgram> program;

  // Mix may take a second tuple z: y_i = outer(inner(x_i, z_l) for l != i).
  Tuple apply(const Tuple& x, const Tuple* z = nullptr) const {
    const std::size_t k = x.size();
    const Tuple& zz = z ? *z : x;
    if (kind == Kind::Program) return program->apply(x);
    Tuple y(k);
    if (kind == Kind::Broadcast) {
      std::fill(y.begin(), y.end(), outer(x));
      return y;
    }
    Tuple rest(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t w = 0;
      for (std::size_t l = 0; l < k; ++l) {
        if (l == i) continue;
        rest[w++] = kind == Kind::LeaveOneOut ? x[l] : inner({x[i], zz[l]});
      }
      y[i] = outer(rest);
    }
    return y;
  }

  std::vector<Term> terms(const std::vector<Term>& x, const std::vector<Term>* z = nullptr) const {
    const std::size_t k = x.size();
    const std::vector<Term>& zz = z ? *z : x;
    if (kind == Kind::Program) return program->terms(x);
    if (kind == Kind::Broadcast) return std::vector<Term>(k, Term::substitute(outer_term, static_cast<int>(k), x));
    std::vector<Term> y;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<Term> rest;
      for (std::size_t l = 0; l < k; ++l) {
        if (l == i) continue;
        rest.push_back(kind == Kind::LeaveOneOut ? x[l] : Term::substitute(inner_term, 2, {x[i], zz[l]}));
      }
      y.push_back(Term::substitute(outer_term, static_cast<int>(k - 1), std::move(rest)));
    }
    return y;
  }
};

// A straight-line equivariant program: node 0 is the input tuple.
struct EquivariantWord {
  struct Step {
    int op = -1;   // basic op applied pointwise, or -1 for a map
    int map = -1;  // index into maps
    std::vector<std::size_t> args;
  };
  std::vector<Step> steps;  // steps[0] is the input

  Tuple apply(const Algebra& alg, const std::vector<EquivariantMap>& maps, const Tuple& x) const {
    std::vector<Tuple> val(steps.size());
    val[0] = x;
    for (std::size_t s = 1; s < steps.size(); ++s) {
      const Step& st = steps[s];
      if (st.op < 0) {
        val[s] = maps[static_cast<std::size_t>(st.map)].apply(val[st.args[0]], st.args.size() > 1 ? &val[st.args[1]] : nullptr);
        continue;
      }
      const OpTable& f = alg.ops[static_cast<std::size_t>(st.op)];
      Tuple col(st.args.size());
      val[s].resize(x.size());
      for (std::size_t c = 0; c < x.size(); ++c) {
        for (std::size_t a = 0; a < st.args.size(); ++a) col[a] = val[st.args[a]][c];
        val[s][c] = f(col);
      }
    }
    return val.back();
  }

  std::vector<Term> terms(const std::vector<EquivariantMap>& maps, const std::vector<Term>& x) const {
    std::vector<std::vector<Term>> val(steps.size());
    val[0] = x;
    for (std::size_t s = 1; s < steps.size(); ++s) {
      const Step& st = steps[s];
      if (st.op < 0) {
        val[s] = maps[static_cast<std::size_t>(st.map)].terms(val[st.args[0]], st.args.size() > 1 ? &val[st.args[1]] : nullptr);
        continue;
      }
      for (std::size_t c = 0; c < x.size(); ++c) {
        std::vector<Term> a;
        for (auto p : st.args) a.push_back(val[p][c]);
        val[s].push_back(Term::basic(st.op, std::move(a)));
      }
    }
    return val.back();
  }
};

// lower[j-1] is a symmetric j-ary witness, for j < k (may be empty).
inline std::vector<EquivariantMap> equivariant_maps(const Algebra& alg, int k, const std::vector<Witness>& lower,
                                                   std::size_t max_outers = 1) {
  using Kind = EquivariantMap::Kind;
  std::vector<EquivariantMap> maps;
  std::vector<std::pair<OpTable, Term>> outers;
  auto add_outer = [&](const OpTable& t, const Term& term) {
    for (const auto& o : outers)
      if (o.first == t) return;
    outers.emplace_back(t, term);
  };
  for (std::size_t g = 0; g < alg.ops.size(); ++g) {
    if (!is_symmetric(alg.ops[g])) continue;
    Term t = Term::basic(static_cast<int>(g), variables(alg.ops[g].arity()));
    if (alg.ops[g].arity() == k) maps.push_back({Kind::Broadcast, alg.ops[g], t, {}, {}, nullptr});
    if (alg.ops[g].arity() == k - 1) add_outer(alg.ops[g], t);
  }
  if (k < 2) return maps;
  if (static_cast<int>(lower.size()) >= k - 1) add_outer(lower[static_cast<std::size_t>(k - 2)].table, lower[static_cast<std::size_t>(k - 2)].term);

  // Binary terms: basic binary ops and w_j(a^r b^(j-r)) for the lower witnesses.
  std::vector<std::pair<OpTable, Term>> inners;
  auto add_inner = [&](const OpTable& t, const Term& term) {
    if (t == OpTable::projection(alg.n, 2, 0) || t == OpTable::projection(alg.n, 2, 1)) return;
    for (const auto& o : inners)
      if (o.first == t) return;
    inners.emplace_back(t, term);
  };
  if (k >= 3) {
    for (std::size_t g = 0; g < alg.ops.size(); ++g)
      if (alg.ops[g].arity() == 2) add_inner(alg.ops[g], Term::basic(static_cast<int>(g), variables(2)));
    for (int j = 2; j <= std::min(k - 1, static_cast<int>(lower.size())); ++j) {
      const Witness& w = lower[static_cast<std::size_t>(j - 1)];
      for (int r = 1; r < j; ++r) {
        std::vector<Term> args;
        for (int i = 0; i < j; ++i) args.push_back(Term::var(i < r ? 0 : 1));
        OpTable t = binary_from_function(alg.n, [&](int a, int b) {
          Tuple x(static_cast<std::size_t>(j), static_cast<Elem>(b));
          std::fill(x.begin(), x.begin() + r, static_cast<Elem>(a));
          return static_cast<int>(w.table(x));
        });
        add_inner(t, Term::substitute(w.term, j, std::move(args)));
      }
    }
  }

  // More symmetric (k-1)-ary outers derived from the first ones:
  // w(g(r_l, w(R))) and w(v(R - r_l)) with v a (k-2)-ary witness.
  const int m = k - 1;
  for (std::size_t o = 0; o < outers.size() && outers.size() < max_outers && m >= 2; ++o) {
    const OpTable w = outers[o].first;
    const Term wt = outers[o].second;
    for (const auto& [it, iterm] : inners) {
      if (outers.size() >= max_outers) break;
      Tuple col(static_cast<std::size_t>(m));
      OpTable t = OpTable::from_function(alg.n, m, [&](const Tuple& r) {
        const Elem c = w(r);
        for (int l = 0; l < m; ++l) col[static_cast<std::size_t>(l)] = it({r[static_cast<std::size_t>(l)], c});
        return w(col);
      });
      std::vector<Term> args;
      const Term agg = Term::substitute(wt, m, variables(m));
      for (int l = 0; l < m; ++l) args.push_back(Term::substitute(iterm, 2, {Term::var(l), agg}));
      add_outer(t, Term::substitute(wt, m, std::move(args)));
    }
    if (m >= 3 && static_cast<int>(lower.size()) >= m - 1 && outers.size() < max_outers) {
      const Witness& v = lower[static_cast<std::size_t>(m - 2)];
      Tuple col(static_cast<std::size_t>(m)), rest(static_cast<std::size_t>(m - 1));
      OpTable t = OpTable::from_function(alg.n, m, [&](const Tuple& r) {
        for (int l = 0; l < m; ++l) {
          std::size_t q = 0;
          for (int i = 0; i < m; ++i)
            if (i != l) rest[q++] = r[static_cast<std::size_t>(i)];
          col[static_cast<std::size_t>(l)] = v.table(rest);
        }
        return w(col);
      });
      std::vector<Term> args;
      for (int l = 0; l < m; ++l) {
        std::vector<Term> sub;
        for (int i = 0; i < m; ++i)
          if (i != l) sub.push_back(Term::var(i));
        args.push_back(Term::substitute(v.term, m - 1, std::move(sub)));
      }
      add_outer(t, Term::substitute(wt, m, std::move(args)));
    }
  }
  for (const auto& [ot, oterm] : outers) {
    maps.push_back({Kind::LeaveOneOut, ot, oterm, {}, {}, nullptr});
    for (const auto& [it, iterm] : inners) maps.push_back({Kind::Mix, ot, oterm, it, iterm, nullptr});
  }
  return maps;
}

struct EquivariantSearchResult {
  ClosureStatus status = ClosureStatus::Complete;  // Stopped = constant found
  EquivariantWord word;
};

// Closure of {b} in A^k under the equivariant maps and pointwise basic ops.
inline EquivariantSearchResult equivariant_search(const Algebra& alg, const std::vector<EquivariantMap>& maps,
                                                  const Tuple& b, ClosureLimits limits) {
  struct Origin {
    int op = -1, map = -1;
    std::vector<std::uint32_t> args;
  };
  std::vector<Tuple> elems{b};
  std::vector<Origin> origins(1);
  std::unordered_map<Tuple, std::uint32_t, TupleHash> index{{b, 0}};
  std::vector<bool> sym;
  for (const auto& f : alg.ops) sym.push_back(is_symmetric(f));
  std::uint64_t work = 0;
  std::optional<std::uint32_t> hit;
  if (is_constant(b)) hit = 0;

  auto insert = [&](Tuple t, Origin o) -> bool {
    auto [it, fresh] = index.emplace(t, static_cast<std::uint32_t>(elems.size()));
    if (!fresh) return false;
    const bool c = is_constant(t);
    elems.push_back(std::move(t));
    origins.push_back(std::move(o));
    if (c) hit = it->second;
    return c;
  };

  EquivariantSearchResult res;
  for (std::size_t i = 0; i < elems.size() && !hit; ++i) {
    for (std::size_t mi = 0; mi < maps.size() && !hit; ++mi) {
      ++work;
      insert(maps[mi].apply(elems[i]), {-1, static_cast<int>(mi), {static_cast<std::uint32_t>(i)}});
      if (maps[mi].kind != EquivariantMap::Kind::Mix) continue;
      const auto ui = static_cast<std::uint32_t>(i);
      for (std::uint32_t j = 0; j < ui && !hit; ++j) {
        work += 2;
        insert(maps[mi].apply(elems[i], &elems[j]), {-1, static_cast<int>(mi), {ui, j}});
        if (!hit) insert(maps[mi].apply(elems[j], &elems[i]), {-1, static_cast<int>(mi), {j, ui}});
      }
    }
    for (std::size_t g = 0; g < alg.ops.size() && !hit; ++g) {
      const OpTable& f = alg.ops[g];
      const int r = f.arity();
      std::vector<std::uint32_t> pick(static_cast<std::size_t>(r), 0);
      auto emit = [&]() {
        ++work;
        Tuple out(b.size()), col(static_cast<std::size_t>(r));
        for (std::size_t c = 0; c < b.size(); ++c) {
          for (int a = 0; a < r; ++a) col[static_cast<std::size_t>(a)] = elems[pick[static_cast<std::size_t>(a)]][c];
          out[c] = f(col);
        }
        insert(std::move(out), {static_cast<int>(g), -1, pick});
      };
      if (r == 1) {
        pick[0] = static_cast<std::uint32_t>(i);
        emit();
        continue;
      }
      if (sym[g]) {
        pick[static_cast<std::size_t>(r - 1)] = static_cast<std::uint32_t>(i);
        for (;;) {
          emit();
          if (hit) break;
          int a = r - 2;
          while (a >= 0 && pick[static_cast<std::size_t>(a)] == i) --a;
          if (a < 0) break;
          const std::uint32_t v = pick[static_cast<std::size_t>(a)] + 1;
          for (int c = a; c <= r - 2; ++c) pick[static_cast<std::size_t>(c)] = v;
        }
        continue;
      }
      for (int p = 0; p < r && !hit; ++p) {
        if (p > 0 && i == 0) break;
        std::fill(pick.begin(), pick.end(), 0u);
        pick[static_cast<std::size_t>(p)] = static_cast<std::uint32_t>(i);
        for (;;) {
          emit();
          if (hit) break;
          int a = r - 1;
          for (; a >= 0; --a) {
            if (a == p) continue;
            const std::size_t lim = a < p ? i : i + 1;
            if (++pick[static_cast<std::size_t>(a)] < lim) break;
            pick[static_cast<std::size_t>(a)] = 0;
          }
          if (a < 0) break;
        }
      }
    }
    if (!hit && (elems.size() > limits.max_tuples || (limits.max_work && work > limits.max_work))) {
      res.status = ClosureStatus::Truncated;
      return res;
    }
  }
  if (!hit) return res;

  // Keep only the ancestors of the hit, renumbered in topological order.
  std::vector<std::uint32_t> need;
  std::set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack{*hit};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    for (auto a : origins[u].args) stack.push_back(a);
  }
  need.assign(seen.begin(), seen.end());  // ascending = topological
  std::map<std::uint32_t, std::size_t> renum;
  for (std::size_t i = 0; i < need.size(); ++i) renum[need[i]] = i;
  res.word.steps.resize(need.size());
  for (std::size_t i = 1; i < need.size(); ++i) {
    const Origin& o = origins[need[i]];
    auto& st = res.word.steps[i];
    st.op = o.op;
    st.map = o.map;
    for (auto a : o.args) st.args.push_back(renum.at(a));
  }
  res.status = ClosureStatus::Stopped;
  return res;
}

inline std::vector<Tuple> sorted_tuples(int n, int k) {
  std::vector<Tuple> out;
  Tuple s(static_cast<std::size_t>(k), 0);
  for (;;) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - 1) --i;
    if (i < 0) break;
    const Elem v = static_cast<Elem>(s[static_cast<std::size_t>(i)] + 1);
    for (int j = i; j < k; ++j) s[static_cast<std::size_t>(j)] = v;
  }
  return out;
}

}  // namespace detail

struct SymActionResult {
  ClosureStatus status = ClosureStatus::Complete;  // Stopped = found
  std::optional<Term> term;                         // acts symmetrically on the tuple
  std::string method;
  bool found() const { return status == ClosureStatus::Stopped; }
};

struct SymOptions {
  ClosureLimits exact{kDefaultBudget, 400'000'000};  // Sym(a) closures
  ClosureLimits quick{200'000, 20'000'000};      // equivariant searches
  enum class Builder { Auto, Ladder } builder = Builder::Auto;
  int hierarchy_levels = 3;  // deepest level tried by the hierarchy search
};

namespace detail {

// Level hierarchy search for a term constant on b, shallow levels first.
inline std::shared_ptr<const LevelProgram> hierarchy_program(const Algebra& alg, const Tuple& b,
                                                             const std::vector<Witness>& lower,
                                                             const SymOptions& opt) {
  const int top = std::min(opt.hierarchy_levels, static_cast<int>(b.size()));
  for (int L = 2; L <= top; ++L) {
    auto r = level_search(alg, b, lower, L, opt.quick);
    if (r.status == ClosureStatus::Stopped) return r.program;
  }
  return nullptr;
}

}  // namespace detail

// A k-ary term acting symmetrically on a; lower[j-1] = symmetric j-ary witness, j < k.
inline SymActionResult find_symmetric_action(const Algebra& alg, const Tuple& a, const std::vector<Witness>& lower,
                                             const SymOptions& opt = {}) {
  const int k = static_cast<int>(a.size());
  SymActionResult out;
  if (is_constant(a)) {
    out.status = ClosureStatus::Stopped;
    out.term = Term::var(0);
    out.method = "constant";
    return out;
  }
  if (alg.idempotent()) {
    auto maps = detail::equivariant_maps(alg, k, lower);
    if (!maps.empty()) {
      auto r = detail::equivariant_search(alg, maps, a, opt.quick);
      if (r.status == ClosureStatus::Stopped) {
        out.status = ClosureStatus::Stopped;
        out.term = r.word.terms(maps, variables(k))[0];
        out.method = "equivariant";
        return out;
      }
    }
  }
  if (k >= 3)
    if (auto prog = detail::hierarchy_program(alg, a, lower, opt)) {
      out.status = ClosureStatus::Stopped;
      out.term = prog->terms(variables(k))[0];
      out.method = "hierarchy";
      return out;
    }
  SymCoordinates sc(a, false);
  SubpowerClosure cl(alg, static_cast<int>(sc.words.size()), opt.exact, true);
  for (const auto& g : sc.generators()) cl.add_generator(g);
  std::optional<std::uint32_t> hit;
  out.status = cl.run([&](std::uint32_t i) {
    if (is_constant(cl.element(i))) {
      hit = i;
      return true;
    }
    return false;
  });
  if (hit) {
    out.term = cl.term_of(*hit);
    out.method = "sym-closure";
  }
  return out;
}

struct BuildFailure : std::runtime_error {
  Tuple tuple;
  ClosureStatus status;
  BuildFailure(Tuple t, ClosureStatus s)
      : std::runtime_error("no symmetric action found"), tuple(std::move(t)), status(s) {}
};

namespace detail {

inline Tuple rotate_left(const Tuple& x, int first, int len, int by) {
  Tuple y = x;
  std::rotate(y.begin() + first, y.begin() + first + by, y.begin() + first + len);
  return y;
}

inline std::vector<Term> rotated_vars(int k, int len, int by) {
  std::vector<Term> v = variables(k);
  std::rotate(v.begin(), v.begin() + by, v.begin() + len);
  return v;
}

// g(x) = outer(inner(rot^0 x), ..., inner(rot^{len-1} x)) where rot rotates
// the first len coordinates.
inline OpTable rotation_combine(const OpTable& outer, const OpTable& inner, int len) {
  const int k = inner.arity();
  Tuple col(static_cast<std::size_t>(len));
  return OpTable::from_function(inner.domain_size(), k, [&](const Tuple& x) {
    for (int i = 0; i < len; ++i) col[static_cast<std::size_t>(i)] = inner(rotate_left(x, 0, len, i));
    return outer(col);
  });
}

inline Term rotation_combine_term(const Term& outer, const Term& inner, int k, int len) {
  std::vector<Term> args;
  for (int i = 0; i < len; ++i) args.push_back(Term::substitute(inner, k, rotated_vars(k, len, i)));
  return Term::substitute(outer, len, std::move(args));
}

inline std::optional<Tuple> first_unsymmetric(const OpTable& f) {
  for (const Tuple& s : sorted_tuples(f.domain_size(), f.arity())) {
    Tuple x = s;
    const Elem v = f(s);
    while (std::next_permutation(x.begin(), x.end()))
      if (f(x) != v) return s;
  }
  return std::nullopt;
}

// The g_j ladder and h-correction loop: f acts symmetrically on a growing
// set T; each round fixes one more tuple t.
inline Witness build_ladder(const Algebra& alg, int k, const std::vector<Witness>& lower, const SymOptions& opt) {
  Witness cur{k, OpTable::projection(alg.n, k, 0), Term::var(0), "ladder"};
  std::size_t rounds = 0;
  while (auto t = first_unsymmetric(cur.table)) {
    OpTable g = cur.table;
    Term gt = cur.term;
    for (int j = 2; j <= k - 1; ++j) {
      const Witness& fj = lower[static_cast<std::size_t>(j - 1)];
      g = rotation_combine(fj.table, g, j);
      gt = rotation_combine_term(fj.term, gt, k, j);
    }
    Tuple a(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) a[static_cast<std::size_t>(i)] = g(rotate_left(*t, 0, k, i));
    auto h = find_symmetric_action(alg, a, lower, opt);
    if (!h.found()) throw BuildFailure(a, h.status);
    const OpTable htab = evaluate(*h.term, alg, k);
    cur.table = rotation_combine(htab, g, k);
    cur.term = rotation_combine_term(*h.term, gt, k, k);
    ++rounds;
  }
  cur.method = "ladder(" + std::to_string(rounds) + " rounds)";
  return cur;
}

// Equivariant words are accumulated until every multiset of A^k is sent to
// a constant; then the first coordinate of the composite is symmetric.
inline std::optional<Witness> build_equivariant(const Algebra& alg, int k, const std::vector<Witness>& lower,
                                                const SymOptions& opt) {
  if (!alg.idempotent()) return std::nullopt;
  auto maps = equivariant_maps(alg, k, lower);
  std::vector<EquivariantWord> words;
  std::map<Tuple, Elem> value;
  for (const Tuple& s : sorted_tuples(alg.n, k)) {
    Tuple b = s;
    for (const auto& w : words) {
      if (is_constant(b)) break;
      b = w.apply(alg, maps, b);
    }
    if (!is_constant(b)) {
      auto r = equivariant_search(alg, maps, b, opt.quick);
      if (r.status != ClosureStatus::Stopped) {
        auto prog = hierarchy_program(alg, b, lower, opt);
        if (!prog) return std::nullopt;
        maps.push_back({EquivariantMap::Kind::Program, {}, {}, {}, {}, prog});
        r.word = EquivariantWord{};
        r.word.steps.push_back({});
        r.word.steps.push_back({-1, static_cast<int>(maps.size() - 1), {0}});
      }
      b = r.word.apply(alg, maps, b);
      words.push_back(std::move(r.word));
    }
    value[s] = b[0];
  }
  Witness out;
  out.arity = k;
  out.table = OpTable::from_function(alg.n, k, [&](const Tuple& x) {
    Tuple s = x;
    std::sort(s.begin(), s.end());
    return value.at(s);
  });
  std::vector<Term> cur = variables(k);
  for (const auto& w : words) cur = w.terms(maps, cur);
  out.term = cur[0];
  out.method = "equivariant(" + std::to_string(words.size()) + " words)";
  return out;
}

}  // namespace detail

/**
 * Symmetric k-ary witness from symmetric witnesses of arities 1..k-1
 * (lower[j-1] has arity j). Throws BuildFailure when some Sym(a) met on the
 * way has no constant tuple (or its closure was cut off).
 */
inline Witness build_symmetric_term(const Algebra& alg, int k, const std::vector<Witness>& lower,
                                    const SymOptions& opt = {}) {
  if (k < 1) throw std::invalid_argument("arity must be positive");
  if (k == 1) return projection_witness(alg.n);
  if (static_cast<int>(lower.size()) < k - 1) throw std::invalid_argument("missing lower witnesses");
  for (std::size_t g = 0; g < alg.ops.size(); ++g)
    if (alg.ops[g].arity() == k && is_symmetric(alg.ops[g]))
      return {k, alg.ops[g], Term::basic(static_cast<int>(g), variables(k)), "basic"};
  Witness w;
  std::optional<Witness> eq;
  if (opt.builder == SymOptions::Builder::Auto) eq = detail::build_equivariant(alg, k, lower, opt);
  w = eq ? std::move(*eq) : detail::build_ladder(alg, k, lower, opt);
  if (!is_symmetric(w.table)) throw std::logic_error("witness construction produced a non-symmetric table");
  return w;
}

// f4 from a symmetric binary f2 and ternary f3: f3 over the three pairings of the four arguments.
inline OpTable pairing_f4(const OpTable& f2, const OpTable& f3) {
  return OpTable::from_function(f2.domain_size(), 4, [&](const Tuple& x) {
    auto p = [&](Elem a, Elem b) { return f2({a, b}); };
    const Elem w = x[0], y1 = x[1], y = x[2], z = x[3];
    return f3({p(p(w, y1), p(y, z)), p(p(w, y), p(y1, z)), p(p(w, z), p(y1, y))});
  });
}

// ---------------------------------------------------------------------------
// Decision procedure

enum class Answer { Yes, No, Unknown };

inline const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    default: return "unknown";
  }
}

struct SymCheckResult {
  Answer answer = Answer::Yes;
  int arity_reached = 0;          // largest arity with a witness
  std::optional<Tuple> obstruction;  // tuple whose Sym has no constant (or was cut off)
  std::string reason;
  std::vector<Witness> witnesses;  // witnesses[j-1] has arity j
};

// Multisets of size k up to automorphisms of the algebra (least image kept).
inline std::vector<Tuple> multiset_reps(int n, int k, const std::vector<Perm>& auts) {
  std::vector<Tuple> out;
  for (const Tuple& s : detail::sorted_tuples(n, k)) {
    bool least = true;
    for (const auto& p : auts) {
      Tuple img;
      for (Elem e : s) img.push_back(p[e]);
      std::sort(img.begin(), img.end());
      if (img < s) {
        least = false;
        break;
      }
    }
    if (least) out.push_back(s);
  }
  return out;
}

// Does Sym(a) contain a constant? Complete = no, Stopped = yes.
inline ClosureStatus sym_has_constant(const Algebra& alg, const Tuple& a, const std::vector<Perm>& auts,
                                      const std::vector<Witness>& lower, const SymOptions& opt,
                                      std::string* how = nullptr) {
  if (is_constant(a)) return ClosureStatus::Stopped;
  if (automorphism_allowed_values(auts, a, alg.n).empty()) {
    if (how) *how = "automorphism";
    return ClosureStatus::Complete;
  }
  if (alg.idempotent()) {
    auto maps = detail::equivariant_maps(alg, static_cast<int>(a.size()), lower);
    if (!maps.empty() && detail::equivariant_search(alg, maps, a, opt.quick).status == ClosureStatus::Stopped)
      return ClosureStatus::Stopped;
  }
  if (a.size() >= 3 && detail::hierarchy_program(alg, a, lower, opt)) return ClosureStatus::Stopped;
  if (how) *how = "closure";
  if (a.size() <= 5) return detail::orbit_closure(alg, a, opt.exact, true).status;
  SymCoordinates sc(a, false);
  SubpowerClosure cl(alg, static_cast<int>(sc.words.size()), opt.exact);
  for (const auto& g : sc.generators()) cl.add_generator(g);
  return cl.run([&](std::uint32_t i) { return is_constant(cl.element(i)); });
}

/**
 * Symmetric terms of every arity 1..k? Arities are handled in turn: a
 * witness is built when possible; otherwise every multiset of that size
 * (up to automorphisms) is checked for a constant in its Sym relation.
 */
inline SymCheckResult symmetric_term_exists(const Algebra& alg, int k, const SymOptions& opt = {}) {
  if (k < 1) throw std::invalid_argument("arity must be positive");
  SymCheckResult res;
  res.witnesses.push_back(projection_witness(alg.n));
  res.arity_reached = 1;
  const auto auts = automorphisms(alg);
  for (int j = 2; j <= k; ++j) {
    auto reps = multiset_reps(alg.n, j, auts);
    // Cheap certificates first, then a direct build, then closures from the fewest coordinates up.
    for (const Tuple& a : reps)
      if (!is_constant(a) && automorphism_allowed_values(auts, a, alg.n).empty()) {
        res.answer = Answer::No;
        res.obstruction = a;
        res.reason = "Sym of tuple has no constant (automorphism)";
        return res;
      }
    try {
      res.witnesses.push_back(build_symmetric_term(alg, j, res.witnesses, opt));
      res.arity_reached = j;
      continue;
    } catch (const BuildFailure&) {
    }
    std::stable_sort(reps.begin(), reps.end(), [](const Tuple& x, const Tuple& y) {
      return rearrangement_count(x) < rearrangement_count(y);
    });
    bool unknown = false;
    for (const Tuple& a : reps) {
      std::string how;
      auto st = sym_has_constant(alg, a, auts, res.witnesses, opt, &how);
      if (st == ClosureStatus::Complete) {
        res.answer = Answer::No;
        res.obstruction = a;
        res.reason = "Sym of tuple has no constant (" + how + ")";
        return res;
      }
      if (st == ClosureStatus::Truncated && !unknown) {
        unknown = true;
        res.obstruction = a;
      }
    }
    if (unknown) {
      res.answer = Answer::Unknown;
      res.reason = "closure budget exhausted";
      return res;
    }
    // Every Sym(a) has a constant: the ladder construction must now succeed.
    SymOptions exact = opt;
    exact.builder = SymOptions::Builder::Ladder;
    try {
      res.witnesses.push_back(build_symmetric_term(alg, j, res.witnesses, exact));
    } catch (const BuildFailure& e) {
      res.answer = Answer::Unknown;
      res.obstruction = e.tuple;
      res.reason = "closure budget exhausted while building witness";
      return res;
    }
    res.arity_reached = j;
  }
  return res;
}

}  // namespace cloneforge
