#pragma once
// CSP instances, arc consistency, steps and cycles, the (P1)/(P2)/(P2*)/(P3)
// conditions, and the basic LP relaxation in exact rationals.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "binrel.hpp"
#include "lp.hpp"
#include "relation.hpp"

namespace cloneforge {

struct Constraint {
  std::vector<int> scope;
  Relation rel;
};

struct CspInstance {
  int n = 2;
  std::vector<std::string> vars;
  std::vector<Constraint> constraints;
  std::vector<ElemSet> domains;  // empty: every variable ranges over the whole domain

  int num_vars() const { return static_cast<int>(vars.size()); }
  ElemSet domain(int x) const { return domains.empty() ? full_set(n) : domains[static_cast<std::size_t>(x)]; }

  void validate() const {
    check_domain(n);
    if (n > 8) throw std::invalid_argument("CSP domains are limited to 8 elements");
    if (!domains.empty() && domains.size() != vars.size()) throw std::invalid_argument("one domain per variable");
    for (const auto& c : constraints) {
      if (c.rel.domain_size() != n) throw std::invalid_argument("relation over a different domain");
      if (static_cast<int>(c.scope.size()) != c.rel.arity()) throw std::invalid_argument("scope length differs from relation arity");
      for (int v : c.scope)
        if (v < 0 || v >= num_vars()) throw std::invalid_argument("scope names an unknown variable");
    }
  }
};

inline CspInstance make_instance(int n, int nvars, std::vector<Constraint> cs) {
  CspInstance I;
  I.n = n;
  for (int i = 0; i < nvars; ++i) I.vars.push_back("x" + std::to_string(i));
  I.constraints = std::move(cs);
  I.validate();
  return I;
}

namespace detail {

// Tuples whose entries lie in the domains of their variables. Positions are
// independent, as in the LP: a repeated variable does not force equal entries.
inline std::vector<Tuple> live_tuples(const CspInstance& I, const Constraint& c) {
  std::vector<Tuple> out;
  for (const auto& t : c.rel.tuples()) {
    bool ok = true;
    for (std::size_t i = 0; i < t.size() && ok; ++i) ok = (I.domain(c.scope[i]) >> t[i]) & 1u;
    if (ok) out.push_back(t);
  }
  return out;
}

inline ElemSet position_values(const std::vector<Tuple>& ts, std::size_t i) {
  ElemSet s = 0;
  for (const auto& t : ts) s |= ElemSet{1} << t[i];
  return s;
}

inline bool mentions(const Constraint& c, int x) { return std::find(c.scope.begin(), c.scope.end(), x) != c.scope.end(); }

}  // namespace detail

struct ArcResult {
  bool consistent = true;
  std::vector<ElemSet> domains;
  CspInstance pruned;  // relations restricted to tuples within the domains
};

/** Greatest fixpoint of domain pruning. */
inline ArcResult arc_consistency(const CspInstance& inst) {
  inst.validate();
  ArcResult res;
  res.domains.resize(static_cast<std::size_t>(inst.num_vars()));
  for (int x = 0; x < inst.num_vars(); ++x) res.domains[static_cast<std::size_t>(x)] = inst.domain(x);
  std::vector<std::vector<Tuple>> live;
  for (const auto& c : inst.constraints) live.push_back(detail::live_tuples(inst, c));
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
      const auto& sc = inst.constraints[k].scope;
      std::vector<Tuple> keep;
      for (const auto& t : live[k]) {
        bool ok = true;
        for (std::size_t i = 0; i < t.size() && ok; ++i) ok = (res.domains[static_cast<std::size_t>(sc[i])] >> t[i]) & 1u;
        if (ok) keep.push_back(t);
      }
      if (keep.size() != live[k].size()) changed = true;
      live[k] = std::move(keep);
      for (std::size_t i = 0; i < sc.size(); ++i) {
        ElemSet& d = res.domains[static_cast<std::size_t>(sc[i])];
        const ElemSet s = detail::position_values(live[k], i);
        if ((d & s) != d) {
          d &= s;
          changed = true;
        }
      }
    }
  }
  res.pruned = inst;
  res.pruned.domains = res.domains;
  for (std::size_t k = 0; k < inst.constraints.size(); ++k)
    res.pruned.constraints[k].rel = Relation(inst.n, inst.constraints[k].rel.arity(), live[k]);
  for (ElemSet d : res.domains)
    if (d == 0) res.consistent = false;
  return res;
}

struct P1Result {
  bool holds = true;
  std::vector<ElemSet> domains;  // A_x
  std::string reason;
};

/** A_x = values of x at each position of each constraint on x; all must agree. */
inline P1Result check_P1(const CspInstance& inst) {
  inst.validate();
  P1Result res;
  for (int x = 0; x < inst.num_vars(); ++x) {
    std::optional<ElemSet> ax;
    if (!inst.domains.empty()) ax = inst.domain(x);
    for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
      const auto& c = inst.constraints[k];
      if (!detail::mentions(c, x)) continue;
      const auto live = detail::live_tuples(inst, c);
      for (std::size_t i = 0; i < c.scope.size(); ++i) {
        if (c.scope[i] != x) continue;
        const ElemSet s = detail::position_values(live, i);
        if (ax && *ax != s && res.holds) {
          res.holds = false;
          res.reason = "variable " + inst.vars[static_cast<std::size_t>(x)] + ": constraint " + std::to_string(k) +
                       " allows a different set of values";
        }
        if (!ax) ax = s;
      }
    }
    const ElemSet d = ax.value_or(inst.domain(x));
    if (d == 0 && res.holds) {
      res.holds = false;
      res.reason = "variable " + inst.vars[static_cast<std::size_t>(x)] + " has no possible value";
    }
    res.domains.push_back(d);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Steps and cycles

struct Step {
  int k = 0;  // constraint index
  int i = 0;  // from coordinate
  int j = 0;  // to coordinate
  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

using Cycle = std::vector<Step>;

inline int step_from(const CspInstance& I, const Step& s) { return I.constraints.at(static_cast<std::size_t>(s.k)).scope.at(static_cast<std::size_t>(s.i)); }
inline int step_to(const CspInstance& I, const Step& s) { return I.constraints.at(static_cast<std::size_t>(s.k)).scope.at(static_cast<std::size_t>(s.j)); }

inline BinRel step_relation(const CspInstance& I, const Step& s) {
  const auto& c = I.constraints.at(static_cast<std::size_t>(s.k));
  if (s.i < 0 || s.j < 0 || s.i >= c.rel.arity() || s.j >= c.rel.arity()) throw std::out_of_range("step coordinate out of range");
  BinRel r(I.n);
  for (const auto& t : detail::live_tuples(I, c)) r.add(t[static_cast<std::size_t>(s.i)], t[static_cast<std::size_t>(s.j)]);
  return r;
}

inline ElemSet step_sum(ElemSet b, const CspInstance& I, const Step& s) { return plus(b, step_relation(I, s)); }
inline ElemSet step_diff(ElemSet b, const CspInstance& I, const Step& s) { return minus(b, step_relation(I, s)); }

inline void check_cycle(const CspInstance& I, const Cycle& p) {
  if (p.empty()) throw std::invalid_argument("empty cycle");
  for (std::size_t t = 0; t < p.size(); ++t)
    if (step_to(I, p[t]) != step_from(I, p[(t + 1) % p.size()])) throw std::invalid_argument("steps do not chain into a cycle");
}

// B + s_1 + ... + s_p
inline ElemSet cycle_sum(ElemSet b, const CspInstance& I, const Cycle& p) {
  check_cycle(I, p);
  for (const auto& s : p) b = step_sum(b, I, s);
  return b;
}

// B - s_p - ... - s_1
inline ElemSet cycle_diff(ElemSet b, const CspInstance& I, const Cycle& p) {
  check_cycle(I, p);
  for (auto it = p.rbegin(); it != p.rend(); ++it) b = step_diff(b, I, *it);
  return b;
}

inline std::vector<Step> all_steps(const CspInstance& I) {
  std::vector<Step> out;
  for (std::size_t k = 0; k < I.constraints.size(); ++k) {
    const int a = I.constraints[k].rel.arity();
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) out.push_back({static_cast<int>(k), i, j});
  }
  return out;
}

/**
 * For each pair of variables, every relation composed along some walk of
 * steps, with a shortest walk realizing it. Finite because there are at most
 * 2^(n*n) relations per pair.
 */
class WalkRelations {
 public:
  explicit WalkRelations(const CspInstance& I) : nv_(I.num_vars()), rels_(static_cast<std::size_t>(nv_ * nv_)) {
    std::vector<std::pair<Step, BinRel>> steps;
    for (const auto& s : all_steps(I)) steps.emplace_back(s, step_relation(I, s));
    std::vector<std::tuple<int, int, std::uint64_t>> queue;
    auto push = [&](int x, int y, const BinRel& r, std::vector<Step> w) {
      auto& m = rels_[static_cast<std::size_t>(x * nv_ + y)];
      if (m.emplace(r.bits(), std::move(w)).second) queue.emplace_back(x, y, r.bits());
    };
    for (const auto& [s, r] : steps) push(step_from(I, s), step_to(I, s), r, {s});
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto [x, y, bits] = queue[q];
      const BinRel r(I.n, bits);
      const std::vector<Step> w = rels_[static_cast<std::size_t>(x * nv_ + y)].at(bits);
      for (const auto& [s, sr] : steps) {
        if (step_from(I, s) != y) continue;
        auto w2 = w;
        w2.push_back(s);
        push(x, step_to(I, s), compose(r, sr), std::move(w2));
      }
    }
    n_ = I.n;
  }

  // relation bits -> shortest walk
  const std::map<std::uint64_t, std::vector<Step>>& between(int x, int y) const { return rels_[static_cast<std::size_t>(x * nv_ + y)]; }
  int n() const { return n_; }

 private:
  int nv_;
  int n_ = 1;
  std::vector<std::map<std::uint64_t, std::vector<Step>>> rels_;
};

struct PragueWitness {
  int var = 0;
  ElemSet set = 0;
  Cycle p, q;  // q only for (P3)
};

struct PragueResult {
  bool holds = true;
  std::optional<PragueWitness> witness;
};

namespace detail {

inline std::vector<ElemSet> nonempty_subsets(ElemSet u) {
  std::vector<ElemSet> out;
  for (ElemSet b = u; b; b = (b - 1) & u) out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/** (P2): B + p = B implies B - p = B, for cycles p at x and B within A_x. */
inline PragueResult check_P2(const CspInstance& I) {
  const auto p1 = check_P1(I);
  const WalkRelations W(I);
  PragueResult res;
  for (int x = 0; x < I.num_vars(); ++x)
    for (const auto& [bits, walk] : W.between(x, x)) {
      const BinRel P(I.n, bits);
      for (ElemSet b : detail::nonempty_subsets(p1.domains[static_cast<std::size_t>(x)]))
        if (plus(b, P) == b && minus(b, P) != b) {
          res.holds = false;
          res.witness = PragueWitness{x, b, walk, {}};
          return res;
        }
    }
  return res;
}

/** (P2*): B + p = B implies B + s_1 - s_1 = B, with s_1 the first step of p. */
inline PragueResult check_P2star(const CspInstance& I) {
  const auto p1 = check_P1(I);
  const WalkRelations W(I);
  PragueResult res;
  for (int x = 0; x < I.num_vars(); ++x) {
    const ElemSet ax = p1.domains[static_cast<std::size_t>(x)];
    for (const auto& s1 : all_steps(I)) {
      if (step_from(I, s1) != x) continue;
      const int y = step_to(I, s1);
      const BinRel S = step_relation(I, s1);
      std::vector<std::pair<BinRel, Cycle>> rest;
      if (y == x) rest.emplace_back(BinRel::identity(I.n), Cycle{});
      for (const auto& [bits, walk] : W.between(y, x)) rest.emplace_back(BinRel(I.n, bits), walk);
      for (const auto& [Q, walk] : rest) {
        const BinRel P = compose(S, Q);
        for (ElemSet b : detail::nonempty_subsets(ax))
          if (plus(b, P) == b && minus(plus(b, S), S) != b) {
            Cycle c{s1};
            c.insert(c.end(), walk.begin(), walk.end());
            res.holds = false;
            res.witness = PragueWitness{x, b, c, {}};
            return res;
          }
      }
    }
  }
  return res;
}

/** (P3): B + p + q = B implies B + p = B. */
inline PragueResult check_P3(const CspInstance& I) {
  const auto p1 = check_P1(I);
  const WalkRelations W(I);
  PragueResult res;
  for (int x = 0; x < I.num_vars(); ++x) {
    const auto& loops = W.between(x, x);
    for (const auto& [pb, pw] : loops)
      for (const auto& [qb, qw] : loops) {
        const BinRel P(I.n, pb), Q(I.n, qb);
        for (ElemSet b : detail::nonempty_subsets(p1.domains[static_cast<std::size_t>(x)]))
          if (plus(plus(b, P), Q) == b && plus(b, P) != b) {
            res.holds = false;
            res.witness = PragueWitness{x, b, pw, qw};
            return res;
          }
      }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Basic LP relaxation

struct LpSolution {
  std::vector<std::vector<Rational>> var_probs;  // [x][a]
  std::vector<std::vector<Rational>> con_probs;  // [k][index into constraints[k].rel.tuples()]
};

namespace detail {

struct BlpLayout {
  LinearProgram lp;
  std::vector<std::vector<int>> var_col;  // [x][a] -> column or -1
  std::vector<std::vector<int>> con_col;  // [k][t] -> column or -1
};

inline BlpLayout blp_layout(const CspInstance& I) {
  I.validate();
  BlpLayout L;
  int cols = 0;
  L.var_col.assign(static_cast<std::size_t>(I.num_vars()), std::vector<int>(static_cast<std::size_t>(I.n), -1));
  for (int x = 0; x < I.num_vars(); ++x)
    for (Elem a : set_elems(I.domain(x))) L.var_col[static_cast<std::size_t>(x)][a] = cols++;
  for (const auto& c : I.constraints) {
    std::vector<int> col(c.rel.size(), -1);
    for (std::size_t t = 0; t < c.rel.size(); ++t) {
      const Tuple& tu = c.rel.tuples()[t];
      bool ok = true;
      for (std::size_t i = 0; i < tu.size() && ok; ++i) {
        ok = (I.domain(c.scope[i]) >> tu[i]) & 1u;
      }
      if (ok) col[t] = cols++;
    }
    L.con_col.push_back(std::move(col));
  }
  L.lp = LinearProgram(cols);
  for (int x = 0; x < I.num_vars(); ++x) {
    std::vector<std::pair<int, Rational>> row;
    for (int c : L.var_col[static_cast<std::size_t>(x)])
      if (c >= 0) row.emplace_back(c, 1);
    L.lp.add_row(row, RowSense::Eq, 1);
  }
  for (std::size_t k = 0; k < I.constraints.size(); ++k) {
    const auto& c = I.constraints[k];
    std::vector<std::pair<int, Rational>> row;
    for (int col : L.con_col[k])
      if (col >= 0) row.emplace_back(col, 1);
    L.lp.add_row(row, RowSense::Eq, 1);
    for (std::size_t i = 0; i < c.scope.size(); ++i)
      for (int a = 0; a < I.n; ++a) {
        std::vector<std::pair<int, Rational>> m;
        for (std::size_t t = 0; t < c.rel.size(); ++t)
          if (L.con_col[k][t] >= 0 && c.rel.tuples()[t][i] == a) m.emplace_back(L.con_col[k][t], 1);
        const int vc = L.var_col[static_cast<std::size_t>(c.scope[i])][static_cast<std::size_t>(a)];
        if (vc >= 0) m.emplace_back(vc, -1);
        L.lp.add_row(m, RowSense::Eq, 0);
      }
  }
  return L;
}

inline LpSolution unpack(const CspInstance& I, const BlpLayout& L, const std::vector<Rational>& x) {
  LpSolution s;
  for (const auto& row : L.var_col) {
    std::vector<Rational> p(row.size());
    for (std::size_t a = 0; a < row.size(); ++a)
      if (row[a] >= 0) p[a] = x[static_cast<std::size_t>(row[a])];
    s.var_probs.push_back(std::move(p));
  }
  for (std::size_t k = 0; k < I.constraints.size(); ++k) {
    std::vector<Rational> p(L.con_col[k].size());
    for (std::size_t t = 0; t < p.size(); ++t)
      if (L.con_col[k][t] >= 0) p[t] = x[static_cast<std::size_t>(L.con_col[k][t])];
    s.con_probs.push_back(std::move(p));
  }
  return s;
}

}  // namespace detail

/** A fractional solution, or none. With `interior`, one of maximal support. */
inline std::optional<LpSolution> blp_feasible(const CspInstance& I, bool interior = false) {
  auto L = detail::blp_layout(I);
  if (interior) {
    auto x = max_support_point(L.lp);
    if (!x) return std::nullopt;
    return detail::unpack(I, L, *x);
  }
  auto r = solve_lp(L.lp);
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return detail::unpack(I, L, r.x);
}

/** Nonnegative, sums to one, marginals match. */
inline bool check_lp_solution(const CspInstance& I, const LpSolution& s) {
  if (s.var_probs.size() != static_cast<std::size_t>(I.num_vars()) || s.con_probs.size() != I.constraints.size()) return false;
  for (int x = 0; x < I.num_vars(); ++x) {
    Rational sum;
    for (int a = 0; a < I.n; ++a) {
      const Rational& p = s.var_probs[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
      if (sgn(p) < 0 || (sgn(p) > 0 && !((I.domain(x) >> a) & 1u))) return false;
      sum += p;
    }
    if (sum != 1) return false;
  }
  for (std::size_t k = 0; k < I.constraints.size(); ++k) {
    const auto& c = I.constraints[k];
    if (s.con_probs[k].size() != c.rel.size()) return false;
    Rational sum;
    for (const auto& p : s.con_probs[k]) {
      if (sgn(p) < 0) return false;
      sum += p;
    }
    if (sum != 1) return false;
    for (std::size_t i = 0; i < c.scope.size(); ++i)
      for (int a = 0; a < I.n; ++a) {
        Rational m;
        for (std::size_t t = 0; t < c.rel.size(); ++t)
          if (c.rel.tuples()[t][i] == a) m += s.con_probs[k][t];
        if (m != s.var_probs[static_cast<std::size_t>(c.scope[i])][static_cast<std::size_t>(a)]) return false;
      }
  }
  return true;
}

/** Constraints cut down to their support, domains to the variable supports. */
inline CspInstance restrict_to_support(const CspInstance& I, const LpSolution& s) {
  CspInstance out = I;
  out.domains.assign(static_cast<std::size_t>(I.num_vars()), 0);
  for (int x = 0; x < I.num_vars(); ++x)
    for (int a = 0; a < I.n; ++a)
      if (sgn(s.var_probs[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)]) > 0) out.domains[static_cast<std::size_t>(x)] |= ElemSet{1} << a;
  for (std::size_t k = 0; k < I.constraints.size(); ++k) {
    std::vector<Tuple> keep;
    for (std::size_t t = 0; t < I.constraints[k].rel.size(); ++t)
      if (sgn(s.con_probs[k][t]) > 0) keep.push_back(I.constraints[k].rel.tuples()[t]);
    out.constraints[k].rel = Relation(I.n, I.constraints[k].rel.arity(), std::move(keep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single cycle

struct CycleLayout {
  std::vector<int> order;         // constraint visited at position i
  std::vector<bool> reversed;     // its scope read backwards
  std::vector<int> joint;         // variable entering position i
};

/** Binary constraints C_1..C_m linking v_1 -> v_2 -> ... -> v_1, each variable in exactly two. */
inline std::optional<CycleLayout> cycle_layout(const CspInstance& I) {
  const int m = static_cast<int>(I.constraints.size());
  if (m == 0) return std::nullopt;
  for (const auto& c : I.constraints)
    if (c.scope.size() != 2) return std::nullopt;
  std::vector<int> uses(static_cast<std::size_t>(I.num_vars()), 0);
  for (const auto& c : I.constraints)
    for (int v : c.scope) ++uses[static_cast<std::size_t>(v)];
  for (int u : uses)
    if (u != 0 && u != 2) return std::nullopt;
  CycleLayout L;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  int k = 0;
  bool rev = false;
  const int start = I.constraints[0].scope[0];
  for (;;) {
    used[static_cast<std::size_t>(k)] = true;
    const auto& sc = I.constraints[static_cast<std::size_t>(k)].scope;
    L.order.push_back(k);
    L.reversed.push_back(rev);
    L.joint.push_back(rev ? sc[1] : sc[0]);
    const int next_var = rev ? sc[0] : sc[1];
    if (next_var == start && static_cast<int>(L.order.size()) == m) return L;
    std::optional<int> nk;
    for (int c = 0; c < m && !nk; ++c)
      if (!used[static_cast<std::size_t>(c)] && (I.constraints[static_cast<std::size_t>(c)].scope[0] == next_var || I.constraints[static_cast<std::size_t>(c)].scope[1] == next_var))
        nk = c;
    if (!nk) return std::nullopt;
    k = *nk;
    rev = I.constraints[static_cast<std::size_t>(k)].scope[0] != next_var;
  }
}

/**
 * Full-support fractional solution of a single-cycle instance with (P1) and
 * (P2): the stationary law of the walk that moves from value a of v_i along a
 * uniformly chosen edge of C_i. Every state is recurrent under (P1) and (P2).
 */
inline LpSolution single_cycle_lp(const CspInstance& I) {
  const auto layout = cycle_layout(I);
  if (!layout) throw std::invalid_argument("instance is not a single cycle of binary constraints");
  const auto p1 = check_P1(I);
  if (!p1.holds) throw std::invalid_argument("single_cycle_lp needs (P1): " + p1.reason);
  if (!check_P2(I).holds) throw std::invalid_argument("single_cycle_lp needs (P2)");
  const int m = static_cast<int>(layout->order.size()), n = I.n;
  std::vector<BinRel> S;
  for (int i = 0; i < m; ++i) {
    BinRel r = BinRel::from_relation(I.constraints[static_cast<std::size_t>(layout->order[static_cast<std::size_t>(i)])].rel);
    S.push_back(layout->reversed[static_cast<std::size_t>(i)] ? reverse(r) : r);
  }
  // states (i, a), index i * n + a
  const int ns = m * n;
  auto alive = [&](int s) { return (p1.domains[static_cast<std::size_t>(layout->joint[static_cast<std::size_t>(s / n)])] >> (s % n)) & 1u; };
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(ns), std::vector<bool>(static_cast<std::size_t>(ns), false));
  auto succ = [&](int s) {
    std::vector<int> out;
    const int i = s / n, a = s % n;
    for (Elem b : set_elems(S[static_cast<std::size_t>(i)].successors(a))) out.push_back(((i + 1) % m) * n + b);
    return out;
  };
  for (int s = 0; s < ns; ++s)
    if (alive(s))
      for (int t : succ(s)) reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
  for (int k = 0; k < ns; ++k)
    for (int s = 0; s < ns; ++s)
      if (reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)])
        for (int t = 0; t < ns; ++t)
          if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)]) reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
  for (int s = 0; s < ns; ++s)
    if (alive(s))
      for (int t = 0; t < ns; ++t)
        if (reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] && !reach[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)])
          throw std::logic_error("transient state in a (P1)+(P2) cycle");

  // stationary law of each closed class, solved exactly
  std::vector<Rational> pi(static_cast<std::size_t>(ns));
  std::vector<bool> done(static_cast<std::size_t>(ns), false);
  for (int s0 = 0; s0 < ns; ++s0) {
    if (!alive(s0) || done[static_cast<std::size_t>(s0)]) continue;
    std::vector<int> cls;
    for (int t = 0; t < ns; ++t)
      if (t == s0 || (reach[static_cast<std::size_t>(s0)][static_cast<std::size_t>(t)] && reach[static_cast<std::size_t>(t)][static_cast<std::size_t>(s0)])) cls.push_back(t);
    std::map<int, int> col;
    for (int t : cls) col[t] = static_cast<int>(col.size());
    LinearProgram lp(static_cast<int>(cls.size()));
    std::vector<std::pair<int, Rational>> sum;
    for (int t : cls) sum.emplace_back(col[t], 1);
    lp.add_row(sum, RowSense::Eq, 1);
    for (int t : cls) {
      std::vector<std::pair<int, Rational>> row{{col[t], -1}};
      for (int s : cls) {
        const auto out = succ(s);
        if (std::count(out.begin(), out.end(), t)) row.emplace_back(col[s], Rational(1, static_cast<long>(out.size())));
      }
      lp.add_row(row, RowSense::Eq, 0);
    }
    auto r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) throw std::logic_error("no stationary law");
    for (int t : cls) {
      pi[static_cast<std::size_t>(t)] += r.x[static_cast<std::size_t>(col[t])];
      done[static_cast<std::size_t>(t)] = true;
    }
  }

  LpSolution sol;
  sol.var_probs.assign(static_cast<std::size_t>(I.num_vars()), std::vector<Rational>(static_cast<std::size_t>(n)));
  sol.con_probs.resize(I.constraints.size());
  for (int x = 0; x < I.num_vars(); ++x) {
    // variables outside the cycle: uniform on A_x
    const auto vals = set_elems(p1.domains[static_cast<std::size_t>(x)]);
    for (Elem a : vals) sol.var_probs[static_cast<std::size_t>(x)][a] = Rational(1, static_cast<long>(vals.size()));
  }
  for (int i = 0; i < m; ++i) {
    Rational layer;
    for (int a = 0; a < n; ++a) layer += pi[static_cast<std::size_t>(i * n + a)];
    const int v = layout->joint[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a) sol.var_probs[static_cast<std::size_t>(v)][static_cast<std::size_t>(a)] = pi[static_cast<std::size_t>(i * n + a)] / layer;
    const int k = layout->order[static_cast<std::size_t>(i)];
    const auto& rel = I.constraints[static_cast<std::size_t>(k)].rel;
    auto& p = sol.con_probs[static_cast<std::size_t>(k)];
    p.assign(rel.size(), Rational(0));
    for (std::size_t t = 0; t < rel.size(); ++t) {
      const Elem a = rel.tuples()[t][layout->reversed[static_cast<std::size_t>(i)] ? 1 : 0];
      const auto deg = static_cast<long>(std::popcount(S[static_cast<std::size_t>(i)].successors(a)));
      p[t] = pi[static_cast<std::size_t>(i * n + a)] / layer / deg;
    }
  }
  return sol;
}

}  // namespace cloneforge
