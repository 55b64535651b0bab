#include <gtest/gtest.h>

#include <random>

#include "cloneforge/conjecture.hpp"
#include "cloneforge/csp.hpp"
#include "cloneforge/examples.hpp"
#include "cloneforge/subpower.hpp"
#include "cloneforge/sym.hpp"

using namespace cloneforge;

namespace {

Relation rel_of(int n, std::initializer_list<Tuple> ts) { return Relation(n, static_cast<int>(ts.begin()->size()), std::vector<Tuple>(ts)); }

Relation random_relation(std::mt19937_64& rng, int n, int arity, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<Tuple> ts;
  for_each_tuple(n, arity, [&](const Tuple& t) {
    if (coin(rng)) ts.push_back(t);
  });
  return Relation(n, arity, std::move(ts));
}

CspInstance random_instance(std::mt19937_64& rng, int n, int nvars, int ncons, int max_arity, double density) {
  std::vector<Constraint> cs;
  for (int k = 0; k < ncons; ++k) {
    const int ar = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_arity));
    std::vector<int> scope;
    for (int i = 0; i < ar; ++i) scope.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(nvars)));
    cs.push_back({scope, random_relation(rng, n, ar, density)});
  }
  return make_instance(n, nvars, cs);
}

bool satisfies(const CspInstance& I, const std::vector<Elem>& val) {
  for (int x = 0; x < I.num_vars(); ++x)
    if (!((I.domain(x) >> val[static_cast<std::size_t>(x)]) & 1u)) return false;
  for (const auto& c : I.constraints) {
    Tuple t;
    for (int v : c.scope) t.push_back(val[static_cast<std::size_t>(v)]);
    if (!c.rel.contains(t)) return false;
  }
  return true;
}

std::optional<std::vector<Elem>> brute_solve(const CspInstance& I) {
  std::optional<std::vector<Elem>> out;
  for_each_tuple(I.n, I.num_vars(), [&](const Tuple& t) {
    if (!out && satisfies(I, t)) out = t;
  });
  return out;
}

// Pairs (a_i, a_j) of tuples of constraint k lying within the domains.
std::set<std::pair<int, int>> raw_step(const CspInstance& I, const Step& s) {
  std::set<std::pair<int, int>> out;
  const auto& c = I.constraints[static_cast<std::size_t>(s.k)];
  for (const auto& t : c.rel.tuples()) {
    bool ok = true;
    for (std::size_t p = 0; p < t.size(); ++p) ok &= ((I.domain(c.scope[p]) >> t[p]) & 1u) != 0;
    if (ok) out.insert({t[static_cast<std::size_t>(s.i)], t[static_cast<std::size_t>(s.j)]});
  }
  return out;
}

std::set<int> fwd(const std::set<int>& b, const std::set<std::pair<int, int>>& r) {
  std::set<int> out;
  for (auto [x, y] : r)
    if (b.count(x)) out.insert(y);
  return out;
}
std::set<int> bwd(const std::set<int>& b, const std::set<std::pair<int, int>>& r) {
  std::set<int> out;
  for (auto [x, y] : r)
    if (b.count(y)) out.insert(x);
  return out;
}

std::vector<std::set<int>> subsets_of(ElemSet u) {
  std::vector<std::set<int>> out;
  for (ElemSet b = u; b; b = (b - 1) & u) {
    std::set<int> s;
    for (Elem e : set_elems(b)) s.insert(e);
    out.push_back(s);
  }
  return out;
}

// All cycles at x of length 1..max_len, enumerated step by step.
void for_each_cycle(const CspInstance& I, int x, int max_len, const std::function<void(const Cycle&)>& fn) {
  const auto steps = all_steps(I);
  Cycle cur;
  std::function<void(int)> rec = [&](int at) {
    if (!cur.empty() && at == x) fn(cur);
    if (static_cast<int>(cur.size()) == max_len) return;
    for (const auto& s : steps)
      if (step_from(I, s) == at) {
        cur.push_back(s);
        rec(step_to(I, s));
        cur.pop_back();
      }
  };
  rec(x);
}

bool p2_by_enumeration(const CspInstance& I, int max_len) {
  const auto p1 = check_P1(I);
  for (int x = 0; x < I.num_vars(); ++x) {
    bool ok = true;
    for_each_cycle(I, x, max_len, [&](const Cycle& p) {
      if (!ok) return;
      for (const auto& b : subsets_of(p1.domains[static_cast<std::size_t>(x)])) {
        auto plus_b = b;
        for (const auto& s : p) plus_b = fwd(plus_b, raw_step(I, s));
        auto minus_b = b;
        for (auto it = p.rbegin(); it != p.rend(); ++it) minus_b = bwd(minus_b, raw_step(I, *it));
        if (plus_b == b && minus_b != b) ok = false;
      }
    });
    if (!ok) return false;
  }
  return true;
}

bool p3_by_enumeration(const CspInstance& I, int max_len) {
  const auto p1 = check_P1(I);
  for (int x = 0; x < I.num_vars(); ++x) {
    std::vector<Cycle> cycles;
    for_each_cycle(I, x, max_len, [&](const Cycle& p) { cycles.push_back(p); });
    for (const auto& p : cycles)
      for (const auto& q : cycles)
        for (const auto& b : subsets_of(p1.domains[static_cast<std::size_t>(x)])) {
          auto bp = b;
          for (const auto& s : p) bp = fwd(bp, raw_step(I, s));
          auto bpq = bp;
          for (const auto& s : q) bpq = fwd(bpq, raw_step(I, s));
          if (bpq == b && bp != b) return false;
        }
  }
  return true;
}

CspInstance sym_instance(const Algebra& alg, const Tuple& a) {
  const auto sr = sym_relation_plain(alg, a);
  const Relation& R = sr.closure;
  return make_instance(alg.n, 1, {{std::vector<int>(static_cast<std::size_t>(R.arity()), 0), R}});
}

void expect_support_is_relation(const CspInstance& I, const LpSolution& s) {
  for (std::size_t k = 0; k < I.constraints.size(); ++k)
    for (const auto& p : s.con_probs[k]) EXPECT_GT(sgn(p), 0);
}

}  // namespace

TEST(ArcConsistency, Examples) {
  auto I = make_instance(2, 2, {{{0, 1}, rel_of(2, {{0, 1}, {1, 0}})}});
  auto ac = arc_consistency(I);
  EXPECT_TRUE(ac.consistent);
  EXPECT_EQ(ac.domains, (std::vector<ElemSet>{3, 3}));
  EXPECT_TRUE(check_P1(I).holds);

  auto J = make_instance(2, 1, {{{0}, rel_of(2, {{0}})}, {{0}, rel_of(2, {{1}})}});
  EXPECT_FALSE(arc_consistency(J).consistent);
  EXPECT_FALSE(check_P1(J).holds);
  EXPECT_FALSE(blp_feasible(J).has_value());
}

TEST(ArcConsistency, FixpointMatchesBruteForceSupports) {
  // every solution survives, and the pruned instance has P1 when consistent
  std::mt19937_64 rng(11);
  for (int it = 0; it < 400; ++it) {
    const auto I = random_instance(rng, 2 + static_cast<int>(rng() % 2), 3, 3, 2, 0.5);
    const auto ac = arc_consistency(I);
    for_each_tuple(I.n, I.num_vars(), [&](const Tuple& t) {
      if (!satisfies(I, t)) return;
      ASSERT_TRUE(ac.consistent);
      for (int x = 0; x < I.num_vars(); ++x) EXPECT_TRUE((ac.domains[static_cast<std::size_t>(x)] >> t[static_cast<std::size_t>(x)]) & 1u);
    });
    if (ac.consistent) { EXPECT_TRUE(check_P1(ac.pruned).holds) << check_P1(ac.pruned).reason; }
  }
}

TEST(SymInstance, ArcConsistentFractionalYetUnsolvable) {
  const Algebra alg{3, {binary_from_name("f_+-0", 3)}};
  int found = 0;
  for_each_tuple(3, 3, [&](const Tuple& a) {
    const auto I = sym_instance(alg, a);
    // oracle closure from the rearrangement columns
    const auto& R = I.constraints[0].rel;
    std::vector<Tuple> cols(3, Tuple(static_cast<std::size_t>(R.arity())));
    const auto perms = rearrangements(a);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t s = 0; s < perms.size(); ++s) cols[j][s] = perms[s][j];
    ASSERT_EQ(sg_power(alg, R.arity(), cols).closure.tuples(), R.tuples());
    EXPECT_TRUE(check_P1(I).holds);
    auto lp = blp_feasible(I);
    ASSERT_TRUE(lp.has_value());
    EXPECT_TRUE(check_lp_solution(I, *lp));
    if (!brute_solve(I)) ++found;
  });
  EXPECT_GT(found, 0);
}

TEST(SymInstance, UniformDistributionIsFeasible) {
  const Algebra alg{3, {binary_from_name("f_+-0", 3)}};
  const auto I = sym_instance(alg, {0, 1, 2});
  EXPECT_FALSE(brute_solve(I).has_value());
  const auto& R = I.constraints[0].rel;
  LpSolution s;
  s.con_probs = {std::vector<Rational>(R.size(), Rational(1, static_cast<long>(R.size())))};
  s.var_probs.assign(1, std::vector<Rational>(3));
  for (const auto& t : R.tuples()) s.var_probs[0][t[0]] += Rational(1, static_cast<long>(R.size()));
  EXPECT_TRUE(check_lp_solution(I, s));
  auto interior = blp_feasible(I, true);
  ASSERT_TRUE(interior.has_value());
  expect_support_is_relation(I, *interior);
}

TEST(Steps, SumNegationCycle) {
  // x1 x2 x3 x4 x5 in one constraint; the cycle x4 -> x5 -> x4 through the x=-y part
  const auto I = make_instance(3, 5, {{{0, 1, 2, 3, 4}, sum_negation_relation()}});
  const Cycle p{{0, 3, 4}, {0, 4, 3}};
  EXPECT_EQ(cycle_sum(set_of({0}), I, p), set_of({0}));
  EXPECT_EQ(cycle_diff(set_of({0}), I, p), set_of({0}));
  EXPECT_EQ(step_sum(full_set(3), I, {0, 0, 1}), full_set(3));
  EXPECT_THROW(cycle_sum(1, I, Cycle{{0, 0, 1}, {0, 3, 4}}), std::invalid_argument);
  // two variables: x1 x2 x3 collapsed onto u, x4 x5 onto v, so the projections chain
  const auto J = make_instance(3, 2, {{{0, 1}, project2(sum_negation_relation(), 0, 1).to_relation()},
                                      {{1, 0}, project2(sum_negation_relation(), 3, 4).to_relation()}});
  const Cycle q{{0, 0, 1}, {1, 0, 1}};
  EXPECT_EQ(cycle_sum(set_of({0}), J, q), set_of({0}));
  EXPECT_EQ(cycle_diff(set_of({0}), J, q), full_set(3));
  EXPECT_FALSE(check_P2(J).holds);
}

TEST(Steps, TwoVariableCycle) {
  // x0 <= x1 and x1 <= x0 on signs, traversed from {+}
  const Relation le = sign_relation("x<=y").to_relation();
  const auto I = make_instance(3, 2, {{{0, 1}, le}, {{1, 0}, le}});
  const Cycle p{{0, 0, 1}, {1, 0, 1}};
  EXPECT_EQ(cycle_sum(set_of({2}), I, p), set_of({2}));
  EXPECT_EQ(cycle_diff(set_of({2}), I, p), full_set(3));
  const auto r = check_P2(I);
  ASSERT_FALSE(r.holds);
  const auto& w = *r.witness;
  EXPECT_EQ(cycle_sum(w.set, I, w.p), w.set);
  EXPECT_NE(cycle_diff(w.set, I, w.p), w.set);
  EXPECT_EQ(step_from(I, w.p.front()), w.var);
  EXPECT_EQ(step_to(I, w.p.back()), w.var);
}

TEST(Prague, OneSymmetricRelationSatisfiesP2) {
  // every cycle relation is a power of R, hence its own reverse
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int it = 0; it < 400; ++it) {
    const int n = 2 + static_cast<int>(rng() % 2);
    BinRel r(n, rng() & ((std::uint64_t{1} << (n * n)) - 1));
    r = BinRel(n, r.bits() | reverse(r).bits());
    if (!r.subdirect()) continue;
    std::vector<Constraint> cs;
    for (int k = 0; k < 3; ++k) cs.push_back({{static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)}, r.to_relation()});
    const auto I = make_instance(n, 3, cs);
    if (!check_P1(I).holds) continue;
    ++checked;
    EXPECT_TRUE(check_P2(I).holds) << it;
  }
  EXPECT_GT(checked, 100);
}

TEST(Prague, DifferentSymmetricRelationsCanBreakP2) {
  const auto I = make_instance(3, 3, {{{1, 2}, rel_of(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}, {2, 2}})},
                                      {{2, 1}, rel_of(3, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}})},
                                      {{0, 2}, rel_of(3, {{0, 0}, {1, 1}, {1, 2}, {2, 1}})}});
  EXPECT_TRUE(check_P1(I).holds);
  const auto r = check_P2(I);
  ASSERT_FALSE(r.holds);
  EXPECT_FALSE(p2_by_enumeration(I, 4));
  EXPECT_EQ(cycle_sum(r.witness->set, I, r.witness->p), r.witness->set);
  EXPECT_NE(cycle_diff(r.witness->set, I, r.witness->p), r.witness->set);
}

TEST(Prague, P2EquivalentToP2StarExhaustiveN2) {
  std::vector<Relation> rels;
  for (int bits = 1; bits < 16; ++bits) {
    std::vector<Tuple> ts;
    for (int e = 0; e < 4; ++e)
      if ((bits >> e) & 1) ts.push_back({static_cast<Elem>(e / 2), static_cast<Elem>(e % 2)});
    rels.emplace_back(2, 2, ts);
  }
  const std::vector<std::vector<int>> scopes{{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  int compared = 0;
  for (const auto& r1 : rels)
    for (const auto& s1 : scopes) {
      {
        const auto I = make_instance(2, 2, {{s1, r1}});
        if (check_P1(I).holds) {
          EXPECT_EQ(check_P2(I).holds, check_P2star(I).holds);
          ++compared;
        }
      }
      for (const auto& r2 : rels)
        for (const auto& s2 : scopes) {
          const auto I = make_instance(2, 2, {{s1, r1}, {s2, r2}});
          if (!check_P1(I).holds) continue;
          ++compared;
          ASSERT_EQ(check_P2(I).holds, check_P2star(I).holds);
        }
    }
  EXPECT_GT(compared, 500);
}

TEST(Prague, P2EquivalentToP2StarN3) {
  std::vector<Relation> rels;
  for (std::uint64_t bits = 1; bits < 512; ++bits) {
    const BinRel r(3, bits);
    rels.push_back(r.to_relation());
  }
  const std::vector<std::vector<int>> scopes{{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  int compared = 0, failing = 0;
  for (const auto& r : rels)
    for (const auto& s : scopes) {
      const auto I = make_instance(3, 2, {{s, r}});
      if (!check_P1(I).holds) continue;
      ++compared;
      const bool p2 = check_P2(I).holds;
      failing += !p2;
      ASSERT_EQ(p2, check_P2star(I).holds);
    }
  // pairs drawn from the subdirect relations
  std::mt19937_64 rng(13);
  std::vector<Relation> sub;
  for (std::uint64_t bits = 1; bits < 512; ++bits)
    if (BinRel(3, bits).subdirect()) sub.push_back(BinRel(3, bits).to_relation());
  for (int it = 0; it < 20000; ++it) {
    const auto& r1 = sub[rng() % sub.size()];
    const auto& r2 = sub[rng() % sub.size()];
    const auto I = make_instance(3, 2, {{scopes[rng() % 4], r1}, {scopes[rng() % 2], r2}});
    if (!check_P1(I).holds) continue;
    ++compared;
    const bool p2 = check_P2(I).holds;
    failing += !p2;
    ASSERT_EQ(p2, check_P2star(I).holds);
  }
  EXPECT_GT(compared, 1000);
  EXPECT_GT(failing, 10);
}

TEST(Prague, MonoidMatchesCycleEnumeration) {
  std::mt19937_64 rng(14);
  int checked = 0;
  for (int it = 0; it < 600 && checked < 150; ++it) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const auto I0 = random_instance(rng, n, 2, 1 + static_cast<int>(rng() % 2), 2, 0.55);
    const auto ac = arc_consistency(I0);
    if (!ac.consistent) continue;
    const auto& I = ac.pruned;
    ++checked;
    EXPECT_EQ(check_P2(I).holds, p2_by_enumeration(I, 6)) << it;
    EXPECT_EQ(check_P3(I).holds, p3_by_enumeration(I, 3)) << it;
  }
  EXPECT_GT(checked, 50);
}

TEST(Blp, SolvableInstancesAreFeasible) {
  std::mt19937_64 rng(15);
  for (int it = 0; it < 300; ++it) {
    const auto I = random_instance(rng, 2 + static_cast<int>(rng() % 2), 3, 3, 3, 0.45);
    const auto sol = brute_solve(I);
    const auto lp = blp_feasible(I);
    if (sol) {
      ASSERT_TRUE(lp.has_value());
      // the integral point itself
      LpSolution s;
      s.var_probs.assign(3, std::vector<Rational>(static_cast<std::size_t>(I.n)));
      for (int x = 0; x < 3; ++x) s.var_probs[static_cast<std::size_t>(x)][(*sol)[static_cast<std::size_t>(x)]] = 1;
      for (const auto& c : I.constraints) {
        Tuple t;
        for (int v : c.scope) t.push_back((*sol)[static_cast<std::size_t>(v)]);
        std::vector<Rational> p(c.rel.size());
        for (std::size_t i = 0; i < c.rel.size(); ++i)
          if (c.rel.tuples()[i] == t) p[i] = 1;
        s.con_probs.push_back(p);
      }
      EXPECT_TRUE(check_lp_solution(I, s));
    }
    if (lp) { EXPECT_TRUE(check_lp_solution(I, *lp)); }
    if (!arc_consistency(I).consistent) { EXPECT_FALSE(lp.has_value()); }
  }
}

TEST(Blp, SupportRestrictionHasP1AndP2) {
  std::mt19937_64 rng(16);
  int feasible = 0;
  for (int it = 0; it < 300; ++it) {
    const auto I = random_instance(rng, 2 + static_cast<int>(rng() % 2), 3, 3, 2, 0.5);
    for (bool interior : {false, true}) {
      const auto lp = blp_feasible(I, interior);
      if (!lp) continue;
      ++feasible;
      ASSERT_TRUE(check_lp_solution(I, *lp));
      const auto J = restrict_to_support(I, *lp);
      EXPECT_TRUE(check_P1(J).holds) << check_P1(J).reason;
      EXPECT_TRUE(check_P2(J).holds);
      // the solution stays valid on the restricted instance
      LpSolution s = *lp;
      for (std::size_t k = 0; k < I.constraints.size(); ++k) {
        std::vector<Rational> kept;
        for (const auto& p : lp->con_probs[k])
          if (sgn(p) > 0) kept.push_back(p);
        s.con_probs[k] = kept;
      }
      EXPECT_TRUE(check_lp_solution(J, s));
    }
  }
  EXPECT_GT(feasible, 50);
}

TEST(Blp, InteriorPointHasMaximalSupport) {
  // every tuple used by some solution is used by the interior one
  std::mt19937_64 rng(17);
  for (int it = 0; it < 100; ++it) {
    const auto I = random_instance(rng, 2, 3, 3, 2, 0.6);
    const auto lp = blp_feasible(I, true);
    if (!lp) continue;
    std::vector<std::vector<bool>> used(I.constraints.size());
    for (std::size_t k = 0; k < I.constraints.size(); ++k) used[k].assign(I.constraints[k].rel.size(), false);
    for_each_tuple(I.n, I.num_vars(), [&](const Tuple& t) {
      if (!satisfies(I, t)) return;
      for (std::size_t k = 0; k < I.constraints.size(); ++k) {
        Tuple u;
        for (int v : I.constraints[k].scope) u.push_back(t[static_cast<std::size_t>(v)]);
        for (std::size_t i = 0; i < I.constraints[k].rel.size(); ++i)
          if (I.constraints[k].rel.tuples()[i] == u) used[k][i] = true;
      }
    });
    for (std::size_t k = 0; k < I.constraints.size(); ++k)
      for (std::size_t i = 0; i < used[k].size(); ++i)
        if (used[k][i]) { EXPECT_GT(sgn(lp->con_probs[k][i]), 0); }
  }
}

TEST(SingleCycle, Examples) {
  const Relation neg = sign_relation("x=-y").to_relation();
  for (int len : {2, 4}) {
    std::vector<Constraint> cs;
    for (int i = 0; i < len; ++i) cs.push_back({{i, (i + 1) % len}, neg});
    const auto I = make_instance(3, len, cs);
    const auto s = single_cycle_lp(I);
    EXPECT_TRUE(check_lp_solution(I, s));
    expect_support_is_relation(I, s);
  }
  const Relation sym = rel_of(2, {{0, 1}, {1, 0}, {1, 1}});
  const auto I = make_instance(2, 2, {{{0, 1}, sym}, {{1, 0}, sym}});
  const auto s = single_cycle_lp(I);
  EXPECT_TRUE(check_lp_solution(I, s));
  expect_support_is_relation(I, s);

  const Relation le = sign_relation("x<=y").to_relation();
  EXPECT_THROW(single_cycle_lp(make_instance(3, 2, {{{0, 1}, le}, {{1, 0}, le}})), std::invalid_argument);
  EXPECT_THROW(single_cycle_lp(make_instance(3, 3, {{{0, 1}, neg}, {{1, 2}, neg}})), std::invalid_argument);
}

TEST(SingleCycle, RandomP1P2CyclesGetFullSupport) {
  std::mt19937_64 rng(18);
  int built = 0;
  for (int it = 0; it < 20000 && built < 300; ++it) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int len = 1 + static_cast<int>(rng() % 4);
    std::vector<Constraint> cs;
    for (int i = 0; i < len; ++i) {
      BinRel r(n, rng() & ((std::uint64_t{1} << (n * n)) - 1));
      if (!r.subdirect()) r = BinRel(n, r.bits() | BinRel::identity(n).bits());
      std::vector<int> scope{i, (i + 1) % len};
      if (rng() % 2) {
        std::swap(scope[0], scope[1]);
        r = reverse(r);
      }
      cs.push_back({scope, r.to_relation()});
    }
    const auto I = make_instance(n, len, cs);
    if (!check_P1(I).holds || !check_P2(I).holds) continue;
    ++built;
    const auto s = single_cycle_lp(I);
    ASSERT_TRUE(check_lp_solution(I, s));
    expect_support_is_relation(I, s);
  }
  EXPECT_GT(built, 100);
}

TEST(Conjecture, SignAlgebraHasNoCandidates) {
  const auto rep = conjecture_search(sign_algebra(), 4, 3000, 19);
  EXPECT_TRUE(rep.candidates.empty());
  EXPECT_GT(rep.reversible, 10u);
  EXPECT_EQ(rep.truncated, 0u);
}

TEST(Conjecture, ArityOneNeverHasCandidates) {
  std::mt19937_64 rng(20);
  for (int it = 0; it < 20; ++it) {
    const OpTable f = OpTable::from_function(3, 2, [&](const Tuple& x) { return x[0] == x[1] ? x[0] : static_cast<Elem>(rng() % 3); });
    const auto rep = exhaustive_reversible_census(Algebra{3, {f}}, 1, 3);
    EXPECT_TRUE(rep.candidates.empty());
  }
}
