#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cloneforge/naming.hpp"
#include "cloneforge/op_table.hpp"
#include "cloneforge/relation.hpp"
#include "oracles.hpp"

using namespace cloneforge;

namespace {

constexpr Elem M = 0, Z = 1, P = 2;  // -, 0, +

OpTable sgn_sum() {
  return binary_from_function(3, [](int a, int b) {
    int s = (a - 1) + (b - 1);
    return (s > 0) - (s < 0) + 1;
  });
}

OpTable m1(const OpTable& f) {
  auto p1 = OpTable::projection(f.domain_size(), 2, 0);
  auto p2 = OpTable::projection(f.domain_size(), 2, 1);
  return compose(f, {compose(f, {p1, f}), compose(f, {p2, f})});
}

}  // namespace

TEST(OpTable, RejectsBadTables) {
  EXPECT_THROW(OpTable(3, 2, std::vector<Elem>(8, 0)), std::invalid_argument);
  EXPECT_THROW(OpTable(3, 1, {0, 1, 3}), std::invalid_argument);
  EXPECT_THROW(OpTable(0, 1, {}), std::invalid_argument);
}

TEST(Apply, Examples) {
  auto f000 = binary_from_name("f_000", 3);
  EXPECT_EQ(cloneforge::apply(f000, std::vector<Elem>{M, P}), Z);
  auto f210012 = binary_from_name("f_210012", 4);
  EXPECT_EQ(cloneforge::apply(f210012, std::vector<Elem>{1, 2}), 0);
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < k; ++i) {
      auto pr = OpTable::projection(3, k, i);
      for (const Tuple& x : oracle::all_tuples(3, k)) EXPECT_EQ(cloneforge::apply(pr, x), x[static_cast<std::size_t>(i)]);
    }
  EXPECT_THROW(cloneforge::apply(f000, std::vector<Elem>{0}), std::invalid_argument);
  EXPECT_THROW(cloneforge::apply(f000, std::vector<Elem>{0, 3}), std::invalid_argument);
}

TEST(ApplyPointwise, Examples) {
  auto f000 = binary_from_name("f_000", 3);
  EXPECT_EQ(apply_pointwise(f000, {{M, M}, {P, P}}), (Tuple{Z, Z}));
  auto p1 = OpTable::projection(3, 2, 0);
  EXPECT_EQ(apply_pointwise(p1, {{M, Z}, {P, P}}), (Tuple{M, Z}));
  EXPECT_EQ(binary_name(sgn_sum()), "f_+0-");
  EXPECT_EQ(apply_pointwise(sgn_sum(), {{M, Z, P}, {P, Z, M}}), (Tuple{Z, Z, Z}));
  EXPECT_THROW(apply_pointwise(p1, {{M}, {P, P}}), std::invalid_argument);
}

TEST(Compose, ReductionIdentities) {
  EXPECT_EQ(m1(binary_from_name("f_+00", 3)), binary_from_name("f_++0", 3));
  // the same identity does not hold for f_00+; its image is the top-absorbing semilattice
  EXPECT_EQ(m1(binary_from_name("f_00+", 3)), binary_from_name("f_000", 3));
  for (auto& f : oracle::symmetric_idempotent_binaries(3)) {
    auto direct = binary_from_function(3, [&](int a, int b) {
      auto F = [&](int x, int y) { return static_cast<int>(f({static_cast<Elem>(x), static_cast<Elem>(y)})); };
      return F(F(a, F(a, b)), F(b, F(a, b)));
    });
    EXPECT_EQ(m1(f), direct);
  }
  auto f = binary_from_name("f_000132", 4);
  auto g = binary_from_name("f_001233", 4);
  EXPECT_EQ(compose(OpTable::projection(4, 2, 0), {f, g}), f);
  EXPECT_THROW(compose(f, {f}), std::invalid_argument);
}

TEST(Compose, ProjectionInnersPermuteArguments) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3), k = 1 + static_cast<int>(rng() % 3);
    auto f = oracle::random_op(rng, n, k);
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<OpTable> inner;
    for (int i : perm) inner.push_back(OpTable::projection(n, k, i));
    auto h = compose(f, inner);
    for (const Tuple& x : oracle::all_tuples(n, k)) {
      Tuple y;
      for (int i : perm) y.push_back(x[static_cast<std::size_t>(i)]);
      ASSERT_EQ(h(x), f(y));
    }
  }
}

TEST(Symmetry, Examples) {
  auto f = binary_from_name("f_++0", 3);
  EXPECT_TRUE(is_idempotent(f));
  EXPECT_TRUE(is_symmetric(f));
  auto p1 = OpTable::projection(3, 2, 0);
  EXPECT_TRUE(is_idempotent(p1));
  EXPECT_FALSE(is_symmetric(p1));
  auto avg = binary_from_function(3, [](int a, int b) { return (2 * (a + b)) % 3; });
  EXPECT_TRUE(is_symmetric(avg));
  EXPECT_TRUE(is_idempotent(avg));
}

TEST(Symmetry, GeneratorCheckMatchesAllPermutations) {
  std::mt19937_64 rng(11);
  for (int k = 1; k <= 4; ++k)
    for (int rep = 0; rep < 40; ++rep) {
      const int n = 2 + static_cast<int>(rng() % 2);
      OpTable f = rep % 2 ? oracle::random_symmetric_idempotent(rng, n, k) : oracle::random_op(rng, n, k);
      if (rep % 4 == 1 && k > 1) {  // break symmetry at one cell
        auto t = f.table();
        t[1] = static_cast<Elem>((t[1] + 1) % n);
        f = OpTable(n, k, t);
      }
      ASSERT_EQ(is_symmetric(f), oracle::symmetric_all_perms(f));
    }
}

TEST(Rename, ActionLaw) {
  auto f = binary_from_name("f_000132", 4);
  EXPECT_EQ(rename(f, identity_perm(4)), f);
  Perm cyc{0, 2, 3, 1};  // an automorphism of f
  EXPECT_EQ(rename(f, cyc), f);
  Perm swap{1, 0, 2, 3};
  auto g = rename(f, swap);
  EXPECT_EQ(g, oracle::conjugate(f, swap));
  EXPECT_EQ(binary_name(g), "f_103112");
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    auto h = oracle::random_op(rng, 4, 2);
    Perm s = identity_perm(4), t = identity_perm(4);
    std::shuffle(s.begin(), s.end(), rng);
    std::shuffle(t.begin(), t.end(), rng);
    ASSERT_EQ(rename(rename(h, s), t), rename(h, compose_perm(t, s)));
  }
  EXPECT_THROW(rename(f, Perm{0, 0, 1, 2}), std::invalid_argument);
}

TEST(CanonicalForm, InvariantAndIdempotent) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    auto f = oracle::random_op(rng, 4, 2);
    auto c = canonical_form(f);
    EXPECT_EQ(canonical_form(c), c);
    EXPECT_EQ(c, oracle::least_conjugate(f));
    Perm s = identity_perm(4);
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_EQ(canonical_form(rename(f, s)), c);
  }
}

TEST(CanonicalForm, SmallDomainCounts) {
  auto two = oracle::symmetric_idempotent_binaries(2);
  EXPECT_EQ(two.size(), 2u);
  std::set<OpTable> c2;
  for (auto& f : two) c2.insert(canonical_form(f));
  EXPECT_EQ(c2.size(), 1u);  // min and max are conjugate

  auto three = oracle::symmetric_idempotent_binaries(3);
  EXPECT_EQ(three.size(), 27u);
  std::set<OpTable> c3;
  for (auto& f : three) c3.insert(canonical_form(f));
  EXPECT_EQ(c3.size(), 7u);
  std::set<OpTable> listed;
  for (auto nm : {"f_000", "f_++0", "f_+00", "f_00+", "f_+0-", "f_+-0", "f_-0+"})
    listed.insert(canonical_form(binary_from_name(nm, 3)));
  EXPECT_EQ(listed, c3);
}

TEST(LeaveOneOut, Examples) {
  auto f = binary_from_name("f_000132", 4);
  for (Elem a = 0; a < 4; ++a) EXPECT_EQ(leave_one_out(f, Tuple{a, a, a}), (Tuple{a, a, a}));
  EXPECT_EQ(leave_one_out(sgn_sum(), Tuple{M, Z, P}), (Tuple{P, Z, M}));
  EXPECT_THROW(leave_one_out(sgn_sum(), Tuple{M, Z}), std::invalid_argument);
}

TEST(LeaveOneOut, StableMatchesGlobalExponent) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const int k = 2 + static_cast<int>(rng() % 2);
    auto f = oracle::random_symmetric_idempotent(rng, n, k);
    for (const Tuple& x : oracle::all_tuples(n, k + 1)) {
      Tuple y = leave_one_out_stable(f, x);
      ASSERT_EQ(y, oracle::stable_global(f, x));
      ASSERT_EQ(leave_one_out_stable(f, y), y);
    }
  }
}

TEST(Naming, RoundTrip) {
  for (auto& f : oracle::symmetric_idempotent_binaries(3)) EXPECT_EQ(binary_from_name(binary_name(f), 3), f);
  auto f = binary_from_name("f_003312");
  EXPECT_EQ(f.domain_size(), 4);
  EXPECT_EQ(binary_name(f), "f_003312");
  EXPECT_EQ(f({0, 3}), 3);
  EXPECT_EQ(f({2, 3}), 2);
  auto s = binary_from_name("f_+-0", 3);
  EXPECT_EQ(s({Z, P}), P);
  EXPECT_EQ(s({M, P}), M);
  EXPECT_EQ(s({M, Z}), Z);
  EXPECT_THROW(binary_from_name("f_0012", 4), std::invalid_argument);
}

TEST(Relation, Basics) {
  Relation r(3, 2, {{0, 1}, {1, 0}, {0, 1}});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_TRUE(r.contains({1, 0}));
  EXPECT_FALSE(has_constant_tuple(r));
  EXPECT_EQ(has_constant_tuple(Relation::full(3, 4)), Elem{0});
  EXPECT_FALSE(has_constant_tuple(Relation(3, 2, {})));
  EXPECT_THROW(Relation(3, 2, {{0, 1, 2}}), std::invalid_argument);
  auto le = Relation::from_predicate(3, 2, [](const Tuple& x) { return x[0] <= x[1]; });
  EXPECT_TRUE(preserves(sgn_sum(), le));
  EXPECT_FALSE(preserves(binary_from_name("f_+-0", 3), le));
}
