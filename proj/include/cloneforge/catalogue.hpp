#pragma once
// Minimal semi-round clones on small domains: inductive witness schemas,
// the catalogue for n <= 4 and separating relations between its clones.

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "classification.hpp"
#include "families.hpp"
#include "naming.hpp"
#include "op_table.hpp"
#include "relation.hpp"
#include "subpower.hpp"

namespace cloneforge {

// Inductive schemas building f_{k+1} from f_k (and f_2, f_3):
//   S0  f2(f_k(x_1..x_k), x_{k+1})                        join ladder
//   S1  f2(f_k(c(x)_1..c(x)_k), c(x)_{k+1}),  c = c_{f_k}   sgn-style
//   S2  S1 applied to c^N(x)                               stabilized sgn-style
//   S3  f3(y_1, y'_1, y''_1), y = c^N(x), y' = c^N(f2(x, y)), y'' = c^N(f2(x, y'))
//   S4  as S3 with c^N(z) replaced by c^N(f2(c^N(z), c^{N+1}(z)))
enum class Schema { S0, S1, S2, S3, S4 };

inline const char* to_string(Schema s) {
  static const char* names[] = {"S0", "S1", "S2", "S3", "S4"};
  return names[static_cast<int>(s)];
}

inline Schema parse_schema(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == to_string(static_cast<Schema>(i))) return static_cast<Schema>(i);
  throw std::invalid_argument("unknown schema " + s);
}

namespace detail {

inline Elem schema_step(Schema sc, const OpTable& f2, const OpTable* f3, const OpTable& fk, const Tuple& x) {
  const std::size_t k = x.size() - 1;
  auto s1 = [&](const Tuple& z) {
    Tuple c = leave_one_out(fk, z);
    return f2({fk(std::span<const Elem>(c.data(), k)), c[k]});
  };
  auto stab = [&](const Tuple& z) {
    if (sc == Schema::S3) return leave_one_out_stable(fk, z);
    Tuple a = leave_one_out_stable(fk, z);
    return leave_one_out_stable(fk, pointwise2(f2, a, leave_one_out(fk, a)));
  };
  switch (sc) {
    case Schema::S0: return f2({fk(std::span<const Elem>(x.data(), k)), x[k]});
    case Schema::S1: return s1(x);
    case Schema::S2: return s1(leave_one_out_stable(fk, x));
    default: {
      Tuple y = stab(x);
      Tuple y1 = stab(pointwise2(f2, x, y));
      Tuple y2 = stab(pointwise2(f2, x, y1));
      return (*f3)({y[0], y1[0], y2[0]});
    }
  }
}

}  // namespace detail

// f_1..f_K by the schema; S3/S4 need f3 and start from it.
inline std::vector<OpTable> schema_ladder(Schema sc, const OpTable& f2, const std::optional<OpTable>& f3, int K) {
  const int n = f2.domain_size();
  std::vector<OpTable> fs{OpTable::projection(n, 1, 0), f2};
  const bool needs3 = sc == Schema::S3 || sc == Schema::S4;
  if (needs3 && !f3) throw std::invalid_argument("schema needs a ternary operation");
  if (f3 && K >= 3) fs.push_back(*f3);
  while (static_cast<int>(fs.size()) < K) {
    const OpTable& fk = fs.back();
    const OpTable* t = f3 ? &*f3 : nullptr;
    fs.push_back(OpTable::from_function(n, fk.arity() + 1, [&](const Tuple& x) {
      return detail::schema_step(sc, f2, t, fk, x);
    }));
  }
  fs.resize(static_cast<std::size_t>(std::max(K, 0)));
  return fs;
}

/**
 * Height-1 ladder from a binary t2 acting like a height-1 semilattice and
 * symmetric ops fs[j-1] of arity j:
 * g_2(x, y) = f_2(t2(x, y), t2(y, x)),  g_k = f_k(c_{g_{k-1}}^2(x)).
 */
inline std::vector<OpTable> height1_ladder(const OpTable& t2, const std::vector<OpTable>& fs) {
  const int n = t2.domain_size();
  std::vector<OpTable> gs{OpTable::projection(n, 1, 0)};
  if (fs.size() < 2) return gs;
  gs.push_back(binary_from_function(n, [&](int x, int y) {
    const Elem a = static_cast<Elem>(x), b = static_cast<Elem>(y);
    return fs[1]({t2({a, b}), t2({b, a})});
  }));
  for (std::size_t k = 3; k <= fs.size(); ++k) {
    const OpTable& prev = gs.back();
    gs.push_back(OpTable::from_function(n, static_cast<int>(k), [&](const Tuple& x) {
      return fs[k - 1](leave_one_out_power(prev, x, 2));
    }));
  }
  return gs;
}

struct LinearLadder {
  std::vector<Elem> subset;   // D', listed so that subset[i] plays the residue i
  Elem c = 0;                 // f_p(D')
  std::vector<OpTable> g;     // g[j-1] has arity j
};

/**
 * Ladder for f2 acting as (x+y)/2 on a subset of odd prime size p, given a
 * symmetric p-ary fp. On the subset, g_k(x) is x when x is constant and c
 * otherwise. The ops a*x - (a-1)*y come from f2 alone: f2-composites realize
 * (a/2^b) x + (1 - a/2^b) y, and 2^{p-1} = 1 mod p.
 */
inline LinearLadder linear_ladder(const OpTable& f2, const std::vector<Elem>& sub, const OpTable& fp, int K) {
  const int n = f2.domain_size();
  const int p = static_cast<int>(sub.size());
  if (fp.arity() != p) throw std::invalid_argument("fp must have arity |D'|");
  auto sigma = detect_linear(f2, sub);
  if (!sigma) throw std::invalid_argument("f2 does not act linearly on the subset");
  LinearLadder out;
  out.subset.resize(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) out.subset[static_cast<std::size_t>((*sigma)[i])] = sub[i];

  const int b = p - 1;
  const OpTable px = OpTable::projection(n, 2, 0), py = OpTable::projection(n, 2, 1);
  // h(a, b): coefficient a / 2^b on x
  std::map<std::pair<int, int>, OpTable> memo;
  auto h = [&](auto&& self, int a, int e) -> OpTable {
    if (e == 0) return a ? px : py;
    auto key = std::make_pair(a, e);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const int half = 1 << (e - 1);
    const int a1 = std::min(a, half), a2 = a - a1;
    OpTable r = compose(f2, {self(self, a1, e - 1), self(self, a2, e - 1)});
    memo.emplace(key, r);
    return r;
  };
  std::vector<OpTable> inners;
  for (int a = 1; a <= p; ++a) inners.push_back(h(h, a % p, b));

  out.c = fp(out.subset);
  out.g.push_back(OpTable::projection(n, 1, 0));
  if (K >= 2) out.g.push_back(compose(fp, inners));
  for (int k = 2; k < K; ++k) {
    const OpTable& gk = out.g.back();
    const OpTable& g2 = out.g[1];
    out.g.push_back(OpTable::from_function(n, k + 1, [&](const Tuple& x) {
      Tuple head(x.begin(), x.begin() + k), mixed(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) mixed[static_cast<std::size_t>(i)] = f2({x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(k)]});
      return g2({gk(head), gk(mixed)});
    }));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalogue

struct CatalogueEntry {
  std::string label;          // e.g. "<f_003012, g_{0,0}>"
  int n = 0;
  OpTable f2;
  std::optional<OpTable> f3;
  std::string f3_label;
  std::vector<std::string> cycle;  // members of the theta/Theta cycle, if any
  Schema schema = Schema::S0;       // schema that verified
  Schema stated_schema = Schema::S0;
  int verified_arity = 0;
};

inline bool verify_entry(CatalogueEntry& e, int K) {
  auto try_schema = [&](Schema s) {
    auto fs = schema_ladder(s, e.f2, e.f3, K);
    for (const auto& f : fs)
      if (!is_symmetric(f)) return false;
    return true;
  };
  e.schema = e.stated_schema;
  if (try_schema(e.schema)) {
    e.verified_arity = K;
    return true;
  }
  if (e.f3 && e.schema == Schema::S3 && try_schema(Schema::S4)) {
    e.schema = Schema::S4;
    e.verified_arity = K;
    return true;
  }
  e.verified_arity = 0;
  return false;
}

inline OpTable build_witness(const CatalogueEntry& e, int k) {
  auto fs = schema_ladder(e.schema, e.f2, e.f3, k);
  const OpTable& f = fs.back();
  if (!is_symmetric(f)) throw std::logic_error("schema " + std::string(to_string(e.schema)) + " gave a non-symmetric op");
  return f;
}

// The ternary op forced next to f_{+-0}: f_{+-0} on two-element sets, c on all of D.
inline OpTable sign_rotation_ternary(Elem c) {
  const OpTable f = binary_from_name("f_+-0", 3);
  return OpTable::from_function(3, 3, [&](const Tuple& x) {
    const Elem lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
    const bool all = x[0] != x[1] && x[1] != x[2] && x[0] != x[2];
    return all ? c : f({lo, hi});
  });
}

inline std::vector<CatalogueEntry> catalogue_domain_le3(int K = 7) {
  std::vector<CatalogueEntry> out;
  auto add = [&](std::string label, OpTable f2, Schema s, std::optional<OpTable> f3 = std::nullopt,
                 std::string f3_label = "") {
    CatalogueEntry e;
    e.label = std::move(label);
    e.n = f2.domain_size();
    e.f2 = std::move(f2);
    e.f3 = std::move(f3);
    e.f3_label = std::move(f3_label);
    e.stated_schema = s;
    verify_entry(e, K);
    out.push_back(std::move(e));
  };
  add("<pi>", OpTable(1, 2, {0}), Schema::S0);
  add("<xy>", binary_from_name("f_0", 2), Schema::S0);
  add("<f_000>", binary_from_name("f_000", 3), Schema::S0);
  add("<f_++0>", binary_from_name("f_++0", 3), Schema::S0);
  add("<f_+0->", binary_from_name("f_+0-", 3), Schema::S1);
  add("<f_+-0, f_3>", binary_from_name("f_+-0", 3), Schema::S3, sign_rotation_ternary(1), "f_3 (c=0)");
  return out;
}

inline const std::vector<std::string>& domain4_semilattices() {
  static const std::vector<std::string> v{"f_000000", "f_000002", "f_000012", "f_000111", "f_000112"};
  return v;
}
inline const std::vector<std::string>& domain4_sgn_style() {
  static const std::vector<std::string> v{"f_000013", "f_000033", "f_000123", "f_001031",
                                          "f_001133", "f_001231", "f_001233", "f_011231"};
  return v;
}
inline const std::vector<std::string>& domain4_stabilized() {
  static const std::vector<std::string> v{"f_001032", "f_001033", "f_001232"};
  return v;
}

// One entry per theta/Theta cycle of each ternary family.
inline std::vector<CatalogueEntry> catalogue_domain4(int K = 7) {
  std::vector<CatalogueEntry> out;
  auto plain = [&](const std::vector<std::string>& names, Schema s) {
    for (const auto& nm : names) {
      CatalogueEntry e;
      e.label = "<" + nm + ">";
      e.n = 4;
      e.f2 = binary_from_name(nm, 4);
      e.stated_schema = s;
      verify_entry(e, K);
      out.push_back(std::move(e));
    }
  };
  plain(domain4_semilattices(), Schema::S0);
  plain(domain4_sgn_style(), Schema::S1);
  plain(domain4_stabilized(), Schema::S2);
  for (const auto& fam : ternary_families()) {
    auto fm = family_map(fam);
    for (const auto& cyc : fm.cycles) {
      CatalogueEntry e;
      const auto& p = fm.params[cyc.front()];
      e.f3_label = member_label(p);
      e.label = "<" + fam.base + ", " + e.f3_label + ">";
      e.n = 4;
      e.f2 = binary_from_name(fam.base, 4);
      e.f3 = family_member(fam.base, p);
      for (auto i : cyc) e.cycle.push_back(member_label(fm.params[i]));
      e.stated_schema = parse_schema(fam.stated_schema);
      verify_entry(e, K);
      out.push_back(std::move(e));
    }
  }
  return out;
}

inline Algebra entry_algebra(const CatalogueEntry& e) {
  Algebra a{e.n, {e.f2}};
  if (e.f3) a.ops.push_back(*e.f3);
  return a;
}

// ---------------------------------------------------------------------------
// Separating relations

struct Separator {
  Relation rel;
  bool preserved_by_first = true;  // preserved by the first clone, violated by the second
  int op = 0;                      // violating basic op of the other clone
};

namespace detail {

// A relation of arity <= max_arity invariant under A and violated by g:
// rows r_1..r_m of a matrix of g-arguments; R = Sg_A(columns), violated iff
// g(columns) is not in R. Constant rows never help for idempotent A.
inline std::optional<Relation> violated_invariant(const Algebra& A, const OpTable& g, int max_arity) {
  const int n = A.n, k = g.arity();
  std::vector<Tuple> rows;
  for_each_tuple(n, k, [&](const Tuple& r) {
    if (!is_constant(r)) rows.push_back(r);
  });
  for (int m = 1; m <= max_arity; ++m) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(m));
    std::iota(pick.begin(), pick.end(), 0);
    if (rows.size() < pick.size()) break;
    for (;;) {
      std::vector<Tuple> cols(static_cast<std::size_t>(k), Tuple(static_cast<std::size_t>(m)));
      Tuple target(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const Tuple& r = rows[pick[static_cast<std::size_t>(i)]];
        for (int j = 0; j < k; ++j) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(j)];
        target[static_cast<std::size_t>(i)] = g(r);
      }
      SubpowerClosure cl(A, m, {});
      for (const auto& c : cols) cl.add_generator(c);
      auto st = cl.run([&](std::uint32_t i) { return cl.element(i) == target; });
      if (st == ClosureStatus::Complete) return Relation(n, m, cl.elements());
      // next combination
      int i = m - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == rows.size() - static_cast<std::size_t>(m - i)) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < m; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<Separator> find_separator(const Algebra& A, const Algebra& B, int max_arity = 3) {
  for (int dir = 0; dir < 2; ++dir) {
    const Algebra& keep = dir ? B : A;
    const Algebra& other = dir ? A : B;
    for (std::size_t g = 0; g < other.ops.size(); ++g) {
      if (std::find(keep.ops.begin(), keep.ops.end(), other.ops[g]) != keep.ops.end()) continue;
      if (auto r = detail::violated_invariant(keep, other.ops[g], max_arity))
        return Separator{std::move(*r), dir == 0, static_cast<int>(g)};
    }
  }
  return std::nullopt;
}

}  // namespace cloneforge
