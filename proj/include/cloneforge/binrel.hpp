#pragma once
// Binary relations as n*n bitsets: composition, reverse, B + R, B - R,
// linking congruence, and the composition monoid of a set of relations.

#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relation.hpp"

namespace cloneforge {

using ElemSet = std::uint32_t;  // bitmask over the domain

inline ElemSet full_set(int n) { return n >= 32 ? ~ElemSet{0} : (ElemSet{1} << n) - 1; }

inline std::vector<Elem> set_elems(ElemSet s) {
  std::vector<Elem> out;
  for (int i = 0; s >> i; ++i)
    if ((s >> i) & 1u) out.push_back(static_cast<Elem>(i));
  return out;
}

inline ElemSet set_of(const std::vector<Elem>& xs) {
  ElemSet s = 0;
  for (Elem e : xs) s |= ElemSet{1} << e;
  return s;
}

class BinRel {
 public:
  BinRel() = default;
  explicit BinRel(int n, std::uint64_t bits = 0) : n_(n), bits_(bits) {
    if (n < 1 || n > 8) throw std::invalid_argument("BinRel supports 1 <= n <= 8");
  }

  static BinRel from_pairs(int n, const std::vector<std::pair<int, int>>& ps) {
    BinRel r(n);
    for (auto [x, y] : ps) r.add(x, y);
    return r;
  }
  static BinRel from_relation(const Relation& rel) {
    if (rel.arity() != 2) throw std::invalid_argument("not a binary relation");
    BinRel r(rel.domain_size());
    for (const auto& t : rel.tuples()) r.add(t[0], t[1]);
    return r;
  }
  template <class Pred>
  static BinRel from_predicate(int n, Pred&& keep) {
    BinRel r(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (keep(x, y)) r.add(x, y);
    return r;
  }
  static BinRel identity(int n, ElemSet on) {
    BinRel r(n);
    for (Elem e : set_elems(on)) r.add(e, e);
    return r;
  }
  static BinRel identity(int n) { return identity(n, full_set(n)); }
  static BinRel full(int n) { return BinRel(n, n == 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (n * n)) - 1); }

  int n() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool has(int x, int y) const { return (bits_ >> (x * n_ + y)) & 1u; }
  void add(int x, int y) {
    if (x < 0 || y < 0 || x >= n_ || y >= n_) throw std::out_of_range("edge outside the domain");
    bits_ |= std::uint64_t{1} << (x * n_ + y);
  }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool empty() const { return bits_ == 0; }

  ElemSet successors(int x) const { return static_cast<ElemSet>((bits_ >> (x * n_)) & full_set(n_)); }
  ElemSet predecessors(int y) const {
    ElemSet s = 0;
    for (int x = 0; x < n_; ++x)
      if (has(x, y)) s |= ElemSet{1} << x;
    return s;
  }
  ElemSet domain() const {
    ElemSet s = 0;
    for (int x = 0; x < n_; ++x)
      if (successors(x)) s |= ElemSet{1} << x;
    return s;
  }
  ElemSet range() const {
    ElemSet s = 0;
    for (int x = 0; x < n_; ++x) s |= successors(x);
    return s;
  }
  bool subdirect() const { return domain() == full_set(n_) && range() == full_set(n_); }
  bool subset_of(const BinRel& o) const { return (bits_ & ~o.bits_) == 0; }

  Relation to_relation() const {
    std::vector<Tuple> ts;
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y)
        if (has(x, y)) ts.push_back({static_cast<Elem>(x), static_cast<Elem>(y)});
    return Relation(n_, 2, std::move(ts));
  }

  friend bool operator==(const BinRel&, const BinRel&) = default;
  friend auto operator<=>(const BinRel&, const BinRel&) = default;

 private:
  int n_ = 1;
  std::uint64_t bits_ = 0;
};

inline void check_same_domain(const BinRel& a, const BinRel& b) {
  if (a.n() != b.n()) throw std::invalid_argument("relations over different domains");
}

// R o S = {(x, z) | exists y: (x, y) in R, (y, z) in S}
inline BinRel compose(const BinRel& r, const BinRel& s) {
  check_same_domain(r, s);
  BinRel out(r.n());
  for (int x = 0; x < r.n(); ++x) {
    ElemSet z = 0;
    for (Elem y : set_elems(r.successors(x))) z |= s.successors(y);
    for (Elem e : set_elems(z)) out.add(x, e);
  }
  return out;
}

inline BinRel reverse(const BinRel& r) {
  BinRel out(r.n());
  for (int x = 0; x < r.n(); ++x)
    for (int y = 0; y < r.n(); ++y)
      if (r.has(x, y)) out.add(y, x);
  return out;
}

inline BinRel power(const BinRel& r, int k) {
  if (k < 1) throw std::invalid_argument("power needs k >= 1");
  BinRel out = r;
  for (int i = 1; i < k; ++i) out = compose(out, r);
  return out;
}

// B + R = {y | exists x in B: (x, y) in R}
inline ElemSet plus(ElemSet b, const BinRel& r) {
  ElemSet out = 0;
  for (Elem x : set_elems(b)) out |= r.successors(x);
  return out;
}

// B - R = B + R^-
inline ElemSet minus(ElemSet b, const BinRel& r) {
  ElemSet out = 0;
  for (int x = 0; x < r.n(); ++x)
    if (r.successors(x) & b) out |= ElemSet{1} << x;
  return out;
}

// Binary projection onto coordinates i, j (0-based, i == j allowed).
inline BinRel project2(const Relation& rel, int i, int j) {
  BinRel out(rel.domain_size());
  for (const auto& t : rel.tuples()) out.add(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
  return out;
}

using Partition = std::vector<std::vector<Elem>>;

inline Partition classes_of(const std::vector<int>& label) {
  std::map<int, std::vector<Elem>> m;
  for (std::size_t i = 0; i < label.size(); ++i) m[label[i]].push_back(static_cast<Elem>(i));
  Partition out;
  for (auto& [k, v] : m) out.push_back(std::move(v));
  std::sort(out.begin(), out.end());
  return out;
}

/** Union over k of (R o R^-)^k (coord 0), or with R and R^- swapped (coord 1). */
inline Partition linking_congruence(const BinRel& r, int coord = 0) {
  if (!r.subdirect()) throw std::invalid_argument("linking congruence needs a subdirect relation");
  const BinRel step = coord == 0 ? compose(r, reverse(r)) : compose(reverse(r), r);
  BinRel acc = step;
  for (;;) {
    BinRel next = compose(acc, step);
    next = BinRel(r.n(), next.bits() | acc.bits());
    if (next == acc) break;
    acc = next;
  }
  std::vector<int> label(static_cast<std::size_t>(r.n()));
  for (int x = 0; x < r.n(); ++x) label[static_cast<std::size_t>(x)] = std::countr_zero(acc.successors(x));
  return classes_of(label);
}

/**
 * x ~ y when an undirected path joins them with as many forward as backward
 * edges: same weak component, and levels equal modulo the gcd of the
 * algebraic lengths of closed walks there.
 */
inline Partition balanced_path_congruence(const BinRel& r) {
  const int n = r.n();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<long> level(static_cast<std::size_t>(n), 0);
  std::vector<long> g;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int c = static_cast<int>(g.size());
    g.push_back(0);
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        for (int dir : {1, -1}) {
          if (!(dir == 1 ? r.has(u, v) : r.has(v, u))) continue;
          const long want = level[static_cast<std::size_t>(u)] + dir;
          if (comp[static_cast<std::size_t>(v)] < 0) {
            comp[static_cast<std::size_t>(v)] = c;
            level[static_cast<std::size_t>(v)] = want;
            stack.push_back(v);
          } else {
            g[static_cast<std::size_t>(c)] = std::gcd(g[static_cast<std::size_t>(c)], std::labs(want - level[static_cast<std::size_t>(v)]));
          }
        }
      }
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  std::map<std::pair<int, long>, int> ids;
  for (int x = 0; x < n; ++x) {
    const long gc = g[static_cast<std::size_t>(comp[static_cast<std::size_t>(x)])];
    long l = level[static_cast<std::size_t>(x)];
    if (gc) l = ((l % gc) + gc) % gc;
    auto key = std::make_pair(comp[static_cast<std::size_t>(x)], l);
    auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
    label[static_cast<std::size_t>(x)] = it->second;
  }
  return classes_of(label);
}

// ---------------------------------------------------------------------------
// Composition monoid

/** All nonempty compositions of the generators, each with a shortest word. */
class RelMonoid {
 public:
  explicit RelMonoid(std::vector<BinRel> gens) : gens_(std::move(gens)) {
    for (std::size_t g = 0; g < gens_.size(); ++g) insert(gens_[g], {static_cast<int>(g)});
    for (std::size_t i = 0; i < elems_.size(); ++i)
      for (std::size_t g = 0; g < gens_.size(); ++g) {
        auto w = words_[i];
        w.push_back(static_cast<int>(g));
        insert(compose(elems_[i], gens_[g]), std::move(w));
      }
  }

  const std::vector<BinRel>& generators() const { return gens_; }
  const std::vector<BinRel>& elements() const { return elems_; }
  const std::vector<int>& word(std::size_t i) const { return words_[i]; }
  std::size_t size() const { return elems_.size(); }
  bool contains(const BinRel& r) const { return index_.count(r.bits()) > 0; }

 private:
  void insert(BinRel r, std::vector<int> w) {
    if (index_.emplace(r.bits(), elems_.size()).second) {
      elems_.push_back(r);
      words_.push_back(std::move(w));
    }
  }

  std::vector<BinRel> gens_;
  std::vector<BinRel> elems_;
  std::vector<std::vector<int>> words_;
  std::map<std::uint64_t, std::size_t> index_;
};

}  // namespace cloneforge
