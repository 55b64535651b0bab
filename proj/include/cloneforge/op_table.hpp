#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cloneforge {

using Elem = std::uint8_t;
using Tuple = std::vector<Elem>;
using Perm = std::vector<Elem>;

inline constexpr int kMaxDomain = 8;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Elem e : t) {
      h ^= e;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline void check_domain(int n) {
  if (n < 1 || n > kMaxDomain)
    throw std::invalid_argument("domain size must be in 1.." + std::to_string(kMaxDomain));
}

// Odometer over D^k in row-major order; fn receives the current tuple.
template <class Fn>
void for_each_tuple(int n, int k, Fn&& fn) {
  Tuple x(static_cast<std::size_t>(k), 0);
  const std::size_t total = ipow(static_cast<std::size_t>(n), k);
  for (std::size_t idx = 0; idx < total; ++idx) {
    fn(static_cast<const Tuple&>(x));
    for (int i = k - 1; i >= 0; --i) {
      if (++x[static_cast<std::size_t>(i)] < n) break;
      x[static_cast<std::size_t>(i)] = 0;
    }
  }
}

/**
 * A k-ary operation on {0..n-1}, stored as a flat row-major table:
 * f(x_1..x_k) lives at index sum x_i * n^(k-1-i).
 */
class OpTable {
 public:
  OpTable() = default;

  OpTable(int n, int arity, std::vector<Elem> table) : n_(n), arity_(arity), table_(std::move(table)) {
    check_domain(n);
    if (arity < 1) throw std::invalid_argument("arity must be positive");
    if (table_.size() != ipow(static_cast<std::size_t>(n), arity))
      throw std::invalid_argument("table length must be n^arity");
    for (Elem e : table_)
      if (e >= n) throw std::invalid_argument("table entry out of range");
  }

  template <class Fn>
  static OpTable from_function(int n, int arity, Fn&& fn) {
    check_domain(n);
    std::vector<Elem> t;
    t.reserve(ipow(static_cast<std::size_t>(n), arity));
    for_each_tuple(n, arity, [&](const Tuple& x) { t.push_back(static_cast<Elem>(fn(x))); });
    return OpTable(n, arity, std::move(t));
  }

  // 0-based coordinate index.
  static OpTable projection(int n, int arity, int index) {
    if (index < 0 || index >= arity) throw std::invalid_argument("projection index out of range");
    return from_function(n, arity, [&](const Tuple& x) { return x[static_cast<std::size_t>(index)]; });
  }

  int domain_size() const { return n_; }
  int arity() const { return arity_; }
  const std::vector<Elem>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }

  std::size_t index_of(std::span<const Elem> args) const {
    std::size_t idx = 0;
    for (Elem a : args) idx = idx * static_cast<std::size_t>(n_) + a;
    return idx;
  }

  Tuple decode(std::size_t idx) const {
    Tuple x(static_cast<std::size_t>(arity_));
    for (int i = arity_ - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = static_cast<Elem>(idx % static_cast<std::size_t>(n_));
      idx /= static_cast<std::size_t>(n_);
    }
    return x;
  }

  // Unchecked lookup.
  Elem operator()(std::span<const Elem> args) const { return table_[index_of(args)]; }
  Elem operator()(std::initializer_list<Elem> args) const {
    return (*this)(std::span<const Elem>(args.begin(), args.size()));
  }
  Elem at(std::size_t idx) const { return table_[idx]; }

  friend bool operator==(const OpTable&, const OpTable&) = default;
  friend auto operator<=>(const OpTable& a, const OpTable& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    if (auto c = a.arity_ <=> b.arity_; c != 0) return c;
    return a.table_ <=> b.table_;
  }

 private:
  int n_ = 1;
  int arity_ = 1;
  std::vector<Elem> table_{0};
};

inline Elem apply(const OpTable& op, std::span<const Elem> args) {
  if (static_cast<int>(args.size()) != op.arity()) throw std::invalid_argument("arity mismatch");
  for (Elem a : args)
    if (a >= op.domain_size()) throw std::invalid_argument("element out of range");
  return op(args);
}

inline Tuple apply_pointwise(const OpTable& op, const std::vector<Tuple>& args) {
  if (static_cast<int>(args.size()) != op.arity()) throw std::invalid_argument("arity mismatch");
  const std::size_t m = args.empty() ? 0 : args[0].size();
  for (const auto& t : args)
    if (t.size() != m) throw std::invalid_argument("tuple length mismatch");
  Tuple out(m), col(args.size());
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < args.size(); ++i) col[i] = args[i][c];
    out[c] = cloneforge::apply(op, col);
  }
  return out;
}

// h(x) = outer(inner_1(x), ..., inner_m(x)).
inline OpTable compose(const OpTable& outer, const std::vector<OpTable>& inners) {
  if (static_cast<int>(inners.size()) != outer.arity()) throw std::invalid_argument("arity mismatch");
  const int n = outer.domain_size();
  const int k = inners[0].arity();
  for (const auto& g : inners)
    if (g.arity() != k || g.domain_size() != n) throw std::invalid_argument("inner mismatch");
  std::vector<Elem> t(inners[0].size());
  Tuple col(inners.size());
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    for (std::size_t i = 0; i < inners.size(); ++i) col[i] = inners[i].at(idx);
    t[idx] = outer(col);
  }
  return OpTable(n, k, std::move(t));
}

inline bool is_idempotent(const OpTable& op) {
  Tuple x(static_cast<std::size_t>(op.arity()));
  for (int a = 0; a < op.domain_size(); ++a) {
    std::fill(x.begin(), x.end(), static_cast<Elem>(a));
    if (op(x) != a) return false;
  }
  return true;
}

// Invariance under (1 2) and the long cycle, which generate S_k.
inline bool is_symmetric(const OpTable& op) {
  const int k = op.arity();
  if (k == 1) return true;
  Tuple y(static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < op.size(); ++idx) {
    Tuple x = op.decode(idx);
    y = x;
    std::swap(y[0], y[1]);
    if (op(y) != op.at(idx)) return false;
    std::rotate(y.begin(), y.begin() + 1, y.end());
    std::rotate(x.begin(), x.begin() + 1, x.end());
    if (op(x) != op.at(idx)) return false;
  }
  return true;
}

inline bool is_permutation_of_domain(const Perm& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Elem e : p) {
    if (e >= n || seen[e]) return false;
    seen[e] = true;
  }
  return true;
}

inline Perm inverse(const Perm& p) {
  Perm q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<Elem>(i);
  return q;
}

// (tau o sigma)(x) = tau(sigma(x))
inline Perm compose_perm(const Perm& tau, const Perm& sigma) {
  Perm r(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) r[i] = tau[sigma[i]];
  return r;
}

inline Perm identity_perm(int n) {
  Perm p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Elem{0});
  return p;
}

// x -> perm(f(perm^-1 x_1, ..., perm^-1 x_k))
inline OpTable rename(const OpTable& op, const Perm& perm) {
  if (!is_permutation_of_domain(perm, op.domain_size())) throw std::invalid_argument("invalid permutation");
  const Perm inv = inverse(perm);
  Tuple y(static_cast<std::size_t>(op.arity()));
  return OpTable::from_function(op.domain_size(), op.arity(), [&](const Tuple& x) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = inv[x[i]];
    return perm[op(y)];
  });
}

inline std::vector<Perm> all_perms(int n) {
  std::vector<Perm> out;
  Perm p = identity_perm(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline OpTable canonical_form(const OpTable& op) {
  OpTable best = op;
  for (const Perm& p : all_perms(op.domain_size())) {
    OpTable r = rename(op, p);
    if (r.table() < best.table()) best = std::move(r);
  }
  return best;
}

// c_f(x)_i = f(x with coordinate i removed); op has arity len(x) - 1.
inline Tuple leave_one_out(const OpTable& op, std::span<const Elem> x) {
  if (static_cast<int>(x.size()) != op.arity() + 1) throw std::invalid_argument("arity mismatch");
  Tuple out(x.size()), rest(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) rest[w++] = x[j];
    out[i] = op(rest);
  }
  return out;
}

inline Tuple leave_one_out_power(const OpTable& op, Tuple x, int times) {
  for (int i = 0; i < times; ++i) x = leave_one_out(op, x);
  return x;
}

// c_f^N(x) for "sufficiently large" N: the orbit is followed until it
// repeats, and the result is the orbit point at the least N >= preperiod
// with N divisible by the period. That is exactly what any common multiple
// of all periods that also exceeds all preperiods would give.
inline Tuple leave_one_out_stable(const OpTable& op, const Tuple& x) {
  std::vector<Tuple> seq{x};
  std::unordered_map<Tuple, std::size_t, TupleHash> pos{{x, 0}};
  for (;;) {
    Tuple y = leave_one_out(op, seq.back());
    auto it = pos.find(y);
    if (it != pos.end()) {
      const std::size_t mu = it->second;
      const std::size_t lam = seq.size() - mu;
      const std::size_t N = (mu + lam - 1) / lam * lam;
      return N < seq.size() ? seq[N] : seq[mu + (N - mu) % lam];
    }
    pos.emplace(y, seq.size());
    seq.push_back(std::move(y));
  }
}

/** Finite algebra: domain {0..n-1} with a list of basic operations. */
struct Algebra {
  int n = 1;
  std::vector<OpTable> ops;

  Algebra() = default;
  Algebra(int n_, std::vector<OpTable> ops_) : n(n_), ops(std::move(ops_)) {
    check_domain(n);
    for (const auto& f : ops)
      if (f.domain_size() != n) throw std::invalid_argument("all basic ops must share the domain");
  }

  bool idempotent() const {
    return std::all_of(ops.begin(), ops.end(), [](const OpTable& f) { return is_idempotent(f); });
  }
};

// Renamings of the domain that commute with every basic operation.
inline std::vector<Perm> automorphisms(const Algebra& alg) {
  std::vector<Perm> out;
  for (const Perm& p : all_perms(alg.n)) {
    bool ok = true;
    for (const auto& f : alg.ops)
      if (rename(f, p) != f) {
        ok = false;
        break;
      }
    if (ok) out.push_back(p);
  }
  return out;
}

inline OpTable binary_from_function(int n, auto&& fn) {
  return OpTable::from_function(n, 2, [&](const Tuple& x) { return fn(x[0], x[1]); });
}

}  // namespace cloneforge
