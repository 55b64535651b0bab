#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "op_table.hpp"

namespace cloneforge {

/** A set of m-tuples over {0..n-1}, kept sorted and deduplicated. */
class Relation {
 public:
  Relation() = default;
  Relation(int n, int arity, std::vector<Tuple> tuples) : n_(n), arity_(arity), tuples_(std::move(tuples)) {
    check_domain(n);
    if (arity < 1) throw std::invalid_argument("relation arity must be positive");
    for (const auto& t : tuples_) {
      if (static_cast<int>(t.size()) != arity) throw std::invalid_argument("tuple arity mismatch");
      for (Elem e : t)
        if (e >= n) throw std::invalid_argument("tuple entry out of range");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  }

  template <class Pred>
  static Relation from_predicate(int n, int arity, Pred&& keep) {
    std::vector<Tuple> ts;
    for_each_tuple(n, arity, [&](const Tuple& x) {
      if (keep(x)) ts.push_back(x);
    });
    return Relation(n, arity, std::move(ts));
  }

  static Relation full(int n, int arity) {
    return from_predicate(n, arity, [](const Tuple&) { return true; });
  }

  int domain_size() const { return n_; }
  int arity() const { return arity_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  bool contains(const Tuple& t) const { return std::binary_search(tuples_.begin(), tuples_.end(), t); }

  // Projection onto the listed coordinates (0-based, repeats allowed).
  Relation project(const std::vector<int>& coords) const {
    std::vector<Tuple> out;
    out.reserve(tuples_.size());
    for (const auto& t : tuples_) {
      Tuple p;
      p.reserve(coords.size());
      for (int c : coords) p.push_back(t[static_cast<std::size_t>(c)]);
      out.push_back(std::move(p));
    }
    return Relation(n_, static_cast<int>(coords.size()), std::move(out));
  }

  std::vector<Elem> values_at(int coord) const {
    std::set<Elem> s;
    for (const auto& t : tuples_) s.insert(t[static_cast<std::size_t>(coord)]);
    return {s.begin(), s.end()};
  }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  int n_ = 1;
  int arity_ = 1;
  std::vector<Tuple> tuples_;
};

inline std::optional<Elem> has_constant_tuple(const Relation& rel) {
  Tuple c(static_cast<std::size_t>(rel.arity()));
  for (int a = 0; a < rel.domain_size(); ++a) {
    std::fill(c.begin(), c.end(), static_cast<Elem>(a));
    if (rel.contains(c)) return static_cast<Elem>(a);
  }
  return std::nullopt;
}

// Does op map every choice of arity-many tuples of rel back into rel?
// Returns the offending argument list when it does not.
inline std::optional<std::vector<Tuple>> violation(const OpTable& op, const Relation& rel) {
  const auto& ts = rel.tuples();
  if (ts.empty()) return std::nullopt;
  const int k = op.arity();
  std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
  std::vector<Tuple> args(static_cast<std::size_t>(k));
  for (;;) {
    for (int i = 0; i < k; ++i) args[static_cast<std::size_t>(i)] = ts[pick[static_cast<std::size_t>(i)]];
    if (!rel.contains(apply_pointwise(op, args))) return args;
    int i = k - 1;
    while (i >= 0 && ++pick[static_cast<std::size_t>(i)] == ts.size()) pick[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return std::nullopt;
}

inline bool preserves(const OpTable& op, const Relation& rel) { return !violation(op, rel).has_value(); }

}  // namespace cloneforge
