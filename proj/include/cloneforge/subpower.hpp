#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "op_table.hpp"
#include "relation.hpp"
#include "term.hpp"

namespace cloneforge {

inline constexpr std::size_t kDefaultBudget = 20'000'000;

struct ClosureLimits {
  std::size_t max_tuples = kDefaultBudget;
  std::uint64_t max_work = 0;  // op applications; 0 means unlimited
};

enum class ClosureStatus { Complete, Truncated, Stopped };

/**
 * Semi-naive closure of a tuple set in A^m under the basic operations,
 * applied coordinatewise. Element i is "processed" by applying every op to
 * argument lists whose largest index is i, so each argument list is tried
 * once. Symmetric ops only see nondecreasing argument lists.
 */
class SubpowerClosure {
 public:
  struct Origin {
    int op = -1;  // -1: generator
    int generator = -1;
    std::vector<std::uint32_t> args;
  };

  SubpowerClosure(const Algebra& alg, int m, ClosureLimits limits = {}, bool record = false)
      : alg_(alg), m_(m), limits_(limits), record_(record) {
    for (const auto& f : alg.ops) symmetric_.push_back(is_symmetric(f));
  }

  // Returns the index of the tuple (existing or new).
  std::uint32_t add_generator(const Tuple& t) {
    if (static_cast<int>(t.size()) != m_) throw std::invalid_argument("generator arity mismatch");
    auto [idx, fresh] = insert(t);
    if (fresh && record_) origins_.back().generator = generator_count_;
    ++generator_count_;
    return idx;
  }

  // stop(i) is called for each new tuple index; returning true ends the run.
  ClosureStatus run(const std::function<bool(std::uint32_t)>& stop = {}) {
    if (stop)
      for (; checked_ < elems_.size(); ++checked_)
        if (stop(static_cast<std::uint32_t>(checked_))) return ClosureStatus::Stopped;
    checked_ = elems_.size();
    while (next_ < elems_.size()) {
      const std::size_t i = next_++;
      for (std::size_t g = 0; g < alg_.ops.size(); ++g) {
        auto st = expand(i, static_cast<int>(g), stop);
        if (st) return *st;
      }
    }
    return ClosureStatus::Complete;
  }

  std::size_t size() const { return elems_.size(); }
  const Tuple& element(std::size_t i) const { return elems_[i]; }
  const std::vector<Tuple>& elements() const { return elems_; }
  const Origin& origin(std::size_t i) const { return origins_.at(i); }
  std::uint64_t work() const { return work_; }
  int power() const { return m_; }

  std::optional<std::uint32_t> find(const Tuple& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Term for element i in the generator variables (needs record=true).
  Term term_of(std::uint32_t i) {
    if (!record_) throw std::logic_error("closure was not recording origins");
    if (auto it = terms_.find(i); it != terms_.end()) return it->second;
    std::vector<std::uint32_t> stack{i};
    while (!stack.empty()) {
      std::uint32_t u = stack.back();
      if (terms_.count(u)) {
        stack.pop_back();
        continue;
      }
      const Origin& o = origins_[u];
      if (o.op < 0) {
        terms_.emplace(u, Term::var(o.generator));
        stack.pop_back();
        continue;
      }
      bool ready = true;
      for (auto a : o.args)
        if (!terms_.count(a)) {
          stack.push_back(a);
          ready = false;
        }
      if (!ready) continue;
      std::vector<Term> args;
      for (auto a : o.args) args.push_back(terms_.at(a));
      terms_.emplace(u, Term::basic(o.op, std::move(args)));
      stack.pop_back();
    }
    return terms_.at(i);
  }

 private:
  std::pair<std::uint32_t, bool> insert(const Tuple& t) {
    auto [it, fresh] = index_.emplace(t, static_cast<std::uint32_t>(elems_.size()));
    if (fresh) {
      elems_.push_back(t);
      if (record_) origins_.emplace_back();
    }
    return {it->second, fresh};
  }

  std::optional<ClosureStatus> expand(std::size_t i, int g, const std::function<bool(std::uint32_t)>& stop) {
    const OpTable& f = alg_.ops[static_cast<std::size_t>(g)];
    const int r = f.arity();
    const std::size_t n = static_cast<std::size_t>(alg_.n);
    std::vector<std::uint32_t> pick(static_cast<std::size_t>(r));
    Tuple out(static_cast<std::size_t>(m_));

    auto emit = [&]() -> std::optional<ClosureStatus> {
      ++work_;
      for (int c = 0; c < m_; ++c) {
        std::size_t idx = 0;
        for (int a = 0; a < r; ++a) idx = idx * n + elems_[pick[static_cast<std::size_t>(a)]][static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(c)] = f.at(idx);
      }
      auto [idx, fresh] = insert(out);
      if (fresh) {
        if (record_) {
          origins_.back().op = g;
          origins_.back().args = pick;
        }
        if (stop && stop(idx)) return ClosureStatus::Stopped;
        checked_ = elems_.size();
        if (elems_.size() > limits_.max_tuples) return ClosureStatus::Truncated;
      }
      if (limits_.max_work && work_ > limits_.max_work) return ClosureStatus::Truncated;
      return std::nullopt;
    };

    if (r == 1) {
      pick[0] = static_cast<std::uint32_t>(i);
      return emit();
    }
    if (symmetric_[static_cast<std::size_t>(g)]) {
      // last slot = i, the rest nondecreasing in [0, i]
      pick[static_cast<std::size_t>(r - 1)] = static_cast<std::uint32_t>(i);
      std::fill(pick.begin(), pick.end() - 1, 0u);
      for (;;) {
        if (auto st = emit()) return st;
        int a = r - 2;
        while (a >= 0 && pick[static_cast<std::size_t>(a)] == i) --a;
        if (a < 0) break;
        const std::uint32_t v = pick[static_cast<std::size_t>(a)] + 1;
        for (int b = a; b <= r - 2; ++b) pick[static_cast<std::size_t>(b)] = v;
      }
      return std::nullopt;
    }
    // slot p holds the first occurrence of i: earlier slots in [0, i), later in [0, i]
    for (int p = 0; p < r; ++p) {
      if (p > 0 && i == 0) break;
      std::fill(pick.begin(), pick.end(), 0u);
      pick[static_cast<std::size_t>(p)] = static_cast<std::uint32_t>(i);
      for (;;) {
        if (auto st = emit()) return st;
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
    return std::nullopt;
  }

  const Algebra& alg_;
  int m_;
  ClosureLimits limits_;
  bool record_;
  std::vector<bool> symmetric_;
  std::vector<Tuple> elems_;
  std::unordered_map<Tuple, std::uint32_t, TupleHash> index_;
  std::vector<Origin> origins_;
  std::unordered_map<std::uint32_t, Term> terms_;
  std::size_t next_ = 0;
  std::size_t checked_ = 0;
  int generator_count_ = 0;
  std::uint64_t work_ = 0;
};

struct GeneratedSubpower {
  int power = 0;
  std::vector<Tuple> generators;
  Relation closure;
  ClosureStatus status = ClosureStatus::Complete;
  bool complete() const { return status == ClosureStatus::Complete; }
};

inline GeneratedSubpower sg_power(const Algebra& alg, int m, const std::vector<Tuple>& generators,
                                  ClosureLimits limits = {}) {
  SubpowerClosure cl(alg, m, limits);
  for (const auto& g : generators) cl.add_generator(g);
  GeneratedSubpower out;
  out.power = m;
  out.generators = generators;
  out.status = cl.run();
  out.closure = Relation(alg.n, m, cl.elements());
  return out;
}

inline bool is_constant(const Tuple& t) {
  for (Elem e : t)
    if (e != t[0]) return false;
  return true;
}

}  // namespace cloneforge
