#pragma once
// Terms that single out m argument positions and are symmetric in the rest.
// A level-m element assigns a value to every sequence of m distinct positions;
// level 1 elements constant on a tuple b give a term acting symmetrically on b.
//
// Moves: basic ops pointwise within a level; "down" aggregates the last
// position away with a symmetric op; "up" forgets one of the singled-out
// positions. All moves commute with permuting positions, so in the search
// over one tuple b a level-m element only depends on the value classes of
// the chosen positions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "op_table.hpp"
#include "subpower.hpp"
#include "term.hpp"
#include "witness.hpp"

namespace cloneforge::detail {

struct LevelStep {
  enum class Kind { Gen, Op, Down, Up } kind = Kind::Gen;
  int level = 1;
  int index = 0;  // Op: basic op; Down: aggregator; Up: forgotten position
  std::vector<std::uint32_t> args;
};

// Straight-line program over levels; steps[out] is a level-1 element.
struct LevelProgram {
  int k = 0;
  std::vector<OpTable> ops;       // basic ops of the algebra
  std::vector<OpTable> aggs;      // aggs[a] symmetric
  std::vector<Term> agg_terms;
  std::vector<LevelStep> steps;

  Tuple apply(const Tuple& x) const {
    auto vals = run<Elem>(
        [&](int p) { return x[static_cast<std::size_t>(p)]; },
        [&](int g, const std::vector<Elem>& a) { return ops[static_cast<std::size_t>(g)](a); },
        [&](int a, const std::vector<Elem>& v) { return aggs[static_cast<std::size_t>(a)](v); });
    return vals;
  }

  std::vector<Term> terms(const std::vector<Term>& x) const {
    return run<Term>(
        [&](int p) { return x[static_cast<std::size_t>(p)]; },
        [&](int g, const std::vector<Term>& a) { return Term::basic(g, a); },
        [&](int a, const std::vector<Term>& v) {
          return Term::substitute(agg_terms[static_cast<std::size_t>(a)], static_cast<int>(v.size()), v);
        });
  }

 private:
  // Sequences of m distinct positions, indexed by base-k code.
  struct Coords {
    std::vector<std::vector<int>> seqs;
    std::unordered_map<std::uint64_t, std::size_t> index;
  };

  std::uint64_t code(const std::vector<int>& s) const {
    std::uint64_t c = 0;
    for (int v : s) c = c * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(v);
    return c;
  }

  Coords coords(int m) const {
    Coords out;
    std::vector<int> s;
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(s.size()) == m) {
        out.index.emplace(code(s), out.seqs.size());
        out.seqs.push_back(s);
        return;
      }
      for (int v = 0; v < k; ++v) {
        if (used[static_cast<std::size_t>(v)]) continue;
        used[static_cast<std::size_t>(v)] = true;
        s.push_back(v);
        self(self);
        s.pop_back();
        used[static_cast<std::size_t>(v)] = false;
      }
    };
    rec(rec);
    return out;
  }

  template <class V, class G, class O, class A>
  std::vector<V> run(G gen, O op, A agg) const {
    int top = 1;
    for (const auto& st : steps) top = std::max(top, st.level);
    std::vector<Coords> cs;
    for (int m = 0; m <= top; ++m) cs.push_back(coords(m));
    std::vector<std::vector<V>> val(steps.size());
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const LevelStep& st = steps[s];
      const Coords& c = cs[static_cast<std::size_t>(st.level)];
      auto& out = val[s];
      out.reserve(c.seqs.size());
      for (const auto& seq : c.seqs) {
        switch (st.kind) {
          case LevelStep::Kind::Gen:
            out.push_back(gen(seq[static_cast<std::size_t>(st.index)]));
            break;
          case LevelStep::Kind::Op: {
            std::vector<V> a;
            for (auto arg : st.args) a.push_back(val[arg][c.index.at(code(seq))]);
            out.push_back(op(st.index, a));
            break;
          }
          case LevelStep::Kind::Down: {
            const auto& src = cs[static_cast<std::size_t>(st.level + 1)];
            std::vector<V> a;
            std::vector<int> ext = seq;
            ext.push_back(0);
            for (int l = 0; l < k; ++l) {
              if (std::find(seq.begin(), seq.end(), l) != seq.end()) continue;
              ext.back() = l;
              a.push_back(val[st.args[0]][src.index.at(code(ext))]);
            }
            out.push_back(agg(st.index, a));
            break;
          }
          case LevelStep::Kind::Up: {
            const auto& src = cs[static_cast<std::size_t>(st.level - 1)];
            std::vector<int> r = seq;
            r.erase(r.begin() + st.index);
            out.push_back(val[st.args[0]][src.index.at(code(r))]);
            break;
          }
        }
      }
    }
    return val.back();
  }
};

struct LevelSearchResult {
  ClosureStatus status = ClosureStatus::Complete;  // Stopped = constant found
  std::shared_ptr<const LevelProgram> program;
};

/**
 * Search levels 1..max_level for a level-1 element constant on b.
 * lower[j-1] is a symmetric j-ary witness for j < k. With max_level = k the
 * top level is all of Sym(b), so a complete run without a constant is a proof
 * that none exists.
 */
inline LevelSearchResult level_search(const Algebra& alg, const Tuple& b, const std::vector<Witness>& lower,
                                      int max_level, ClosureLimits limits) {
  const int k = static_cast<int>(b.size());
  max_level = std::clamp(max_level, 1, k);
  LevelSearchResult res;

  // value classes of b
  std::vector<Elem> vals;
  std::vector<int> mult;
  {
    std::map<Elem, int> cnt;
    for (Elem e : b) ++cnt[e];
    for (auto [v, c] : cnt) {
      vals.push_back(v);
      mult.push_back(c);
    }
  }
  const int C = static_cast<int>(vals.size());

  // class sequences per level, respecting multiplicities
  std::vector<std::vector<std::vector<int>>> seqs(static_cast<std::size_t>(max_level + 1));
  std::vector<std::map<std::vector<int>, std::size_t>> sidx(static_cast<std::size_t>(max_level + 1));
  {
    std::vector<int> s, used(static_cast<std::size_t>(C), 0);
    auto rec = [&](auto&& self) -> void {
      const auto m = s.size();
      sidx[m].emplace(s, seqs[m].size());
      seqs[m].push_back(s);
      if (static_cast<int>(m) == max_level) return;
      for (int c = 0; c < C; ++c) {
        if (used[static_cast<std::size_t>(c)] == mult[static_cast<std::size_t>(c)]) continue;
        ++used[static_cast<std::size_t>(c)];
        s.push_back(c);
        self(self);
        s.pop_back();
        --used[static_cast<std::size_t>(c)];
      }
    };
    rec(rec);
  }

  // aggregators per source level m (arity k - m + 1)
  std::vector<OpTable> aggs;
  std::vector<Term> agg_terms;
  std::vector<std::vector<int>> agg_for(static_cast<std::size_t>(max_level + 1));
  auto add_agg = [&](int m, const OpTable& t, const Term& term) {
    for (int a : agg_for[static_cast<std::size_t>(m)])
      if (aggs[static_cast<std::size_t>(a)] == t) return;
    agg_for[static_cast<std::size_t>(m)].push_back(static_cast<int>(aggs.size()));
    aggs.push_back(t);
    agg_terms.push_back(term);
  };
  for (int m = 1; m <= max_level; ++m) {
    const int ar = k - m + 1;
    if (ar >= 1 && ar <= k - 1 && static_cast<int>(lower.size()) >= ar)
      add_agg(m, lower[static_cast<std::size_t>(ar - 1)].table, lower[static_cast<std::size_t>(ar - 1)].term);
    for (std::size_t g = 0; g < alg.ops.size(); ++g)
      if (alg.ops[g].arity() == ar && is_symmetric(alg.ops[g]))
        add_agg(m, alg.ops[g], Term::basic(static_cast<int>(g), variables(ar)));
  }

  std::vector<bool> sym;
  for (const auto& f : alg.ops) sym.push_back(is_symmetric(f));

  struct Elt {
    int level;
    Tuple v;
    std::size_t pos;  // place in by_level
  };
  std::vector<Elt> elems;
  std::vector<LevelStep> origin;
  std::vector<std::unordered_map<Tuple, std::uint32_t, TupleHash>> index(static_cast<std::size_t>(max_level + 1));
  std::vector<std::vector<std::uint32_t>> by_level(static_cast<std::size_t>(max_level + 1));
  std::optional<std::uint32_t> hit;
  std::uint64_t work = 0;

  auto insert = [&](int level, Tuple v, LevelStep st) -> std::uint32_t {
    auto& ix = index[static_cast<std::size_t>(level)];
    auto it = ix.find(v);
    if (it != ix.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(elems.size());
    const bool c = level >= 1 && is_constant(v);
    ix.emplace(v, id);
    st.level = level;
    elems.push_back({level, std::move(v), by_level[static_cast<std::size_t>(level)].size()});
    origin.push_back(std::move(st));
    by_level[static_cast<std::size_t>(level)].push_back(id);
    if (c && !hit) hit = id;
    return id;
  };

  {
    Tuple g;
    for (const auto& s : seqs[1]) g.push_back(vals[static_cast<std::size_t>(s[0])]);
    insert(1, std::move(g), {LevelStep::Kind::Gen, 1, 0, {}});
  }

  for (std::uint32_t e = 0; e < elems.size() && !hit; ++e) {
    const int m = elems[e].level;
    // down
    if (m >= 1) {
      for (int a : agg_for[static_cast<std::size_t>(m)]) {
        const OpTable& f = aggs[static_cast<std::size_t>(a)];
        Tuple out;
        Tuple col;
        for (const auto& s : seqs[static_cast<std::size_t>(m - 1)]) {
          col.clear();
          std::vector<int> ext = s;
          ext.push_back(0);
          for (int c = 0; c < C; ++c) {
            int rem = mult[static_cast<std::size_t>(c)] - static_cast<int>(std::count(s.begin(), s.end(), c));
            if (rem == 0) continue;
            ext.back() = c;
            const Elem v = elems[e].v[sidx[static_cast<std::size_t>(m)].at(ext)];
            for (int r = 0; r < rem; ++r) col.push_back(v);
          }
          out.push_back(f(col));
        }
        ++work;
        const auto id = insert(m - 1, std::move(out), {LevelStep::Kind::Down, 0, a, {e}});
        if (m - 1 == 0 && !hit) {
          // a level-0 value lifted to level 1 is constant
          Tuple lifted(seqs[1].size(), elems[id].v[0]);
          insert(1, std::move(lifted), {LevelStep::Kind::Up, 1, 0, {id}});
        }
        if (hit) break;
      }
    }
    // up
    if (m < max_level && m >= 1) {
      for (int p = 0; p <= m && !hit; ++p) {
        Tuple out;
        for (const auto& s : seqs[static_cast<std::size_t>(m + 1)]) {
          std::vector<int> r = s;
          r.erase(r.begin() + p);
          out.push_back(elems[e].v[sidx[static_cast<std::size_t>(m)].at(r)]);
        }
        ++work;
        insert(m + 1, std::move(out), {LevelStep::Kind::Up, 0, p, {e}});
      }
    }
    // pointwise basic ops with earlier elements of the same level
    if (m >= 1) {
      const auto& lv = by_level[static_cast<std::size_t>(m)];
      const std::size_t pos = elems[e].pos;
      const std::size_t width = seqs[static_cast<std::size_t>(m)].size();
      for (std::size_t g = 0; g < alg.ops.size() && !hit; ++g) {
        const OpTable& f = alg.ops[g];
        const int r = f.arity();
        std::vector<std::size_t> pick(static_cast<std::size_t>(r), 0);
        Tuple col(static_cast<std::size_t>(r));
        auto emit = [&] {
          ++work;
          Tuple out(width);
          std::vector<std::uint32_t> args;
          for (auto q : pick) args.push_back(lv[q]);
          for (std::size_t c = 0; c < width; ++c) {
            for (int a = 0; a < r; ++a) col[static_cast<std::size_t>(a)] = elems[args[static_cast<std::size_t>(a)]].v[c];
            out[c] = f(col);
          }
          insert(m, std::move(out), {LevelStep::Kind::Op, 0, static_cast<int>(g), std::move(args)});
        };
        if (r == 1) {
          pick[0] = pos;
          emit();
          continue;
        }
        if (sym[g]) {
          pick.back() = pos;
          for (;;) {
            emit();
            if (hit) break;
            int a = r - 2;
            while (a >= 0 && pick[static_cast<std::size_t>(a)] == pos) --a;
            if (a < 0) break;
            const std::size_t v = pick[static_cast<std::size_t>(a)] + 1;
            for (int c = a; c <= r - 2; ++c) pick[static_cast<std::size_t>(c)] = v;
          }
          continue;
        }
        for (int p = 0; p < r && !hit; ++p) {
          if (p > 0 && pos == 0) break;
          std::fill(pick.begin(), pick.end(), 0);
          pick[static_cast<std::size_t>(p)] = pos;
          for (;;) {
            emit();
            if (hit) break;
            int a = r - 1;
            for (; a >= 0; --a) {
              if (a == p) continue;
              const std::size_t lim = a < p ? pos : pos + 1;
              if (++pick[static_cast<std::size_t>(a)] < lim) break;
              pick[static_cast<std::size_t>(a)] = 0;
            }
            if (a < 0) break;
          }
        }
      }
    }
    if (!hit && (elems.size() > limits.max_tuples || (limits.max_work && work > limits.max_work))) {
      res.status = ClosureStatus::Truncated;
      return res;
    }
  }
  if (!hit) return res;
  // A constant higher up stays constant when aggregated down to level 1.
  while (elems[*hit].level > 1) {
    const int m = elems[*hit].level;
    if (agg_for[static_cast<std::size_t>(m)].empty()) return LevelSearchResult{};
    const int a = agg_for[static_cast<std::size_t>(m)][0];
    const OpTable& f = aggs[static_cast<std::size_t>(a)];
    const Elem c = f(Tuple(static_cast<std::size_t>(f.arity()), elems[*hit].v[0]));
    Tuple out(seqs[static_cast<std::size_t>(m - 1)].size(), c);
    const auto src = *hit;
    elems.push_back({m - 1, std::move(out), 0});
    origin.push_back({LevelStep::Kind::Down, m - 1, a, {src}});
    hit = static_cast<std::uint32_t>(elems.size() - 1);
  }

  // ancestors of the hit, in id order
  std::vector<bool> need(elems.size(), false);
  std::vector<std::uint32_t> stack{*hit};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    if (need[u]) continue;
    need[u] = true;
    for (auto a : origin[u].args) stack.push_back(a);
  }
  auto prog = std::make_shared<LevelProgram>();
  prog->k = k;
  prog->ops = alg.ops;
  prog->aggs = aggs;
  prog->agg_terms = agg_terms;
  std::vector<std::uint32_t> renum(elems.size(), 0);
  for (std::uint32_t u = 0; u < elems.size(); ++u) {
    if (!need[u]) continue;
    renum[u] = static_cast<std::uint32_t>(prog->steps.size());
    LevelStep st = origin[u];
    for (auto& a : st.args) a = renum[a];
    prog->steps.push_back(std::move(st));
  }
  res.status = ClosureStatus::Stopped;
  res.program = std::move(prog);
  return res;
}

}  // namespace cloneforge::detail
