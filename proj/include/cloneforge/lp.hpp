#pragma once
// Exact rational linear programming: dense two-phase simplex with Bland's rule.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <vector>

namespace cloneforge {

using Rational = mpq_class;

enum class RowSense { Le, Eq, Ge };

struct LinearProgram {
  int nvars = 0;
  std::vector<std::vector<Rational>> rows;
  std::vector<RowSense> sense;
  std::vector<Rational> rhs;
  std::vector<Rational> objective;  // maximized; empty means pure feasibility

  explicit LinearProgram(int n = 0) : nvars(n) {}

  // Sparse row: (variable, coefficient) pairs.
  void add_row(const std::vector<std::pair<int, Rational>>& terms, RowSense s, Rational b) {
    std::vector<Rational> r(static_cast<std::size_t>(nvars));
    for (const auto& [v, c] : terms) {
      if (v < 0 || v >= nvars) throw std::out_of_range("LP variable out of range");
      r[static_cast<std::size_t>(v)] += c;
    }
    rows.push_back(std::move(r));
    sense.push_back(s);
    rhs.push_back(std::move(b));
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> x;
  Rational value;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::vector<std::vector<Rational>> a, std::vector<int> basis) : t_(std::move(a)), basis_(std::move(basis)) {}

  // Minimizes cost over columns [0, active); returns false when unbounded.
  bool minimize(const std::vector<Rational>& cost, std::size_t active) {
    const std::size_t m = t_.size();
    const std::size_t rhs = t_.empty() ? 0 : t_[0].size() - 1;
    for (;;) {
      // reduced costs, Bland: first improving column
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < active && !enter; ++j) {
        if (is_basic(j)) continue;
        Rational r = cost[j];
        for (std::size_t i = 0; i < m; ++i)
          if (sgn(t_[i][j]) != 0) r -= cost[static_cast<std::size_t>(basis_[i])] * t_[i][j];
        if (sgn(r) < 0) enter = j;
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < m; ++i) {
        if (sgn(t_[i][*enter]) <= 0) continue;
        Rational ratio = t_[i][rhs] / t_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || sgn(t_[i][c]) == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j = 0; j < t_[i].size(); ++j)
        if (sgn(t_[r][j]) != 0) t_[i][j] -= f * t_[r][j];
    }
    basis_[r] = static_cast<int>(c);
  }

  void drop_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  bool is_basic(std::size_t j) const {
    for (int b : basis_)
      if (b == static_cast<int>(j)) return true;
    return false;
  }

  std::vector<std::vector<Rational>>& rows() { return t_; }
  std::vector<int>& basis() { return basis_; }

  std::vector<Rational> solution(std::size_t ncols) const {
    std::vector<Rational> x(ncols);
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (static_cast<std::size_t>(basis_[i]) < ncols) x[static_cast<std::size_t>(basis_[i])] = t_[i].back();
    return x;
  }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<int> basis_;
};

}  // namespace detail

/** max objective . x  subject to the rows and x >= 0, exactly. */
inline LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t m = lp.rows.size(), n = static_cast<std::size_t>(lp.nvars);
  std::size_t nslack = 0;
  for (auto s : lp.sense) nslack += s != RowSense::Eq;
  const std::size_t nart = m, cols = n + nslack + nart;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(cols + 1));
  std::vector<int> basis(m);
  std::size_t slack = n;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = lp.rows[i][j];
    if (lp.sense[i] == RowSense::Le) a[i][slack++] = 1;
    if (lp.sense[i] == RowSense::Ge) a[i][slack++] = -1;
    a[i][cols] = lp.rhs[i];
    if (sgn(a[i][cols]) < 0)
      for (auto& v : a[i]) v = -v;
    a[i][n + nslack + i] = 1;
    basis[i] = static_cast<int>(n + nslack + i);
  }
  detail::Tableau tab(std::move(a), std::move(basis));

  // phase 1
  std::vector<Rational> cost(cols);
  for (std::size_t j = n + nslack; j < cols; ++j) cost[j] = 1;
  tab.minimize(cost, cols);
  for (std::size_t i = 0; i < tab.rows().size(); ++i)
    if (static_cast<std::size_t>(tab.basis()[i]) >= n + nslack && sgn(tab.rows()[i].back()) != 0) return {};

  // drive zero artificials out of the basis
  for (std::size_t i = 0; i < tab.rows().size();) {
    if (static_cast<std::size_t>(tab.basis()[i]) < n + nslack) {
      ++i;
      continue;
    }
    std::optional<std::size_t> c;
    for (std::size_t j = 0; j < n + nslack && !c; ++j)
      if (sgn(tab.rows()[i][j]) != 0) c = j;
    if (c) {
      tab.pivot(i, *c);
      ++i;
    } else {
      tab.drop_row(i);
    }
  }

  // phase 2
  std::fill(cost.begin(), cost.end(), Rational(0));
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) cost[j] = -lp.objective[j];
  LpResult res;
  if (!tab.minimize(cost, n + nslack)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x = tab.solution(n);
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) res.value += lp.objective[j] * res.x[j];
  return res;
}

/**
 * A feasible point whose support is as large as possible: for each variable
 * not yet seen positive, maximize it; the average of the optimal points found
 * is feasible (convex set) and positive wherever any feasible point is.
 */
inline std::optional<std::vector<Rational>> max_support_point(LinearProgram lp) {
  lp.objective.clear();
  auto base = solve_lp(lp);
  if (base.status != LpStatus::Optimal) return std::nullopt;
  std::vector<std::vector<Rational>> points{base.x};
  std::vector<bool> seen(static_cast<std::size_t>(lp.nvars), false);
  auto mark = [&](const std::vector<Rational>& x) {
    for (std::size_t j = 0; j < x.size(); ++j)
      if (sgn(x[j]) > 0) seen[j] = true;
  };
  mark(base.x);
  for (int j = 0; j < lp.nvars; ++j) {
    if (seen[static_cast<std::size_t>(j)]) continue;
    lp.objective.assign(static_cast<std::size_t>(lp.nvars), Rational(0));
    lp.objective[static_cast<std::size_t>(j)] = 1;
    auto r = solve_lp(lp);
    if (r.status == LpStatus::Optimal && sgn(r.value) > 0) {
      mark(r.x);
      points.push_back(std::move(r.x));
    } else if (r.status == LpStatus::Unbounded) {
      throw std::logic_error("max_support_point needs a bounded feasible region");
    }
  }
  std::vector<Rational> avg(static_cast<std::size_t>(lp.nvars));
  for (const auto& p : points)
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += p[j];
  for (auto& v : avg) v /= static_cast<long>(points.size());
  return avg;
}

}  // namespace cloneforge
