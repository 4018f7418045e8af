#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "cpa/errors.hpp"
#include "cpa/rational.hpp"

namespace cpa {

// Feasibility LP over x >= 0:  E x = e,  L x <= l, with e, l >= 0.
template <class T>
struct LpProblem {
  using Row = std::vector<std::pair<std::size_t, T>>;
  std::size_t num_vars = 0;
  std::vector<Row> eq_rows;
  std::vector<T> eq_rhs;
  std::vector<Row> le_rows;
  std::vector<T> le_rhs;
};

template <class T>
struct LpResult {
  bool feasible = false;
  std::vector<T> x;
  // Original variables that are basic in the final basis.
  std::vector<bool> basic;
  std::size_t pivots = 0;
};

namespace lp_detail {

template <class T>
bool is_zero(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v == 0;
  } else {
    return std::abs(v) <= 1e-11;
  }
}

template <class T>
bool is_negative(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v < 0;
  } else {
    return v < -1e-11;
  }
}

template <class T>
bool is_positive(const T& v) {
  return is_negative<T>(T(-v));
}

}  // namespace lp_detail

// Phase one of the two-phase simplex with Bland's rule. Rows whose
// coefficients are all zero are dropped (they hold trivially). The returned
// point is a basic feasible solution.
template <class T>
LpResult<T> find_basic_feasible(const LpProblem<T>& problem, std::size_t max_pivots = 1000000) {
  using lp_detail::is_negative;
  using lp_detail::is_positive;
  using lp_detail::is_zero;

  struct Input {
    const typename LpProblem<T>::Row* row;
    T rhs;
    bool eq;
  };
  std::vector<Input> rows;
  for (std::size_t i = 0; i < problem.eq_rows.size(); ++i) {
    bool nonzero = false;
    for (const auto& [j, a] : problem.eq_rows[i]) nonzero = nonzero || !is_zero(a);
    if (!nonzero) {
      if (!is_zero(problem.eq_rhs[i])) return {};
      continue;
    }
    rows.push_back({&problem.eq_rows[i], problem.eq_rhs[i], true});
  }
  for (std::size_t i = 0; i < problem.le_rows.size(); ++i) {
    bool nonzero = false;
    for (const auto& [j, a] : problem.le_rows[i]) nonzero = nonzero || !is_zero(a);
    if (!nonzero) {
      if (is_negative(problem.le_rhs[i])) return {};
      continue;
    }
    rows.push_back({&problem.le_rows[i], problem.le_rhs[i], false});
  }

  const std::size_t n = problem.num_vars;
  const std::size_t m = rows.size();
  // Columns: originals, one slack per <= row, one artificial per = row.
  std::size_t n_slack = 0, n_art = 0;
  for (const Input& r : rows) (r.eq ? n_art : n_slack) += 1;
  const std::size_t cols = n + n_slack + n_art;
  const std::size_t art_begin = n + n_slack;

  std::vector<std::vector<T>> tab(m, std::vector<T>(cols + 1, T(0)));
  std::vector<std::size_t> basis(m);
  std::size_t slack = n, art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [j, a] : *rows[i].row) tab[i][j] += a;
    tab[i][cols] = rows[i].rhs;
    if (is_negative(tab[i][cols])) throw ContractViolation("LP right-hand sides must be nonnegative");
    basis[i] = rows[i].eq ? art++ : slack++;
    tab[i][basis[i]] = T(1);
  }

  // Reduced costs of the phase-one objective (sum of artificials).
  std::vector<T> cost(cols + 1, T(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art_begin) continue;
    for (std::size_t j = 0; j <= cols; ++j) {
      if (j < art_begin) cost[j] -= tab[i][j];
    }
    cost[cols] -= tab[i][cols];
  }

  LpResult<T> result;
  std::vector<std::size_t> nz;
  auto pivot = [&](std::size_t r, std::size_t c) {
    const T inv = T(1) / tab[r][c];
    nz.clear();
    for (std::size_t j = 0; j <= cols; ++j) {
      if (is_zero(tab[r][j])) {
        tab[r][j] = T(0);
        continue;
      }
      tab[r][j] *= inv;
      nz.push_back(j);
    }
    tab[r][c] = T(1);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || is_zero(tab[i][c])) continue;
      const T f = tab[i][c];
      for (std::size_t j : nz) tab[i][j] -= f * tab[r][j];
      tab[i][c] = T(0);
    }
    if (!is_zero(cost[c])) {
      const T f = cost[c];
      for (std::size_t j : nz) cost[j] -= f * tab[r][j];
      cost[c] = T(0);
    }
    basis[r] = c;
    ++result.pivots;
  };

  for (;;) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < art_begin; ++j) {
      if (is_negative(cost[j])) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    T best_ratio(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_positive(tab[i][enter])) continue;
      T ratio = tab[i][cols] / tab[i][enter];
      if (leave == m || ratio < best_ratio || (!(best_ratio < ratio) && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one
    if (result.pivots >= max_pivots) throw ResourceLimitError("simplex pivot cap exceeded", result.pivots);
    pivot(leave, enter);
  }

  if (is_negative(cost[cols])) return result;

  // Drive zero-valued artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art_begin) continue;
    for (std::size_t j = 0; j < art_begin; ++j) {
      if (!is_zero(tab[i][j])) {
        pivot(i, j);
        break;
      }
    }
  }

  result.feasible = true;
  result.x.assign(n, T(0));
  result.basic.assign(n, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) {
      result.x[basis[i]] = tab[i][cols];
      result.basic[basis[i]] = true;
    }
  }
  if constexpr (!std::is_same_v<T, Rational>) {
    for (T& v : result.x) {
      if (std::abs(v) <= 1e-11) v = T(0);
    }
  }
  return result;
}

}  // namespace cpa
