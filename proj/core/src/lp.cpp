#include "qlab/lp.hpp"

#include <stdexcept>

namespace qlab {

namespace {

// Dense tableau for max obj.x over the equality system rows.x = rhs, x >= 0.
// Reduced costs are recomputed from the basis every iteration; the problem
// sizes here are small and the recompute keeps the pivot loop short.
struct Tableau {
  int cols = 0;                        // total variable count, rhs excluded
  std::vector<std::vector<Rat>> row;   // each has cols + 1 entries, rhs last
  std::vector<int> basis;              // basic variable per row
  std::vector<Rat> obj;                // objective coefficient per variable
  std::vector<char> blocked;           // variables barred from entering

  void pivot(int r, int c) {
    Rat piv = row[r][c];
    for (auto& v : row[r]) v /= piv;
    for (size_t i = 0; i < row.size(); ++i) {
      if (static_cast<int>(i) == r || row[i][c] == 0) continue;
      Rat factor = row[i][c];
      for (int j = 0; j <= cols; ++j) row[i][j] -= factor * row[r][j];
    }
    basis[r] = c;
  }

  // One simplex phase under Bland's rule. Returns false when the objective
  // is unbounded above.
  bool optimize() {
    for (;;) {
      std::vector<Rat> price(row.size());
      for (size_t i = 0; i < row.size(); ++i) price[i] = obj[basis[i]];

      int enter = -1;
      for (int j = 0; j < cols && enter < 0; ++j) {
        if (blocked[j]) continue;
        Rat reduced = obj[j];
        for (size_t i = 0; i < row.size(); ++i) reduced -= price[i] * row[i][j];
        if (reduced > 0) enter = j;
      }
      if (enter < 0) return true;

      int leave = -1;
      Rat best;
      for (size_t i = 0; i < row.size(); ++i) {
        if (row[i][enter] <= 0) continue;
        Rat ratio = row[i][cols] / row[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  Rat objective_value() const {
    Rat total = 0;
    for (size_t i = 0; i < row.size(); ++i) total += obj[basis[i]] * row[i][cols];
    return total;
  }
};

}  // namespace

LpResult solve_lp_max(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
                      const std::vector<Rat>& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != m)
    throw std::invalid_argument("solve_lp_max: row/rhs count mismatch");
  for (const auto& r : A)
    if (static_cast<int>(r.size()) != n)
      throw std::invalid_argument("solve_lp_max: ragged constraint matrix");

  // Columns: n structural, m slacks, then one artificial per negative rhs.
  int artificials = 0;
  for (const auto& v : b)
    if (v < 0) ++artificials;
  const int total = n + m + artificials;

  Tableau t;
  t.cols = total;
  t.obj.assign(total, Rat(0));
  t.blocked.assign(total, 0);
  t.row.assign(m, std::vector<Rat>(total + 1, Rat(0)));
  t.basis.assign(m, -1);

  int next_art = n + m;
  for (int i = 0; i < m; ++i) {
    bool flip = b[i] < 0;
    for (int j = 0; j < n; ++j) t.row[i][j] = flip ? -A[i][j] : A[i][j];
    t.row[i][n + i] = flip ? Rat(-1) : Rat(1);
    t.row[i][total] = flip ? -b[i] : b[i];
    if (flip) {
      t.row[i][next_art] = 1;
      t.basis[i] = next_art++;
    } else {
      t.basis[i] = n + i;
    }
  }

  if (artificials > 0) {
    for (int j = n + m; j < total; ++j) t.obj[j] = -1;
    t.optimize();  // bounded above by zero, cannot report unbounded
    if (t.objective_value() != 0) return {LpResult::Status::Infeasible, Rat(0), {}};

    // Pivot leftover artificials out of the basis; a row that offers no
    // real pivot column is redundant and gets dropped.
    for (int i = static_cast<int>(t.row.size()) - 1; i >= 0; --i) {
      if (t.basis[i] < n + m) continue;
      int col = -1;
      for (int j = 0; j < n + m && col < 0; ++j)
        if (t.row[i][j] != 0) col = j;
      if (col >= 0) {
        t.pivot(i, col);
      } else {
        t.row.erase(t.row.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
    for (int j = n + m; j < total; ++j) {
      t.blocked[j] = 1;
      t.obj[j] = 0;
    }
  }

  for (int j = 0; j < n; ++j) t.obj[j] = c[j];
  for (int j = n; j < n + m; ++j) t.obj[j] = 0;
  if (!t.optimize()) return {LpResult::Status::Unbounded, Rat(0), {}};

  LpResult res;
  res.status = LpResult::Status::Optimal;
  res.x.assign(n, Rat(0));
  for (size_t i = 0; i < t.row.size(); ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.row[i][t.cols];
  res.objective = t.objective_value();
  return res;
}

GameSolution solve_matrix_game(const std::vector<std::vector<Rat>>& payoff) {
  const int rows = static_cast<int>(payoff.size());
  if (rows == 0) throw std::invalid_argument("solve_matrix_game: empty matrix");
  const int cols = static_cast<int>(payoff[0].size());
  if (cols == 0) throw std::invalid_argument("solve_matrix_game: empty matrix");
  for (const auto& r : payoff)
    if (static_cast<int>(r.size()) != cols)
      throw std::invalid_argument("solve_matrix_game: ragged matrix");

  // Shift payoffs so the value is strictly positive, then use the standard
  // reciprocal formulation for each player.
  Rat shift = payoff[0][0];
  for (const auto& r : payoff)
    for (const auto& v : r)
      if (v < shift) shift = v;
  shift = 1 - shift;

  std::vector<std::vector<Rat>> col_A(rows, std::vector<Rat>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) col_A[i][j] = payoff[i][j] + shift;

  // Column player: max sum(w) s.t. (E + shift) w <= 1.
  LpResult col_lp = solve_lp_max(col_A, std::vector<Rat>(rows, Rat(1)),
                                 std::vector<Rat>(cols, Rat(1)));
  // Row player: min sum(u) s.t. (E + shift)^T u >= 1.
  std::vector<std::vector<Rat>> row_A(cols, std::vector<Rat>(rows));
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) row_A[j][i] = -col_A[i][j];
  LpResult row_lp = solve_lp_max(row_A, std::vector<Rat>(cols, Rat(-1)),
                                 std::vector<Rat>(rows, Rat(-1)));

  if (col_lp.status != LpResult::Status::Optimal || row_lp.status != LpResult::Status::Optimal)
    throw std::logic_error("solve_matrix_game: player LP did not reach an optimum");
  if (col_lp.objective != -row_lp.objective || col_lp.objective <= 0)
    throw std::logic_error("solve_matrix_game: duality gap in exact arithmetic");

  Rat shifted_value = 1 / col_lp.objective;
  GameSolution sol;
  sol.value = shifted_value - shift;
  sol.col_mix.resize(cols);
  for (int j = 0; j < cols; ++j) sol.col_mix[j] = col_lp.x[j] * shifted_value;
  sol.row_mix.resize(rows);
  for (int i = 0; i < rows; ++i) sol.row_mix[i] = row_lp.x[i] * shifted_value;
  return sol;
}

}  // namespace qlab
