#pragma once

#include <vector>

#include "qlab/rational.hpp"

namespace qlab {

// max c.x subject to A x <= b, x >= 0, everything exact. Two-phase tableau
// simplex with Bland's rule, so it terminates without cycling.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Rat objective;
  std::vector<Rat> x;
};

LpResult solve_lp_max(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
                      const std::vector<Rat>& c);

// Zero-sum matrix game: payoff[i][j] is what the row player wins when the
// pure pair (i, j) is played; rows maximize, columns minimize.
struct GameSolution {
  Rat value;
  std::vector<Rat> row_mix;
  std::vector<Rat> col_mix;
};

// Solves both players' LPs separately and insists on exact objective
// equality, which certifies optimality of the returned pair.
GameSolution solve_matrix_game(const std::vector<std::vector<Rat>>& payoff);

}  // namespace qlab
