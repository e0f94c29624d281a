#pragma once

#include <vector>

#include "qlab/boolfn.hpp"
#include "qlab/distributions.hpp"
#include "qlab/rational.hpp"

namespace qlab::test {

// Slice mass by direct string counting, no closed form involved.
Rat slice_mass_by_counting(const Conjunction& c, int m, int k);

// Outer-mixture mass by enumerating every raw input string. Exponential in
// n*m, so tiny sizes only.
Rat mixture_mass_by_counting(const OuterMixture& d, const Conjunction& c);

// Exact optimal worst-case error of depth-d randomized trees, by LP over the
// complete set of no-requery tree error profiles.
Rat full_tree_game_value(const PartialFunction& f, int depth);

// Fourier-Motzkin feasibility of {x >= 0, A x <= b}. Doubly exponential, so
// only for cross-checking the simplex at the smallest sizes.
bool fm_feasible(std::vector<std::vector<Rat>> A, std::vector<Rat> b);

}  // namespace qlab::test
