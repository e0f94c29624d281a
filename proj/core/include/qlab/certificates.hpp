#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qlab/distributions.hpp"
#include "qlab/dtree.hpp"
#include "qlab/rational.hpp"

namespace qlab {

// Root-to-leaf path as a conjunction; nullopt when the path queries some
// coordinate with both answers (its inputs form the empty set).
std::optional<Conjunction> path_conjunction(
    const std::vector<std::pair<int, std::uint8_t>>& path);

// Sweep of C(G_z) <= 3^w * C(G_{1-z}) over both z and every conjunction of
// width w <= min(max_width, m/7), for the weight-m/3 / weight-2m/3 slice
// pair. worst_ratio is the largest C(G_z)/C(G_{1-z}) seen.
struct RatioSweepReport {
  bool pass = true;
  long long checked = 0;
  Rat worst_ratio;
  Conjunction worst_conj;
  int worst_z = 0;
};

RatioSweepReport verify_gapmaj_ratio(int m, int max_width);

// For the weight-0 / weight-m/2 slice pair: (i) C(G_0) is 0 or 1 for every
// conjunction up to max_width; (ii) every all-negative conjunction of width
// w <= m/4 has 3^w * C(G_1) >= 1. worst_margin is the smallest such product.
struct GaporFactsReport {
  bool indicator_pass = true;
  bool lower_bound_pass = true;
  long long indicator_checked = 0;
  long long lower_bound_checked = 0;
  Rat worst_margin;
  Conjunction worst_conj;
};

GaporFactsReport verify_gapor_facts(int m, int max_width);

// Per-block multiplier decomposition C_i(G_{y_i}) = (1 + a_i (-1)^{y_i}) base_i.
// Averaging over an outer parity class kills every character except the empty
// one and the full one, whose coefficient is prod_a.
struct FourierBlockDecomposition {
  int n = 0;
  int m = 0;
  std::vector<Rat> a;
  std::vector<Rat> base;
  std::vector<int> chi_support;  // blocks of the one surviving character
  Rat cd;                        // product of base_i
  Rat prod_a;
};

struct FourierCheckReport {
  FourierBlockDecomposition dec;
  Rat cd0, cd1;            // closed forms cd*(1 +/- prod_a)
  Rat cd0_sum, cd1_sum;    // independent mixture-DP route, equal by identity
  bool product_bound_ok = false;  // |prod_a| <= 1/4
  bool band_ok = false;           // 2/3 cd < cd1 < 4/3 cd, or cd == 0
};

// Slices are weight floor(m/3) and m - floor(m/3). The two evaluation routes
// must agree exactly; a mismatch throws, everything else is reported.
FourierCheckReport xor_fourier_check(int n, int m, const Conjunction& conj);

// Outer-majority three-slice analysis. Blocks split into B (no mass under
// the weight-0 slice) and A (full mass); with s = n/2 - 1 - |B|,
//   C(D_zeta) = p[zeta] * c_B * q[zeta]
// where p[zeta] is the probability the outer weight-(n/2-1+zeta) set covers
// B and q[zeta] averages products of c over uniform (s+zeta)-subsets of A.
struct MajCaseDecomposition {
  int n = 0;
  std::vector<int> blocks_B;
  std::vector<int> blocks_A;
  std::vector<Rat> c;        // per-block mass under the weight-m/2 slice
  std::vector<int> widths;   // per-block conjunction widths (zero when not from a conjunction)
  Rat c_B;
  long s = 0;
  std::array<Rat, 3> p{};
  std::array<bool, 3> q_defined{};
  std::array<Rat, 3> q{};
  std::array<Rat, 3> cd{};
  // Resampling the last two elements of S_2 with replacement splits q_2 into
  // a distinct-pair part and a duplicate part.
  bool resample_checked = false;
  Rat q2_star, q2_err;
};

enum class MajBranch { Zeta0Large, Zeta2Large, MiddleZero, None };

struct MajCaseReport {
  MajCaseDecomposition dec;
  bool q_ratio_in_regime = false;   // width/m precondition held, ratio was enforced
  bool q_ratio_ok = false;          // q_1 > 0 and q_1^2 <= n q_2^2
  bool err_term_dominated = false;  // q2_err <= q_1
  MajBranch branch = MajBranch::None;
  bool outside_regime_candidate = false;
};

// Direct (B, c) form; identities among p, q, q2_star, q2_err are enforced,
// the q_1 <= sqrt(n) q_2 ratio is only reported.
MajCaseReport maj_case_from_values(int n, const std::vector<char>& in_B,
                                   const std::vector<Rat>& c);

// Conjunction form over the weight-0 / weight-m/2 pair; additionally
// cross-checks the factorization against the mixture DP and enforces the
// ratio and the trichotomy inside the width/m regime.
MajCaseReport maj_case_analysis(int n, int m, const Conjunction& conj);

// Sufficient condition under which the q_1 <= sqrt(n) q_2 ratio holds at
// every even n: |B| < n/2 and the n/2 smallest c-values on A sum to at
// least sqrt(n)/2 (checked by squaring).
bool maj_subset_mean_hypothesis(int n, const std::vector<char>& in_B, const std::vector<Rat>& c);

// (sum a_k b_k^2)(sum a_k) >= (sum a_k b_k)^2 for nonnegative entries;
// requires some a_k b_k > 0.
bool verify_sym_inequality(const std::vector<Rat>& alphas, const std::vector<Rat>& betas);

// Finite outcome space carrying three nonnegative values per outcome.
struct OutcomeTable {
  struct Row {
    Rat prob;
    std::array<Rat, 3> value;
  };
  std::vector<Row> rows;
  void validate() const;  // probabilities nonnegative summing to 1, values nonnegative
};

// First outcome o with value1(o) > 0, value0(o) <= delta*value1(o), and
// value2(o) <= (1+delta)*value1(o), where delta = 2*sqrt(eps) and the
// comparisons are done by squaring. Premises: 0 < eps <= 1/10,
// E[value0] <= eps, E[value1] >= 1-eps, E[value2] <= 1.
size_t select_outcome(const OutcomeTable& table, const Rat& eps);

struct PostselectionCertificate {
  Conjunction conj;
  int z = 0;
  Rat mass_z;      // mass of the conjunction under D_z
  Rat mass_other;  // under D_{1-z}
};

// Enumerates (support tree, leaf) pairs of rt, padded to perfect depth, and
// returns the first leaf whose path conjunction satisfies
// eps * mass_z >= (1 - eps) * mass_other with mass_z > 0, z the leaf label.
PostselectionCertificate extract_postselection_certificate(const RandomizedTree& rt,
                                                           const FiniteDist& d0,
                                                           const FiniteDist& d1, const Rat& eps);

struct WappCertificate {
  Conjunction conj;
  Rat mass0, mass1, mass2;
  Rat eps;  // delta = 2*sqrt(eps), handled by squaring
};

// Builds the outcome table over (tree, leaf) pairs, label-1 leaves carrying
// their path-conjunction masses rescaled by 2^r / t, and delegates the
// choice to select_outcome.
WappCertificate extract_wapp_certificate(const RandomizedTree& rt, const Rat& t,
                                         const FiniteDist& d0, const FiniteDist& d1,
                                         const FiniteDist& d2, const Rat& eps);

}  // namespace qlab
