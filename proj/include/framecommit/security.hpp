#pragma once

// Soundness, concealing and binding figures for the three schemes: exact by
// enumeration where the law is finite, Monte Carlo otherwise or as a
// cross-check.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framecommit/lattice.hpp"
#include "framecommit/montecarlo.hpp"
#include "framecommit/probability.hpp"
#include "framecommit/report.hpp"

namespace framecommit::security {

using lattice::LatticeCodeword;
using lattice::LatticeParams;
using lattice::Predicate;

// ---------------------------------------------------------------------------
// Concealing
// ---------------------------------------------------------------------------

/// sum over a' of |P(a'|b=0) - P(a'|b=1)|, exact. Twice the total-variation
/// distance. Throws BudgetExceeded when L^d * 2d exceeds the budget.
Probability concealing_exact(const LatticeParams& params,
                             std::uint64_t budget = lattice::kDefaultEnumerationBudget);

/// Boundary-mass bound 1 - ((L-1)/(L+2))^d.
Probability concealing_bound(int d, int L);

// ---------------------------------------------------------------------------
// Binding
// ---------------------------------------------------------------------------

/// Lattice-level probability that Bob accepts (revealed_b, revealed_a) when
/// Alice committed to the codebook point `commit`. Noise outcomes that leave
/// the codebook abort.
Probability reveal_success(const LatticeParams& params, const LatticeCodeword& commit, int revealed_b,
                           const LatticeCodeword& revealed_a, Predicate predicate);

struct BindingResult {
  Probability probability;
  LatticeCodeword commit;
  LatticeCodeword reveal;
  int revealed_bit = 0;
  /// Best success among offsets with |delta|_inf equal to max_offset.
  Probability outer_shell;
  std::uint64_t commits_searched = 0;
};

struct BindingSearchOptions {
  int max_offset = 2;
  /// Every commit point of {0..L+1}^d instead of one per boundary class.
  bool exhaustive = false;
  std::uint64_t budget = 1'000'000'000;
};

/// Best flip: commit to a codebook point, reveal a point of opposite parity.
BindingResult binding_search(const LatticeParams& params, Predicate predicate,
                             const BindingSearchOptions& options = {});

/// Best flip for one fixed commit point.
BindingResult best_flip_for_commit(const LatticeParams& params, const LatticeCodeword& commit,
                                   Predicate predicate, int max_offset = 2);

/// max over commit points of (best reveal of 0) + (best reveal of 1).
Probability binding_sum_max(const LatticeParams& params, Predicate predicate,
                            const BindingSearchOptions& options = {});

struct FinitePrecisionResult {
  /// The codeword within eps_meas of w, if any.
  std::optional<LatticeCodeword> nearest;
  Probability best_reveal[2];
  /// Best reveal of the bit opposite to nearest's parity; with no nearest
  /// codeword, the best reveal of either bit.
  Probability best_flip;
  Probability best_any;
};

/// Acceptance figures for an arbitrary commit vector w, through the actual
/// rotate / decode path of every channel outcome.
FinitePrecisionResult binding_search_finite_precision(const LatticeParams& params, const Vec3d& w,
                                                      Predicate predicate);

// ---------------------------------------------------------------------------
// Soundness
// ---------------------------------------------------------------------------

/// min over b of the honest acceptance probability, enumerating every honest
/// secret and every channel outcome through encode / rotate / decode.
Probability lattice_soundness_exact(const LatticeParams& params,
                                    std::uint64_t budget = lattice::kDefaultEnumerationBudget);

/// Honest sessions through the protocol engine, b uniform.
Estimate lattice_soundness_mc(const LatticeParams& params, std::uint64_t trials, std::uint64_t seed);

/// Sessions of a scripted cheat: send encode(commit), reveal (b, reveal).
Estimate lattice_cheat_mc(const LatticeParams& params, const LatticeCodeword& commit, int revealed_b,
                          const LatticeCodeword& reveal, std::uint64_t trials, std::uint64_t seed);

Estimate four_symbol_soundness_mc(std::uint64_t trials, std::uint64_t seed);
Estimate four_symbol_flip_mc(std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Continuous scheme
// ---------------------------------------------------------------------------

struct ContinuousCheatRow {
  double alpha = 0.0;
  double exact_p0 = 0.0;
  double exact_p1 = 0.0;
  std::optional<Estimate> mc_p0;
  std::optional<Estimate> mc_p1;
  /// Both estimates within 3 sigma of the closed form.
  bool agrees = true;
};

/// Closed-form p0, p1 per alpha; with trials > 0 also engine sessions.
std::vector<ContinuousCheatRow> cheat_curve_continuous(std::span<const double> alphas, std::uint64_t trials,
                                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct SecurityReport {
  std::string protocol;
  std::optional<Probability> soundness;
  std::optional<Estimate> soundness_mc;
  std::optional<Probability> concealing_exact;
  std::optional<Probability> concealing_bound;
  std::optional<bool> concealing_within_bound;
  std::optional<Probability> binding_flip_strict;
  std::optional<Probability> binding_flip_lenient;
  std::optional<Probability> binding_sum_max;
  std::optional<std::string> binding_witness;
  std::optional<Estimate> binding_mc;
  std::string method;
};

SecurityReport analyze_lattice(const LatticeParams& params, std::uint64_t budget, bool monte_carlo,
                               std::uint64_t trials, std::uint64_t seed);
SecurityReport analyze_four_symbol(bool monte_carlo, std::uint64_t trials, std::uint64_t seed);

/// Appends the report's fields in a fixed order.
void append_report(Report& out, const SecurityReport& r);

}  // namespace framecommit::security
