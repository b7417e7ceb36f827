#pragma once

// The two small commitment schemes: a four-symbol cyclic channel and its
// quarter-turn realization, and the half-turn continuous-angle channel with
// the interpolation attack.

#include <span>
#include <vector>

#include "framecommit/lattice.hpp"
#include "framecommit/so3.hpp"

namespace framecommit::simple {

// ---------------------------------------------------------------------------
// Four-symbol scheme
// ---------------------------------------------------------------------------

/// C_{a,b} = 2a + b; b is the committed bit.
struct FourSymbolCodeword {
  int a = 0;
  int b = 0;

  int symbol() const { return 2 * a + b; }
  static FourSymbolCodeword from_symbol(int symbol);
};

/// i stays i or becomes i+1 mod 4, each with probability 1/2.
int four_symbol_channel(int i, Rng& rng);

/// Exact transition probability P(out | in).
Probability four_symbol_transition(int in, int out);

/// Accept iff the received symbol is reachable from the revealed codeword.
Verdict four_symbol_verify(int received, const FourSymbolCodeword& revealed);

/// Symbol s as the plane vector at angle s*pi/2: x, y, -x, -y.
Vec3d four_symbol_vector(int symbol);

/// Nearest of the four symbol vectors; rejects out-of-plane or
/// far-from-grid input.
std::optional<int> four_symbol_from_vector(const Vec3d& v, double tol = 1e-6);

/// Identity w.p. 1/2, quarter turn about z w.p. 1/2.
Distribution four_symbol_rotation_mu();

struct FourSymbolAnalysis {
  Probability soundness;
  Probability concealing;   // sum over received symbols of |P(.|0) - P(.|1)|
  Probability flip_cheat;   // best probability of revealing the other bit
  Probability sum_cheat;    // max over commit symbols of best-p0 + best-p1
  bool rotation_realization_exact = false;
};

/// Exact figures by enumeration of symbols, reveals and channel outcomes.
FourSymbolAnalysis analyze_four_symbol();

// ---------------------------------------------------------------------------
// Continuous-angle scheme
// ---------------------------------------------------------------------------

/// Honest codeword angle b*pi/2 (x for 0, y for 1).
double codeword_angle(int b);

/// Rotation about z by an angle uniform on [0, pi].
Distribution continuous_mu();

/// Accept iff sent_angle + shift lies in the closed arc
/// [codeword_angle(b), codeword_angle(b) + pi] mod 2pi.
Verdict continuous_commit_verify(double sent_angle, int revealed_b, double shift);

/// Angle of a received payload after normalization; nullopt when its
/// z-component exceeds 1e-6.
std::optional<double> continuous_received_angle(const Vec3d& received);

Verdict continuous_verify_vector(const Vec3d& received, int revealed_b);

/// Exact acceptance probability for an arbitrary sent angle, by
/// intersecting the shifted arc with the acceptance arc.
double continuous_accept_probability(double sent_angle, int revealed_b);

class InterpolationStrategy {
 public:
  explicit InterpolationStrategy(double alpha);

  double alpha() const { return alpha_; }
  /// alpha * pi / 2
  double sent_angle() const;
  Vec3d payload() const;

  /// Closed forms 1 - alpha/2 and (1 + alpha)/2.
  double accept_zero() const { return 1.0 - alpha_ / 2.0; }
  double accept_one() const { return (1.0 + alpha_) / 2.0; }

 private:
  double alpha_;
};

struct InterpolationRow {
  double alpha;
  double p_accept_0;
  double p_accept_1;
};

std::vector<InterpolationRow> interpolation_curve(std::span<const double> alphas);

/// 0, 0.1, ..., 1.0
std::vector<double> default_alpha_grid();

}  // namespace framecommit::simple
