#include "framecommit/simple_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace framecommit::simple {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int mod4(int i) { return ((i % 4) + 4) % 4; }

void check_symbol(int s) {
  if (s < 0 || s > 3) throw InvalidArgument("symbol must lie in {0..3}");
}

void check_bit(int b) {
  if (b != 0 && b != 1) throw InvalidArgument("bit must be 0 or 1");
}

double overlap(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

}  // namespace

FourSymbolCodeword FourSymbolCodeword::from_symbol(int symbol) {
  check_symbol(symbol);
  return {symbol / 2, symbol % 2};
}

int four_symbol_channel(int i, Rng& rng) {
  check_symbol(i);
  return mod4(i + std::uniform_int_distribution<int>(0, 1)(rng));
}

Probability four_symbol_transition(int in, int out) {
  check_symbol(in);
  check_symbol(out);
  return (out == in || out == mod4(in + 1)) ? Probability(1, 2) : Probability(0);
}

Verdict four_symbol_verify(int received, const FourSymbolCodeword& revealed) {
  if (received < 0 || received > 3) return Verdict::Abort;
  if ((revealed.a != 0 && revealed.a != 1) || (revealed.b != 0 && revealed.b != 1)) {
    return Verdict::Abort;
  }
  return four_symbol_transition(revealed.symbol(), received) > 0 ? Verdict::Accept : Verdict::Abort;
}

Vec3d four_symbol_vector(int symbol) {
  check_symbol(symbol);
  // Exact axis vectors rather than cos/sin of multiples of pi/2.
  static const Vec3d table[4] = {Vec3d(1, 0, 0), Vec3d(0, 1, 0), Vec3d(-1, 0, 0), Vec3d(0, -1, 0)};
  return table[symbol];
}

std::optional<int> four_symbol_from_vector(const Vec3d& v, double tol) {
  for (int s = 0; s < 4; ++s) {
    if ((four_symbol_vector(s) - v).norm() <= tol) return s;
  }
  return std::nullopt;
}

Distribution four_symbol_rotation_mu() {
  return Distribution::finite_support({{Rotationd::identity(), Probability(1, 2)},
                                       {Rotationd::about_z(kPi / 2.0), Probability(1, 2)}});
}

FourSymbolAnalysis analyze_four_symbol() {
  FourSymbolAnalysis out;

  // Honest: a uniform, commit C_{a,b}, reveal it.
  Probability sound = 0;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      const FourSymbolCodeword c{a, b};
      for (int r = 0; r < 4; ++r) {
        if (four_symbol_verify(r, c) == Verdict::Accept) {
          sound += Probability(1, 4) * four_symbol_transition(c.symbol(), r);
        }
      }
    }
  }
  out.soundness = sound;

  Probability conceal = 0;
  for (int r = 0; r < 4; ++r) {
    Probability given[2] = {0, 0};
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        given[b] += Probability(1, 2) * four_symbol_transition(FourSymbolCodeword{a, b}.symbol(), r);
      }
    }
    conceal += abs(given[0] - given[1]);
  }
  out.concealing = conceal;

  // Alice may send any symbol and reveal any codeword.
  Probability flip = 0;
  Probability sum = 0;
  for (int s = 0; s < 4; ++s) {
    Probability best[2] = {0, 0};
    for (int rev = 0; rev < 4; ++rev) {
      const auto c = FourSymbolCodeword::from_symbol(rev);
      Probability p = 0;
      for (int r = 0; r < 4; ++r) {
        if (four_symbol_verify(r, c) == Verdict::Accept) p += four_symbol_transition(s, r);
      }
      best[c.b] = std::max(best[c.b], p);
    }
    const int committed = FourSymbolCodeword::from_symbol(s).b;
    flip = std::max(flip, best[1 - committed]);
    sum = std::max(sum, Probability(best[0] + best[1]));
  }
  out.flip_cheat = flip;
  out.sum_cheat = sum;

  // Rotation realization: push each symbol vector through every support
  // rotation and compare the induced symbol law with the channel table.
  bool exact = true;
  const auto support = enumerate_support(four_symbol_rotation_mu());
  for (int s = 0; s < 4; ++s) {
    Probability law[4] = {0, 0, 0, 0};
    for (const auto& pt : support) {
      const auto r = four_symbol_from_vector(rotate(pt.rotation, four_symbol_vector(s)));
      if (!r) {
        exact = false;
        continue;
      }
      law[*r] += pt.probability;
    }
    for (int r = 0; r < 4; ++r) exact = exact && law[r] == four_symbol_transition(s, r);
  }
  out.rotation_realization_exact = exact;
  return out;
}

double codeword_angle(int b) {
  check_bit(b);
  return b * kPi / 2.0;
}

Distribution continuous_mu() { return Distribution::uniform_segment(kPi); }

Verdict continuous_commit_verify(double sent_angle, int revealed_b, double shift) {
  if (revealed_b != 0 && revealed_b != 1) return Verdict::Abort;
  const double rel = wrap_angle(sent_angle + shift - codeword_angle(revealed_b));
  const bool inside = rel <= kPi + kAngleTolerance || kTwoPi - rel <= kAngleTolerance;
  return inside ? Verdict::Accept : Verdict::Abort;
}

std::optional<double> continuous_received_angle(const Vec3d& received) {
  if (!(received.norm() > 0.0)) return std::nullopt;
  const Vec3d u = normalized_payload(received);
  if (std::abs(u.z()) > 1e-6) return std::nullopt;
  return std::atan2(u.y(), u.x());
}

Verdict continuous_verify_vector(const Vec3d& received, int revealed_b) {
  const auto angle = continuous_received_angle(received);
  if (!angle) return Verdict::Abort;
  return continuous_commit_verify(*angle, revealed_b, 0.0);
}

double continuous_accept_probability(double sent_angle, int revealed_b) {
  // Received angle relative to the codeword sweeps [x, x + pi]; the accepting
  // set is the union of [2 pi k, 2 pi k + pi].
  const double x = wrap_angle(sent_angle - codeword_angle(revealed_b));
  const double len = overlap(x, x + kPi, 0.0, kPi) + overlap(x, x + kPi, kTwoPi, kTwoPi + kPi);
  return len / kPi;
}

InterpolationStrategy::InterpolationStrategy(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
}

double InterpolationStrategy::sent_angle() const { return alpha_ * kPi / 2.0; }

Vec3d InterpolationStrategy::payload() const { return planar_unit(sent_angle()); }

std::vector<InterpolationRow> interpolation_curve(std::span<const double> alphas) {
  std::vector<InterpolationRow> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) {
    const InterpolationStrategy s(a);
    rows.push_back({a, s.accept_zero(), s.accept_one()});
  }
  return rows;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

}  // namespace framecommit::simple
