#include <doctest.h>

#include <cmath>
#include <numbers>

#include "framecommit/montecarlo.hpp"
#include "framecommit/simple_schemes.hpp"

using namespace framecommit;
using namespace framecommit::simple;

namespace {

constexpr double kPi = std::numbers::pi;

// Length of [lo, lo+pi] intersected with [start, start+pi] on the circle,
// divided by pi. Independent of the library's arc routine.
double arc_overlap(double sent, double codeword) {
  const double shift = std::fmod(std::fmod(sent - codeword, 2 * kPi) + 2 * kPi, 2 * kPi);
  // Received angles relative to the codeword: [shift, shift + pi]. Accepted: [0, pi].
  if (shift <= kPi) return (kPi - shift) / kPi;
  return (shift - kPi) / kPi;
}

}  // namespace

TEST_CASE("codewords: symbol determines (a, b)") {
  for (int s = 0; s < 4; ++s) {
    const auto c = FourSymbolCodeword::from_symbol(s);
    CHECK(c.symbol() == s);
    CHECK(c.symbol() == 2 * c.a + c.b);
  }
  CHECK_THROWS_AS(FourSymbolCodeword::from_symbol(4), InvalidArgument);
}

TEST_CASE("four-symbol channel") {
  Rng rng(42);
  int stay = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) {
    const int out = four_symbol_channel(3, rng);
    CHECK((out == 3 || out == 0));
    stay += out == 3;
  }
  CHECK(std::abs(stay / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
  for (int in = 0; in < 4; ++in) {
    for (int k = 0; k < 100; ++k) {
      const int diff = (four_symbol_channel(in, rng) - in + 4) % 4;
      CHECK((diff == 0 || diff == 1));
    }
  }
}

TEST_CASE("four-symbol transition table") {
  for (int in = 0; in < 4; ++in) {
    Probability total = 0;
    for (int out = 0; out < 4; ++out) {
      const Probability p = four_symbol_transition(in, out);
      const bool support = out == in || out == (in + 1) % 4;
      CHECK(p == (support ? Probability(1, 2) : Probability(0)));
      total += p;
    }
    CHECK(total == 1);
  }
}

TEST_CASE("four-symbol verify") {
  CHECK(four_symbol_verify(1, FourSymbolCodeword::from_symbol(0)) == Verdict::Accept);
  CHECK(four_symbol_verify(0, FourSymbolCodeword::from_symbol(0)) == Verdict::Accept);
  CHECK(four_symbol_verify(2, FourSymbolCodeword::from_symbol(0)) == Verdict::Abort);
  CHECK(four_symbol_verify(0, FourSymbolCodeword::from_symbol(3)) == Verdict::Accept);
}

TEST_CASE("four-symbol rotation realization reproduces the channel exactly") {
  const auto support = enumerate_support(four_symbol_rotation_mu());
  REQUIRE(support.size() == 2);
  for (int in = 0; in < 4; ++in) {
    std::array<Probability, 4> law{};
    for (const auto& s : support) {
      const auto out = four_symbol_from_vector(rotate(s.rotation, four_symbol_vector(in)));
      REQUIRE(out);
      law[*out] += s.probability;
    }
    for (int out = 0; out < 4; ++out) CHECK(law[out] == four_symbol_transition(in, out));
  }
  CHECK(analyze_four_symbol().rotation_realization_exact);
}

TEST_CASE("four-symbol exact figures") {
  const auto a = analyze_four_symbol();
  CHECK(a.soundness == 1);
  CHECK(a.concealing == 0);
  CHECK(a.flip_cheat == Probability(1, 2));
  CHECK(a.sum_cheat == Probability(3, 2));

  // Oracle: received-symbol law given b, committed symbol uniform over the
  // two codewords with that b.
  for (int out = 0; out < 4; ++out) {
    Probability p0 = 0, p1 = 0;
    for (int s = 0; s < 4; ++s) {
      const auto c = FourSymbolCodeword::from_symbol(s);
      (c.b == 0 ? p0 : p1) += Probability(1, 2) * four_symbol_transition(s, out);
    }
    CHECK(p0 == p1);
    CHECK(p0 == Probability(1, 4));
  }
}

TEST_CASE("continuous: honest codewords always accepted") {
  for (int b = 0; b < 2; ++b) {
    for (int k = 0; k <= 100; ++k) {
      CHECK(continuous_commit_verify(codeword_angle(b), b, kPi * k / 100.0) == Verdict::Accept);
    }
    CHECK(continuous_accept_probability(codeword_angle(b), b) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("continuous: interpolation closed form vs arc overlap oracle") {
  for (double alpha : default_alpha_grid()) {
    const InterpolationStrategy s(alpha);
    CHECK(std::abs(s.accept_zero() - arc_overlap(s.sent_angle(), codeword_angle(0))) <= 1e-12);
    CHECK(std::abs(s.accept_one() - arc_overlap(s.sent_angle(), codeword_angle(1))) <= 1e-12);
    CHECK(std::abs(continuous_accept_probability(s.sent_angle(), 0) - s.accept_zero()) <= 1e-12);
    CHECK(std::abs(continuous_accept_probability(s.sent_angle(), 1) - s.accept_one()) <= 1e-12);
    CHECK(std::abs(s.accept_zero() + s.accept_one() - 1.5) <= 1e-12);
  }
  const InterpolationStrategy half(0.5);
  CHECK(half.accept_zero() == 0.75);
  CHECK(half.accept_one() == 0.75);
  CHECK(InterpolationStrategy(0).accept_zero() == 1.0);
  CHECK(InterpolationStrategy(0).accept_one() == 0.5);
  CHECK(InterpolationStrategy(1).accept_zero() == 0.5);
  CHECK(InterpolationStrategy(1).accept_one() == 1.0);
  CHECK_THROWS_AS(InterpolationStrategy(1.5), InvalidArgument);
  CHECK_THROWS_AS(InterpolationStrategy(-0.1), InvalidArgument);
}

TEST_CASE("continuous: general arc routine matches the oracle on random angles") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
  for (int i = 0; i < 500; ++i) {
    const double sent = u(rng);
    for (int b = 0; b < 2; ++b) {
      CHECK(std::abs(continuous_accept_probability(sent, b) - arc_overlap(sent, codeword_angle(b))) <= 1e-12);
    }
  }
}

TEST_CASE("continuous: Monte Carlo agrees with the closed form") {
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    const InterpolationStrategy s(alpha);
    for (int b = 0; b < 2; ++b) {
      const auto est = monte_carlo(10'000, 17 + b, [&](Rng& rng) {
        const double shift = std::uniform_real_distribution<double>(0.0, kPi)(rng);
        return continuous_commit_verify(s.sent_angle(), b, shift) == Verdict::Accept;
      });
      CHECK(est.agrees_with(b == 0 ? s.accept_zero() : s.accept_one(), 3.0));
    }
  }
}

TEST_CASE("continuous: max over grid of min(p0, p1) is at alpha = 1/2") {
  const auto rows = interpolation_curve(default_alpha_grid());
  double best = -1, arg = -1;
  for (const auto& r : rows) {
    if (std::min(r.p_accept_0, r.p_accept_1) > best) best = std::min(r.p_accept_0, r.p_accept_1), arg = r.alpha;
  }
  CHECK(arg == doctest::Approx(0.5));
  CHECK(best == doctest::Approx(0.75));
}

TEST_CASE("continuous: honest concealing by arc symmetry") {
  // Acceptance indicators of (reveal 0, reveal 1) as a function of the shift,
  // sampled on a fine grid; b=0 and b=1 give the same law up to relabelling of
  // the uniform shift.
  std::map<std::pair<bool, bool>, int> law0, law1;
  const int n = 3600;
  for (int k = 0; k < n; ++k) {
    const double shift = kPi * (k + 0.5) / n;
    for (int b = 0; b < 2; ++b) {
      auto& law = b == 0 ? law0 : law1;
      law[{continuous_commit_verify(codeword_angle(b), b, shift) == Verdict::Accept,
           continuous_commit_verify(codeword_angle(b), 1 - b, shift) == Verdict::Accept}]++;
    }
  }
  CHECK(law0.size() == law1.size());
  for (const auto& [k, c] : law0) CHECK(law1[{k.first, k.second}] == c);
}

TEST_CASE("continuous: vector verification rejects out-of-plane payloads") {
  CHECK(continuous_verify_vector(Vec3d(1, 0, 0), 0) == Verdict::Accept);
  CHECK(continuous_verify_vector(Vec3d(1, 0, 0.01), 0) == Verdict::Abort);
  CHECK_FALSE(continuous_received_angle(Vec3d(0, 0, 1)));
  CHECK(continuous_received_angle(Vec3d(0, 2, 0)).value() == doctest::Approx(kPi / 2));
}
