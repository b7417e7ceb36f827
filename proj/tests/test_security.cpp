#include <doctest.h>

#include <cmath>
#include <map>

#include "framecommit/protocol.hpp"
#include "framecommit/security.hpp"

using namespace framecommit;
using namespace framecommit::security;
using lattice::Predicate;

namespace {

std::vector<LatticeCodeword> box(int d, int lo, int hi) {
  std::vector<LatticeCodeword> out;
  Eigen::VectorXi c = Eigen::VectorXi::Constant(d, lo);
  while (true) {
    out.emplace_back(c);
    int i = 0;
    while (i < d && c[i] == hi) c[i++] = lo;
    if (i == d) break;
    ++c[i];
  }
  return out;
}

// Concealing distance straight from the definition, keyed by point strings.
Probability concealing_oracle(int d, int L) {
  std::map<std::string, Probability> law[2];
  std::int64_t size[2] = {0, 0};
  const auto honest = box(d, 0, L - 1);
  for (const auto& a : honest) ++size[a.parity()];
  for (const auto& a : honest) {
    const int b = a.parity();
    for (int j = 0; j < d; ++j) {
      for (int m = 1; m <= 2; ++m) {
        law[b][(a + lattice::unit_offset(d, j, m)).to_string()] += Probability(1, 2 * d * size[b]);
      }
    }
  }
  std::map<std::string, int> keys;
  for (int b = 0; b < 2; ++b) {
    for (const auto& [k, v] : law[b]) keys[k] = 1;
  }
  Probability eps = 0;
  for (const auto& [k, unused] : keys) eps += abs(law[0][k] - law[1][k]);
  return eps;
}

// Best flip with no offset truncation: every commit in {0..L+1}^d against
// every reveal in {0..L-1}^d of the other parity, noise enumerated directly.
Probability binding_oracle(const LatticeParams& p, Predicate pred) {
  const int d = p.d();
  Probability best = 0;
  for (const auto& c : box(d, 0, p.L() + 1)) {
    for (const auto& r : box(d, 0, p.L() - 1)) {
      if (r.parity() == c.parity()) continue;
      Probability s = 0;
      for (int j = 0; j < d; ++j) {
        for (int m = 1; m <= 2; ++m) {
          const auto out = c + lattice::unit_offset(d, j, m);
          if (!out.in_range(0, p.L() + 1)) continue;
          if (lattice::verify_reveal(p, out, r.parity(), r, pred) == Verdict::Accept) s += Probability(1, 2 * d);
        }
      }
      best = std::max(best, s);
    }
  }
  return best;
}

Vec3d at_angle(double a) { return planar_unit(a); }

}  // namespace

TEST_CASE("concealing: hand-enumerated d=1, L=2") {
  // P(.|0) = 1/2 on {1,2}; P(.|1) = 1/2 on {2,3}; sum |diff| = 1/2 + 0 + 1/2.
  const auto p = LatticeParams::create(1, 2);
  CHECK(concealing_exact(p) == 1);
  CHECK(concealing_oracle(1, 2) == 1);
}

TEST_CASE("concealing: exact values match the oracle and the pinned anchors") {
  for (int d : {1, 2, 3}) {
    for (int L : {4, 8, 16}) {
      const auto p = LatticeParams::create(d, L);
      const Probability eps = concealing_exact(p);
      CHECK(eps == concealing_oracle(d, L));
      CHECK(eps == Probability(2, L));  // regression anchor
      CHECK(eps >= 0);
      CHECK(eps <= 2);
    }
  }
}

TEST_CASE("concealing: odd L uses the true class sizes") {
  for (int d : {1, 2}) {
    for (int L : {3, 5}) CHECK(concealing_exact(LatticeParams::create(d, L)) == concealing_oracle(d, L));
  }
}

TEST_CASE("concealing: bound holds on the grid and values decrease in L") {
  for (int d : {1, 2, 3}) {
    Probability prev = 3;
    for (int L : {4, 8, 16}) {
      const auto eps = concealing_exact(LatticeParams::create(d, L));
      const auto bound = concealing_bound(d, L);
      CHECK(eps <= bound);
      CHECK(eps < prev);
      prev = eps;
    }
  }
  CHECK(concealing_bound(2, 4) == Probability(3, 4));
  CHECK(concealing_bound(1, 4) == Probability(1, 2));
  CHECK(concealing_exact(LatticeParams::create(2, 16)) < concealing_exact(LatticeParams::create(2, 4)));
}

TEST_CASE("concealing: budget") {
  CHECK_THROWS_AS(concealing_exact(LatticeParams::create(3, 8), 100), BudgetExceeded);
}

TEST_CASE("binding: lenient 1/d, strict 1/(2d)") {
  for (int d : {2, 3, 4, 5}) {
    const auto p = LatticeParams::create(d, 8);
    const auto lenient = binding_search(p, Predicate::Lenient);
    const auto strict = binding_search(p, Predicate::Strict);
    CHECK(lenient.probability == Probability(1, d));
    CHECK(strict.probability == Probability(1, 2 * d));
    CHECK(lenient.probability >= strict.probability);
    for (const auto* r : {&lenient, &strict}) {
      const auto pred = r == &lenient ? Predicate::Lenient : Predicate::Strict;
      CHECK(r->revealed_bit != r->commit.parity());
      CHECK(r->revealed_bit == r->reveal.parity());
      CHECK(reveal_success(p, r->commit, r->revealed_bit, r->reveal, pred) == r->probability);
    }
  }
}

TEST_CASE("binding: d=1") {
  const auto p = LatticeParams::create(1, 8);
  CHECK(binding_search(p, Predicate::Lenient).probability == 1);
  CHECK(binding_search(p, Predicate::Strict).probability == Probability(1, 2));
}

TEST_CASE("binding: search agrees with the untruncated brute-force oracle") {
  for (auto [d, L] : {std::pair{1, 4}, {2, 4}, {3, 4}, {2, 5}}) {
    const auto p = LatticeParams::create(d, L);
    for (auto pred : {Predicate::Lenient, Predicate::Strict}) {
      CHECK(binding_search(p, pred).probability == binding_oracle(p, pred));
      BindingSearchOptions all;
      all.exhaustive = true;
      CHECK(binding_search(p, pred, all).probability == binding_oracle(p, pred));
    }
  }
}

TEST_CASE("binding: representative and exhaustive commit sets agree") {
  for (int d : {2, 3}) {
    for (int L : {4, 8}) {
      const auto p = LatticeParams::create(d, L);
      BindingSearchOptions all;
      all.exhaustive = true;
      for (auto pred : {Predicate::Lenient, Predicate::Strict}) {
        const auto rep = binding_search(p, pred);
        const auto ex = binding_search(p, pred, all);
        CHECK(rep.probability == ex.probability);
        CHECK(rep.commits_searched <= ex.commits_searched);
        if (L == 8) CHECK(rep.commits_searched < ex.commits_searched);
        CHECK(binding_sum_max(p, pred) == binding_sum_max(p, pred, all));
      }
    }
  }
}

TEST_CASE("binding: widening the offset box to 3 adds nothing") {
  for (int d : {2, 3}) {
    const auto p = LatticeParams::create(d, 8);
    BindingSearchOptions wide;
    wide.max_offset = 3;
    for (auto pred : {Predicate::Lenient, Predicate::Strict}) {
      const auto r = binding_search(p, pred, wide);
      CHECK(r.outer_shell == 0);
      CHECK(r.probability == binding_search(p, pred).probability);
    }
  }
}

TEST_CASE("binding: sum metric") {
  for (int d : {1, 2, 3}) {
    const auto p = LatticeParams::create(d, 8);
    CHECK(binding_sum_max(p, Predicate::Lenient) == 1 + Probability(1, d));
  }
}

TEST_CASE("binding: Monte Carlo of the witness through the engine agrees") {
  const auto p = LatticeParams::create(3, 8);
  const auto w = binding_search(p, Predicate::Lenient);
  const auto est = lattice_cheat_mc(p, w.commit, w.revealed_bit, w.reveal, 100'000, 42);
  CHECK(est.agrees_with(to_double(w.probability), 4.0));
}

TEST_CASE("soundness: exact and Monte Carlo") {
  for (int d : {1, 2, 3}) {
    for (int L : {4, 8}) {
      const auto p = LatticeParams::create(d, L);
      CHECK(lattice_soundness_exact(p) == 1);
      const auto est = lattice_soundness_mc(p, 10'000, 42);
      CHECK(est.successes == 10'000);
      CHECK(est.trials == 10'000);
    }
  }
  CHECK(four_symbol_soundness_mc(10'000, 1).successes == 10'000);
}

TEST_CASE("four-symbol flip Monte Carlo agrees with 1/2") {
  CHECK(four_symbol_flip_mc(100'000, 42).agrees_with(0.5, 4.0));
}

TEST_CASE("finite precision: near-codeword vectors behave like the codeword") {
  // Exhaustive over honest commits: every rotated point stays inside the
  // certified codebook, so an eps/2 nudge cannot change any decode.
  const auto p = LatticeParams::create(3, 8);
  const double step = 2 * std::asin(p.eps_meas() / 4);
  for (const auto& a : box(3, 0, 7)) {
    const auto exact = binding_search_finite_precision(p, lattice::encode(p, a), Predicate::Lenient);
    const auto flip = best_flip_for_commit(p, a, Predicate::Lenient);
    REQUIRE(exact.nearest);
    CHECK(*exact.nearest == a);
    CHECK(exact.best_flip == flip.probability);
    for (double s : {step, -step}) {
      const Vec3d w = at_angle(p.basis().angle_of(a) + s);
      const auto near = binding_search_finite_precision(p, w, Predicate::Lenient);
      REQUIRE(near.nearest);
      CHECK(*near.nearest == a);
      CHECK(near.best_reveal[0] == exact.best_reveal[0]);
      CHECK(near.best_reveal[1] == exact.best_reveal[1]);
      CHECK(near.best_flip == exact.best_flip);
    }
  }
}

TEST_CASE("finite precision: edge codewords can differ from their nudges") {
  // (9,0,2) + e_1 = (10,0,2) is outside the codebook, and its angle lies
  // within eps_meas of the codeword (0,3,6): 10 sqrt2 ~ 3 sqrt3 + 4 sqrt5.
  const auto p = LatticeParams::create(3, 8);
  const LatticeCodeword edge{9, 0, 2};
  const double step = 2 * std::asin(p.eps_meas() / 4);
  const auto exact = binding_search_finite_precision(p, lattice::encode(p, edge), Predicate::Lenient);
  const auto nudged = binding_search_finite_precision(p, at_angle(p.basis().angle_of(edge) - step), Predicate::Lenient);
  REQUIRE(nudged.nearest);
  CHECK(*nudged.nearest == edge);
  const double virtual_angle = p.basis().angle_of(edge) + p.basis().angles()[0];
  const double gap = std::abs(virtual_angle - p.basis().angle_of(LatticeCodeword{0, 3, 6}));
  CHECK(2 * std::sin(gap / 2) > p.eps_meas());
  CHECK(2 * std::sin(gap / 2) < 2 * p.eps_meas());
  CHECK(exact.best_reveal[1] == Probability(1, 6));
  CHECK(nudged.best_reveal[1] == Probability(1, 3));
  CHECK(exact.best_flip == nudged.best_flip);
  CHECK(nudged.best_any <= Probability(1, 3));
}

TEST_CASE("finite precision: midway between neighbouring codewords gives 0") {
  const auto p = LatticeParams::create(3, 8);
  const auto& table = p.basis().table();
  for (std::size_t i = 0; i + 1 < table.size(); i += 37) {
    const Vec3d w = at_angle(0.5 * (table[i].angle + table[i + 1].angle));
    const auto r = binding_search_finite_precision(p, w, Predicate::Lenient);
    CHECK_FALSE(r.nearest);
    // Most midpoints stay off the codebook under every channel rotation.
    CHECK(r.best_any <= Probability(1, 3));
  }
}

TEST_CASE("finite precision: random sweep never beats 1/d") {
  const auto p = LatticeParams::create(3, 8);
  Rng rng(42);
  std::uniform_real_distribution<double> u(-0.2, 1.8);
  for (int i = 0; i < 100; ++i) {
    const auto r = binding_search_finite_precision(p, at_angle(u(rng)), Predicate::Lenient);
    CHECK(r.best_flip <= Probability(1, 3));
  }
}

TEST_CASE("finite precision: channel pre-images of codewords are accepted off the codebook") {
  // w sits where a point with one coordinate equal to -1 would be. It is
  // farther than eps_meas from every codeword, but the channel rotation by
  // theta_j (resp. 2 theta_j) carries it onto a codeword, so Bob decodes and
  // the reveal can pass.
  for (int d : {2, 3}) {
    const auto p = LatticeParams::create(d, 8);
    const auto& th = p.basis().angles();
    Eigen::VectorXi star = Eigen::VectorXi::Constant(d, 3);
    star[0] = 0;
    const LatticeCodeword a_star(star);
    const double angle = p.basis().angle_of(a_star) - th[0];
    const Vec3d w = at_angle(angle);
    CHECK(std::holds_alternative<Abort>(lattice::decode_commit(p, w)));
    double nearest = 1e9;
    for (const auto& e : p.basis().table()) nearest = std::min(nearest, (at_angle(e.angle) - w).norm());
    CHECK(nearest > p.eps_meas());

    const auto lenient = binding_search_finite_precision(p, w, Predicate::Lenient);
    const auto strict = binding_search_finite_precision(p, w, Predicate::Strict);
    CHECK_FALSE(lenient.nearest);
    CHECK(lenient.best_any == Probability(1, d));
    CHECK(strict.best_any == Probability(1, 2 * d));
    CHECK(lenient.best_reveal[a_star.parity()] == Probability(1, d));
    CHECK(lenient.best_reveal[1 - a_star.parity()] == Probability(1, 2 * d));
    CHECK(lenient.best_any <= Probability(1, d));

    // The same figure through the protocol engine.
    const auto mu = lattice::lattice_mu(p);
    Probability engine = 0;
    for (const auto& pt : enumerate_support(mu)) {
      auto alice = protocol::lattice_cheat_committer(p, w, a_star.parity(), a_star);
      auto bob = protocol::lattice_receiver(p);
      Rng rng(0);
      if (protocol::run_session_with_rotation(*alice, *bob, pt.rotation, rng).outcome.accepted()) {
        engine += pt.probability;
      }
    }
    CHECK(engine == Probability(1, d));
  }
}

TEST_CASE("reports: fixed key order and determinism") {
  const auto p = LatticeParams::create(2, 4);
  Report a, b;
  append_report(a, analyze_lattice(p, lattice::kDefaultEnumerationBudget, true, 5000, 7));
  append_report(b, analyze_lattice(p, lattice::kDefaultEnumerationBudget, true, 5000, 7));
  CHECK(a.str() == b.str());
  const auto& e = a.entries();
  std::vector<std::string> keys;
  for (const auto& [k, v] : e) keys.push_back(k);
  const auto pos = [&](const std::string& k) { return std::find(keys.begin(), keys.end(), k) - keys.begin(); };
  CHECK(pos("method") < pos("soundness"));
  CHECK(pos("soundness") < pos("concealing_exact"));
  CHECK(pos("concealing_exact") < pos("binding_flip_strict"));
  CHECK(pos("binding_flip_strict") < pos("binding_flip_lenient"));
  CHECK(a.find("concealing_exact") == "1/2 (0.5)");
  CHECK(a.find("concealing_total_variation") == "1/4 (0.25)");
  CHECK(a.find("binding_flip_lenient") == "1/2 (0.5)");
}

TEST_CASE("continuous cheat curve") {
  const auto grid = simple::default_alpha_grid();
  const auto rows = cheat_curve_continuous(grid, 10'000, 42);
  REQUIRE(rows.size() == 11);
  for (const auto& r : rows) {
    CHECK(r.agrees);
    CHECK(std::abs(r.exact_p0 + r.exact_p1 - 1.5) <= 1e-12);
  }
  CHECK(rows[5].exact_p0 == 0.75);
  CHECK(rows[5].exact_p1 == 0.75);
  CHECK(rows[0].exact_p0 == 1.0);
  CHECK(rows[0].exact_p1 == 0.5);
}
