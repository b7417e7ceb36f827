#include "framecommit/security.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>

#include "framecommit/protocol.hpp"
#include "framecommit/simple_schemes.hpp"

namespace framecommit::security {

namespace {

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
  std::uint64_t n = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && n > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= base;
  }
  return n;
}

/// Advances `c` through {lo..hi}^d; false after the last point.
bool next_point(std::vector<int>& c, int lo, int hi) {
  for (int& v : c) {
    if (v < hi) {
      ++v;
      return true;
    }
    v = lo;
  }
  return false;
}

LatticeCodeword to_codeword(const std::vector<int>& c) {
  return LatticeCodeword(Eigen::Map<const Eigen::VectorXi>(c.data(), static_cast<Eigen::Index>(c.size())));
}

/// Offsets delta in {-k..k}^d, as flat int vectors.
std::vector<std::vector<int>> offsets_within(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(d, -k);
  do {
    out.push_back(c);
  } while (next_point(c, -k, k));
  return out;
}

/// Coordinate values of {0..L+1} grouped by how they interact with reveal
/// offsets up to k and channel shifts 1, 2. One representative per class.
std::vector<int> coordinate_representatives(int L, int k) {
  std::vector<int> reps;
  std::set<std::vector<bool>> seen;
  for (int v = 0; v <= L + 1; ++v) {
    std::vector<bool> sig;
    for (int delta = -k; delta <= k; ++delta) sig.push_back(v + delta >= 0 && v + delta <= L - 1);
    for (int m = 1; m <= 2; ++m) sig.push_back(v + m <= L + 1);
    if (seen.insert(sig).second) reps.push_back(v);
  }
  return reps;
}

struct OffsetInfo {
  std::vector<int> delta;
  int nonzero = 0;
  int parity = 0;
  int linf = 0;
};

/// Accepting (j, m) outcomes out of 2d, for commit c and reveal c + delta.
/// The reveal must already be known to lie in {0..L-1}^d.
int accepting_outcomes(const std::vector<int>& c, const OffsetInfo& off, int L, Predicate predicate) {
  const int d = static_cast<int>(c.size());
  int hits = 0;
  for (int j = 0; j < d; ++j) {
    for (int m = 1; m <= 2; ++m) {
      if (c[j] + m > L + 1) continue;  // decoded point leaves the codebook
      // diff = m e_j - delta
      const int dj = off.delta[j];
      const int nonzero = off.nonzero - (dj != 0 ? 1 : 0) + (m != dj ? 1 : 0);
      if (nonzero == 0) {
        if (predicate == Predicate::Lenient) ++hits;
      } else if (nonzero == 1) {
        int value = 0;
        if (m != dj) {
          value = m - dj;
        } else {
          for (int i = 0; i < d; ++i) {
            if (i != j && off.delta[i] != 0) value = -off.delta[i];
          }
        }
        if (value == 1 || value == 2) ++hits;
      }
    }
  }
  return hits;
}

bool reveal_in_range(const std::vector<int>& c, const std::vector<int>& delta, int L) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int v = c[i] + delta[i];
    if (v < 0 || v > L - 1) return false;
  }
  return true;
}

std::vector<OffsetInfo> offset_table(int d, int k) {
  std::vector<OffsetInfo> out;
  for (auto& delta : offsets_within(d, k)) {
    OffsetInfo info;
    int sum = 0;
    for (int v : delta) {
      sum += v;
      info.nonzero += v != 0 ? 1 : 0;
      info.linf = std::max(info.linf, std::abs(v));
    }
    info.parity = ((sum % 2) + 2) % 2;
    info.delta = std::move(delta);
    out.push_back(std::move(info));
  }
  return out;
}

/// Commit points to search: the full codebook or one point per product of
/// coordinate classes.
std::vector<std::vector<int>> commit_points(const LatticeParams& params, const BindingSearchOptions& options,
                                            std::uint64_t offsets) {
  const int d = params.d();
  const int L = params.L();
  std::vector<int> values;
  if (options.exhaustive) {
    for (int v = 0; v <= L + 1; ++v) values.push_back(v);
  } else {
    values = coordinate_representatives(L, options.max_offset);
  }
  const std::uint64_t count = saturating_pow(values.size(), d);
  const std::uint64_t work = count > options.budget / std::max<std::uint64_t>(offsets, 1)
                                 ? std::numeric_limits<std::uint64_t>::max()
                                 : count * offsets;
  if (work > options.budget) {
    throw BudgetExceeded("binding search over " + std::to_string(count) + " commit points exceeds budget");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> idx(d, 0);
  const int last = static_cast<int>(values.size()) - 1;
  do {
    std::vector<int> c(d);
    for (int i = 0; i < d; ++i) c[i] = values[idx[i]];
    out.push_back(std::move(c));
  } while (next_point(idx, 0, last));
  return out;
}

std::vector<int> add(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

int parity_of(const std::vector<int>& c) {
  int s = 0;
  for (int v : c) s += v;
  return ((s % 2) + 2) % 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Concealing
// ---------------------------------------------------------------------------

Probability concealing_exact(const LatticeParams& params, std::uint64_t budget) {
  const int d = params.d();
  const int L = params.L();
  const std::uint64_t honest = saturating_pow(static_cast<std::uint64_t>(L), d);
  if (honest == std::numeric_limits<std::uint64_t>::max() || honest * 2 * d > budget) {
    throw BudgetExceeded("concealing enumeration of L^d * 2d points exceeds budget");
  }

  // counts[b][a'] = number of (a, j, m) with parity(a) = b and a + m e_j = a'.
  const std::uint64_t span = params.basis().codebook_size();
  std::vector<std::int64_t> counts[2] = {std::vector<std::int64_t>(span, 0), std::vector<std::int64_t>(span, 0)};
  std::int64_t class_size[2] = {0, 0};
  std::vector<std::uint64_t> stride(d, 1);
  for (int i = 1; i < d; ++i) stride[i] = stride[i - 1] * static_cast<std::uint64_t>(L + 2);

  std::vector<int> a(d, 0);
  do {
    const int b = parity_of(a);
    ++class_size[b];
    std::uint64_t base = 0;
    for (int i = 0; i < d; ++i) base += stride[i] * static_cast<std::uint64_t>(a[i]);
    for (int j = 0; j < d; ++j) {
      counts[b][base + stride[j]] += 1;
      counts[b][base + 2 * stride[j]] += 1;
    }
  } while (next_point(a, 0, L - 1));

  // P(a'|b) = counts[b][a'] / (2d N_b), so the distance has the common
  // denominator 2d N_0 N_1.
  std::int64_t numerator = 0;
  for (std::uint64_t k = 0; k < span; ++k) {
    numerator += std::abs(counts[0][k] * class_size[1] - counts[1][k] * class_size[0]);
  }
  return Probability(numerator, 2 * static_cast<std::int64_t>(d) * class_size[0] * class_size[1]);
}

Probability concealing_bound(int d, int L) {
  if (d < 1 || L < 2) throw InvalidArgument("concealing bound needs d >= 1 and L >= 2");
  const Probability ratio_inner(L - 1, L + 2);
  Probability power = 1;
  for (int i = 0; i < d; ++i) power *= ratio_inner;
  return 1 - power;
}

// ---------------------------------------------------------------------------
// Binding
// ---------------------------------------------------------------------------

Probability reveal_success(const LatticeParams& params, const LatticeCodeword& commit, int revealed_b,
                           const LatticeCodeword& revealed_a, Predicate predicate) {
  const int d = params.d();
  if (commit.dim() != d || !commit.in_range(0, params.L() + 1)) {
    throw InvalidArgument("commit point must lie in the codebook");
  }
  std::int64_t hits = 0;
  for (int j = 0; j < d; ++j) {
    for (int m = 1; m <= 2; ++m) {
      const LatticeCodeword decoded = commit + lattice::unit_offset(d, j, m);
      if (!decoded.in_range(0, params.L() + 1)) continue;
      if (lattice::verify_reveal(params, decoded, revealed_b, revealed_a, predicate) == Verdict::Accept) ++hits;
    }
  }
  return Probability(hits, 2 * static_cast<std::int64_t>(d));
}

namespace {

BindingResult search_flips(const LatticeParams& params, Predicate predicate,
                           const std::vector<std::vector<int>>& commits, int max_offset) {
  const int d = params.d();
  const int L = params.L();
  const auto offsets = offset_table(d, max_offset);

  int best = -1;
  int best_outer = 0;
  std::vector<int> best_commit;
  std::vector<int> best_reveal;
  for (const auto& c : commits) {
    for (const auto& off : offsets) {
      if (off.parity != 1) continue;
      if (!reveal_in_range(c, off.delta, L)) continue;
      const int hits = accepting_outcomes(c, off, L, predicate);
      if (hits > best) {
        best = hits;
        best_commit = c;
        best_reveal = add(c, off.delta);
      }
      if (off.linf == max_offset) best_outer = std::max(best_outer, hits);
    }
  }

  BindingResult r;
  r.commits_searched = commits.size();
  r.outer_shell = Probability(best_outer, 2 * static_cast<std::int64_t>(d));
  if (best < 0) {
    r.probability = 0;
    return r;
  }
  r.probability = Probability(best, 2 * static_cast<std::int64_t>(d));
  r.commit = to_codeword(best_commit);
  r.reveal = to_codeword(best_reveal);
  r.revealed_bit = r.reveal.parity();
  return r;
}

}  // namespace

BindingResult binding_search(const LatticeParams& params, Predicate predicate, const BindingSearchOptions& options) {
  if (options.max_offset < 1) throw InvalidArgument("max_offset must be at least 1");
  const std::uint64_t offsets = saturating_pow(static_cast<std::uint64_t>(2 * options.max_offset + 1), params.d());
  const auto commits = commit_points(params, options, offsets);
  return search_flips(params, predicate, commits, options.max_offset);
}

BindingResult best_flip_for_commit(const LatticeParams& params, const LatticeCodeword& commit, Predicate predicate,
                                   int max_offset) {
  if (commit.dim() != params.d() || !commit.in_range(0, params.L() + 1)) {
    throw InvalidArgument("commit point must lie in the codebook");
  }
  std::vector<int> c(commit.coords().data(), commit.coords().data() + commit.dim());
  return search_flips(params, predicate, {c}, max_offset);
}

Probability binding_sum_max(const LatticeParams& params, Predicate predicate, const BindingSearchOptions& options) {
  const int d = params.d();
  const int L = params.L();
  const auto offsets = offset_table(d, options.max_offset);
  const auto commits = commit_points(params, options, offsets.size());
  int best_sum = 0;
  for (const auto& c : commits) {
    int best[2] = {0, 0};
    for (const auto& off : offsets) {
      if (!reveal_in_range(c, off.delta, L)) continue;
      const int target = (parity_of(c) + off.parity) % 2;
      best[target] = std::max(best[target], accepting_outcomes(c, off, L, predicate));
    }
    best_sum = std::max(best_sum, best[0] + best[1]);
  }
  return Probability(best_sum, 2 * static_cast<std::int64_t>(d));
}

FinitePrecisionResult binding_search_finite_precision(const LatticeParams& params, const Vec3d& w,
                                                      Predicate predicate) {
  const int d = params.d();
  const int L = params.L();
  FinitePrecisionResult r;
  r.best_reveal[0] = 0;
  r.best_reveal[1] = 0;

  if (auto nearest = lattice::decode_commit(params, w); std::holds_alternative<LatticeCodeword>(nearest)) {
    r.nearest = std::get<LatticeCodeword>(nearest);
  }

  struct Outcome {
    std::optional<LatticeCodeword> decoded;
    Probability weight;
  };
  std::vector<Outcome> outcomes;
  for (const auto& pt : enumerate_support(lattice::lattice_mu(params))) {
    auto res = lattice::decode_commit(params, rotate(pt.rotation, w));
    Outcome o{std::nullopt, pt.probability};
    if (auto* a = std::get_if<LatticeCodeword>(&res)) o.decoded = *a;
    outcomes.push_back(std::move(o));
  }

  // Only reveals with decoded - reveal in {0, e_i, 2 e_i} can pass.
  std::vector<LatticeCodeword> candidates;
  for (const auto& o : outcomes) {
    if (!o.decoded) continue;
    candidates.push_back(*o.decoded);
    for (int i = 0; i < d; ++i) {
      for (int m = 1; m <= 2; ++m) candidates.push_back(*o.decoded - lattice::unit_offset(d, i, m));
    }
  }
  for (const auto& cand : candidates) {
    if (!cand.in_range(0, L - 1)) continue;
    Probability p = 0;
    for (const auto& o : outcomes) {
      if (o.decoded && lattice::verify_reveal(params, *o.decoded, cand.parity(), cand, predicate) == Verdict::Accept) {
        p += o.weight;
      }
    }
    auto& slot = r.best_reveal[cand.parity()];
    slot = std::max(slot, p);
  }
  r.best_any = std::max(r.best_reveal[0], r.best_reveal[1]);
  r.best_flip = r.nearest ? r.best_reveal[1 - r.nearest->parity()] : r.best_any;
  return r;
}

// ---------------------------------------------------------------------------
// Soundness
// ---------------------------------------------------------------------------

Probability lattice_soundness_exact(const LatticeParams& params, std::uint64_t budget) {
  const int d = params.d();
  const int L = params.L();
  const std::uint64_t honest = saturating_pow(static_cast<std::uint64_t>(L), d);
  if (honest == std::numeric_limits<std::uint64_t>::max() || honest * 2 * d > budget) {
    throw BudgetExceeded("soundness enumeration exceeds budget");
  }
  const auto support = enumerate_support(lattice::lattice_mu(params));
  Probability accepted[2] = {0, 0};
  std::int64_t class_size[2] = {0, 0};
  std::vector<int> a(d, 0);
  do {
    const LatticeCodeword secret = to_codeword(a);
    const int b = secret.parity();
    ++class_size[b];
    const Vec3d payload = lattice::encode(params, secret);
    for (const auto& pt : support) {
      auto decoded = lattice::decode_commit(params, rotate(pt.rotation, payload));
      if (const auto* ap = std::get_if<LatticeCodeword>(&decoded)) {
        if (lattice::verify_reveal(params, *ap, b, secret) == Verdict::Accept) accepted[b] += pt.probability;
      }
    }
  } while (next_point(a, 0, L - 1));
  return std::min(accepted[0] / class_size[0], accepted[1] / class_size[1]);
}

Estimate lattice_soundness_mc(const LatticeParams& params, std::uint64_t trials, std::uint64_t seed) {
  return monte_carlo(trials, seed, [&params](Rng& rng) {
    const int b = std::uniform_int_distribution<int>(0, 1)(rng);
    const auto t = protocol::run_session(protocol::lattice_protocol(params, b), rng);
    return t.outcome.bit() == b;
  });
}

Estimate lattice_cheat_mc(const LatticeParams& params, const LatticeCodeword& commit, int revealed_b,
                          const LatticeCodeword& reveal, std::uint64_t trials, std::uint64_t seed) {
  const Vec3d payload = lattice::encode(params, commit);
  const Distribution mu = lattice::lattice_mu(params);
  return monte_carlo(trials, seed, [&](Rng& rng) {
    auto alice = protocol::lattice_cheat_committer(params, payload, revealed_b, reveal);
    auto bob = protocol::lattice_receiver(params);
    return protocol::run_session(*alice, *bob, mu, rng).outcome.bit() == revealed_b;
  });
}

Estimate four_symbol_soundness_mc(std::uint64_t trials, std::uint64_t seed) {
  return monte_carlo(trials, seed, [](Rng& rng) {
    const simple::FourSymbolCodeword c{std::uniform_int_distribution<int>(0, 1)(rng),
                                       std::uniform_int_distribution<int>(0, 1)(rng)};
    return protocol::run_session(protocol::four_symbol_protocol(c), rng).outcome.bit() == c.b;
  });
}

Estimate four_symbol_flip_mc(std::uint64_t trials, std::uint64_t seed) {
  // Commit C_{0,0} (symbol 0), reveal C_{1,1} (symbol 3): accepted when the
  // channel leaves the symbol unchanged.
  const auto revealed = simple::FourSymbolCodeword::from_symbol(3);
  const Distribution mu = simple::four_symbol_rotation_mu();
  return monte_carlo(trials, seed, [&](Rng& rng) {
    auto alice = protocol::four_symbol_cheat_committer(0, revealed);
    auto bob = protocol::four_symbol_receiver();
    return protocol::run_session(*alice, *bob, mu, rng).outcome.bit() == revealed.b;
  });
}

// ---------------------------------------------------------------------------
// Continuous
// ---------------------------------------------------------------------------

std::vector<ContinuousCheatRow> cheat_curve_continuous(std::span<const double> alphas, std::uint64_t trials,
                                                       std::uint64_t seed) {
  std::vector<ContinuousCheatRow> rows;
  const Distribution mu = simple::continuous_mu();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const simple::InterpolationStrategy s(alphas[i]);
    ContinuousCheatRow row;
    row.alpha = s.alpha();
    row.exact_p0 = s.accept_zero();
    row.exact_p1 = s.accept_one();
    if (trials > 0) {
      auto estimate = [&](int b) {
        return monte_carlo(trials, seed + 2 * i + static_cast<std::uint64_t>(b), [&](Rng& rng) {
          auto alice = protocol::interpolation_committer(s, b);
          auto bob = protocol::continuous_receiver();
          return protocol::run_session(*alice, *bob, mu, rng).outcome.bit() == b;
        });
      };
      row.mc_p0 = estimate(0);
      row.mc_p1 = estimate(1);
      row.agrees = row.mc_p0->agrees_with(row.exact_p0, 3.0) && row.mc_p1->agrees_with(row.exact_p1, 3.0);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

SecurityReport analyze_lattice(const LatticeParams& params, std::uint64_t budget, bool monte_carlo_too,
                               std::uint64_t trials, std::uint64_t seed) {
  SecurityReport r;
  r.protocol = "lattice";
  r.method = monte_carlo_too ? "exact+monte-carlo" : "exact";
  r.soundness = lattice_soundness_exact(params, budget);
  r.concealing_exact = concealing_exact(params, budget);
  r.concealing_bound = concealing_bound(params.d(), params.L());
  r.concealing_within_bound = *r.concealing_exact <= *r.concealing_bound;
  const auto strict = binding_search(params, Predicate::Strict);
  const auto lenient = binding_search(params, Predicate::Lenient);
  r.binding_flip_strict = strict.probability;
  r.binding_flip_lenient = lenient.probability;
  r.binding_sum_max = binding_sum_max(params, params.predicate());
  const auto& active = params.predicate() == Predicate::Strict ? strict : lenient;
  r.binding_witness = "commit " + active.commit.to_string() + " reveal " + active.reveal.to_string() + " bit " +
                      std::to_string(active.revealed_bit);
  if (monte_carlo_too) {
    r.soundness_mc = lattice_soundness_mc(params, trials, seed);
    r.binding_mc = lattice_cheat_mc(params, active.commit, active.revealed_bit, active.reveal, trials, seed + 1);
  }
  return r;
}

SecurityReport analyze_four_symbol(bool monte_carlo_too, std::uint64_t trials, std::uint64_t seed) {
  const auto a = simple::analyze_four_symbol();
  SecurityReport r;
  r.protocol = "four-symbol";
  r.method = monte_carlo_too ? "exact+monte-carlo" : "exact";
  r.soundness = a.soundness;
  r.concealing_exact = a.concealing;
  r.binding_flip_strict = a.flip_cheat;
  r.binding_flip_lenient = a.flip_cheat;
  r.binding_sum_max = a.sum_cheat;
  r.binding_witness = "commit symbol 0 reveal symbol 3";
  if (monte_carlo_too) {
    r.soundness_mc = four_symbol_soundness_mc(trials, seed);
    r.binding_mc = four_symbol_flip_mc(trials, seed + 1);
  }
  return r;
}

namespace {

void add_estimate(Report& out, const std::string& key, const Estimate& e) {
  out.add(key + "_mc", e.mean);
  out.add(key + "_mc_successes", e.successes);
  out.add(key + "_mc_trials", e.trials);
  out.add(key + "_mc_wilson99_low", e.lower);
  out.add(key + "_mc_wilson99_high", e.upper);
}

}  // namespace

void append_report(Report& out, const SecurityReport& r) {
  out.add("method", r.method);
  if (r.soundness) out.add("soundness", *r.soundness);
  if (r.soundness_mc) add_estimate(out, "soundness", *r.soundness_mc);
  if (r.concealing_exact) {
    out.add("concealing_exact", *r.concealing_exact);
    out.add("concealing_total_variation", Probability(*r.concealing_exact / 2));
  }
  if (r.concealing_bound) out.add("concealing_bound", *r.concealing_bound);
  if (r.concealing_within_bound) out.add("concealing_within_bound", *r.concealing_within_bound);
  if (r.binding_flip_strict) out.add("binding_flip_strict", *r.binding_flip_strict);
  if (r.binding_flip_lenient) out.add("binding_flip_lenient", *r.binding_flip_lenient);
  if (r.binding_sum_max) out.add("binding_sum_max", *r.binding_sum_max);
  if (r.binding_witness) out.add("binding_witness", *r.binding_witness);
  if (r.binding_mc) add_estimate(out, "binding_flip", *r.binding_mc);
}

}  // namespace framecommit::security
