#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "framecommit/cli.hpp"
#include "framecommit/protocol.hpp"
#include "framecommit/security.hpp"
#include "framecommit/simple_schemes.hpp"

namespace framecommit::cli {

namespace {

constexpr double kMomentTolerance = 0.02;

/// Writes the text to the configured file, or to `out`.
int emit(const ExperimentConfig& config, const std::string& text, std::ostream& out, std::ostream& err) {
  if (config.output.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream file(config.output, std::ios::binary);
  if (!file) {
    err << "error: cannot open output file '" << config.output << "'\n";
    return kExitInvalidConfig;
  }
  file << text;
  return kExitOk;
}

/// Maps the library's exception types onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << " (raise " << kBudgetEnvVar << " to allow it)\n";
    return kExitBudgetExceeded;
  } catch (const CertificationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_decimal_string(v[i]);
  return s;
}

std::vector<int> or_default(const std::vector<int>& v, std::vector<int> fallback) {
  return v.empty() ? fallback : v;
}

lattice::LatticeParams lattice_params(const ExperimentConfig& c) {
  return lattice::LatticeParams::create(c.d, c.L, c.eps, c.predicate, c.budget);
}

Distribution parse_group(const std::string& group) {
  if (group == "haar") return Distribution::haar();
  if (group == "mixture") {
    // The two-point angle mixture over the default lattice basis; not a group.
    return lattice::lattice_mu(lattice::LatticeParams::create(3, 8));
  }
  if (group.size() >= 2 && group[0] == 'z') {
    char* end = nullptr;
    const long n = std::strtol(group.c_str() + 1, &end, 10);
    if (*end == '\0' && n >= 1 && n <= 1'000'000) return Distribution::cyclic_z(static_cast<int>(n));
  }
  throw InvalidArgument("unknown group '" + group + "' (expected zN with N >= 1, haar)");
}

void add_estimate(Report& r, const std::string& key, const Estimate& e) {
  r.add(key, e.mean);
  r.add(key + "_successes", e.successes);
  r.add(key + "_trials", e.trials);
  r.add(key + "_wilson99_low", e.lower);
  r.add(key + "_wilson99_high", e.upper);
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Exact:
      return "exact";
    case Mode::MonteCarlo:
      return "monte-carlo";
    default:
      return "both";
  }
}

Mode parse_mode(const std::string& text) {
  if (text == "exact") return Mode::Exact;
  if (text == "monte-carlo") return Mode::MonteCarlo;
  if (text == "both") return Mode::Both;
  throw InvalidArgument("unknown mode '" + text + "' (expected exact|monte-carlo|both)");
}

void validate(const ExperimentConfig& c) {
  if (c.protocol != "lattice" && c.protocol != "four-symbol" && c.protocol != "continuous") {
    throw InvalidArgument("unknown protocol '" + c.protocol + "' (expected lattice|four-symbol|continuous)");
  }
  if (c.d < 1) throw InvalidArgument("--d must be at least 1");
  if (c.L < 2) throw InvalidArgument("--L must be at least 2");
  if (c.eps && !(*c.eps >= 0.0)) throw InvalidArgument("--eps must be nonnegative");
  if (c.alpha && !(*c.alpha >= 0.0 && *c.alpha <= 1.0)) throw InvalidArgument("--alpha must lie in [0, 1]");
  if (c.trials < 1) throw InvalidArgument("--trials must be at least 1");
  if (c.samples < 1) throw InvalidArgument("--samples must be at least 1");
  for (int d : c.d_grid) {
    if (d < 1) throw InvalidArgument("--d-grid entries must be at least 1");
  }
  for (int L : c.L_grid) {
    if (L < 2) throw InvalidArgument("--L-grid entries must be at least 2");
  }
  for (double a : c.alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("--alpha-grid entries must lie in [0, 1]");
  }
}

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* raw = std::getenv(kBudgetEnvVar);
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0' || v == 0) {
    throw InvalidArgument(std::string(kBudgetEnvVar) + " must be a positive integer, got '" + raw + "'");
  }
  return v;
}

void echo_config(Report& r, const ExperimentConfig& c) {
  r.add("tool", "framecommit");
  r.add("command", c.command);
  r.add("protocol", c.protocol);
  r.add("d", c.d);
  r.add("L", c.L);
  r.add("eps_meas", c.eps ? to_decimal_string(*c.eps) : std::string("default (max_safe_eps/4)"));
  r.add("predicate", lattice::to_string(c.predicate));
  r.add("alpha", c.alpha ? to_decimal_string(*c.alpha) : std::string("unset"));
  r.add("group", c.group);
  r.add("trials", c.trials);
  r.add("samples", c.samples);
  r.add("seed", std::to_string(c.seed) + (c.seed_defaulted ? " (default)" : ""));
  r.add("mode", to_string(c.mode));
  r.add("d_grid", join_ints(c.d_grid));
  r.add("L_grid", join_ints(c.L_grid));
  r.add("alpha_grid", join_doubles(c.alpha_grid));
  r.add("enumeration_budget", c.budget);
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    validate(config);
    Report r;
    echo_config(r, config);
    const bool mc = config.mode != Mode::Exact;
    const bool exact = config.mode != Mode::MonteCarlo;

    if (config.protocol == "lattice") {
      const auto params = lattice_params(config);
      r.section("codebook");
      r.add("theta", join_doubles(params.basis().angles()));
      r.add("min_gap", params.basis().min_gap());
      r.add("max_safe_eps", params.basis().max_safe_eps());
      r.add("eps_meas_resolved", params.eps_meas());
      r.add("separation_certified", true);
      r.section("security");
      if (exact) {
        const auto report = security::analyze_lattice(params, config.budget, mc, config.trials, config.seed);
        security::append_report(r, report);
        r.add("concealing_values", "implementation-derived by exact enumeration");
        r.add("predicate_note", "strict rejects a zero decoded-minus-revealed difference; lenient accepts it");
      } else {
        add_estimate(r, "soundness_mc", security::lattice_soundness_mc(params, config.trials, config.seed));
      }
    } else if (config.protocol == "four-symbol") {
      r.section("security");
      const auto analysis = simple::analyze_four_symbol();
      if (exact) {
        security::append_report(r, security::analyze_four_symbol(mc, config.trials, config.seed));
        r.add("rotation_realization_exact", analysis.rotation_realization_exact);
      } else {
        add_estimate(r, "soundness_mc", security::four_symbol_soundness_mc(config.trials, config.seed));
        add_estimate(r, "binding_flip_mc", security::four_symbol_flip_mc(config.trials, config.seed + 1));
      }
    } else {
      const double alpha = config.alpha.value_or(0.5);
      const simple::InterpolationStrategy s(alpha);
      r.section("security");
      r.add("method", mc ? (exact ? "exact+monte-carlo" : "monte-carlo") : "exact");
      r.add("alpha_resolved", alpha);
      if (exact) {
        r.add("soundness", simple::continuous_accept_probability(simple::codeword_angle(0), 0));
        r.add("concealing_exact", "0 (acceptance arcs of honest codewords are congruent)");
        r.add("p_accept_0", s.accept_zero());
        r.add("p_accept_1", s.accept_one());
        r.add("p_accept_0_arc", simple::continuous_accept_probability(s.sent_angle(), 0));
        r.add("p_accept_1_arc", simple::continuous_accept_probability(s.sent_angle(), 1));
        r.add("p_sum", s.accept_zero() + s.accept_one());
        r.add("passive_cheat", simple::continuous_accept_probability(simple::codeword_angle(0), 1));
      }
      if (mc) {
        const double grid[1] = {alpha};
        const auto rows = security::cheat_curve_continuous(grid, config.trials, config.seed);
        add_estimate(r, "p_accept_0_mc", *rows[0].mc_p0);
        add_estimate(r, "p_accept_1_mc", *rows[0].mc_p1);
        r.add("mc_within_3sigma", rows[0].agrees);
      }
    }
    return emit(config, r.str(), out, err);
  });
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    validate(config);
    Report r;
    echo_config(r, config);
    r.section("monte-carlo");
    int code = kExitOk;
    if (config.protocol == "lattice") {
      const auto params = lattice_params(config);
      r.add("eps_meas_resolved", params.eps_meas());
      add_estimate(r, "soundness", security::lattice_soundness_mc(params, config.trials, config.seed));
      const auto witness = security::binding_search(params, params.predicate());
      r.add("binding_strategy", "commit " + witness.commit.to_string() + " reveal " + witness.reveal.to_string());
      r.add("binding_flip_exact", witness.probability);
      const auto est = security::lattice_cheat_mc(params, witness.commit, witness.revealed_bit, witness.reveal,
                                                  config.trials, config.seed + 1);
      add_estimate(r, "binding_flip", est);
      r.add("binding_flip_within_3sigma", est.agrees_with(to_double(witness.probability), 3.0));
    } else if (config.protocol == "four-symbol") {
      add_estimate(r, "soundness", security::four_symbol_soundness_mc(config.trials, config.seed));
      const auto est = security::four_symbol_flip_mc(config.trials, config.seed + 1);
      add_estimate(r, "binding_flip", est);
      r.add("binding_flip_within_3sigma", est.agrees_with(0.5, 3.0));
    } else {
      const std::vector<double> grid =
          config.alpha ? std::vector<double>{*config.alpha}
                       : (config.alpha_grid.empty() ? simple::default_alpha_grid() : config.alpha_grid);
      const auto rows = security::cheat_curve_continuous(grid, config.trials, config.seed);
      bool all = true;
      for (const auto& row : rows) {
        const std::string k = "alpha=" + to_decimal_string(row.alpha);
        r.add(k + " p0_exact", row.exact_p0);
        r.add(k + " p0_mc", row.mc_p0->mean);
        r.add(k + " p1_exact", row.exact_p1);
        r.add(k + " p1_mc", row.mc_p1->mean);
        r.add(k + " within_3sigma", row.agrees);
        all = all && row.agrees;
      }
      r.add("all_within_3sigma", all);
    }
    const int written = emit(config, r.str(), out, err);
    return written != kExitOk ? written : code;
  });
}

// ---------------------------------------------------------------------------
// twirl-check
// ---------------------------------------------------------------------------

int cmd_twirl_check(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    validate(config);
    const Distribution group = parse_group(config.group);
    if (!group.is_uniform_group()) throw InvalidArgument("not a uniform group distribution");

    Report r;
    echo_config(r, config);
    r.section("twirl");
    r.add("group_resolved", group.name());
    bool pass = true;

    if (group.is_finite()) {
      r.add("method", "exact enumeration over G and G x G");
      const bool frames = protocol::relative_frame_distribution(group) == protocol::frame_distribution(group);
      r.add("relative_frame_uniform", frames);
      pass = pass && frames;

      std::vector<protocol::Protocol> cases = {protocol::probe_protocol(group)};
      for (int s = 0; s < 4; ++s) {
        auto p = protocol::four_symbol_protocol(simple::FourSymbolCodeword::from_symbol(s));
        p.channel = group;
        cases.push_back(p);
      }
      {
        const auto params = lattice::LatticeParams::create(2, 4);
        auto p = protocol::lattice_protocol(params, 1);
        p.alice = [params] { return protocol::lattice_fixed_committer(params, {1, 2}); };
        p.channel = group;
        cases.push_back(p);
      }
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& p = cases[i];
        const std::string k = "case_" + std::to_string(i) + "_" + p.name;
        const bool both = protocol::exact_distribution(p) == protocol::exact_compiled_distribution(p, group);
        const bool one_sided =
            protocol::exact_distribution(p, protocol::ViewKey::BobOnly) ==
            protocol::exact_compiled_distribution(p, group, protocol::ViewKey::BobOnly, protocol::TwirlSides::AliceOnly);
        r.add(k + " transcript_law_equal", both);
        r.add(k + " alice_only_twirl_equal", one_sided);
        pass = pass && both && one_sided;
      }
    } else {
      r.add("method", "moments of Bob's first received vector");
      const auto base = protocol::probe_protocol(group);
      const auto compiled = protocol::twirl_compile(base, group);
      const Eigen::Matrix3d third = Eigen::Matrix3d::Identity() / 3.0;
      auto check = [&](const std::string& key, const protocol::Protocol& p, std::uint64_t seed) {
        const auto m = protocol::received_moments(p, config.samples, seed);
        const double mean_dev = m.mean.cwiseAbs().maxCoeff();
        const double cov_dev = (m.covariance - third).cwiseAbs().maxCoeff();
        r.add(key + " mean_max_abs", mean_dev);
        r.add(key + " covariance_max_abs_dev", cov_dev);
        const bool ok = mean_dev < kMomentTolerance && cov_dev < kMomentTolerance;
        r.add(key + " pass", ok);
        return ok;
      };
      const bool a = check("channel", base, config.seed);
      const bool b = check("compiled", compiled, config.seed + 1);
      r.add("tolerance", kMomentTolerance);
      pass = a && b;
    }
    r.add("verdict", pass ? "pass" : "fail");
    const int written = emit(config, r.str(), out, err);
    if (written != kExitOk) return written;
    return pass ? kExitOk : kExitCheckFailed;
  });
}

// ---------------------------------------------------------------------------
// mingap
// ---------------------------------------------------------------------------

int cmd_mingap(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    validate(config);
    const auto basis = lattice::build_angle_basis(config.d, config.L, config.budget);
    const double safe = basis.max_safe_eps();
    const double eps = config.eps.value_or(safe / 4.0);
    const bool pass = safe > eps;

    Report r;
    echo_config(r, config);
    r.section("certification");
    r.add("codebook_points", basis.codebook_size());
    r.add("theta", join_doubles(basis.angles()));
    r.add("scale", basis.scale());
    r.add("min_gap", basis.min_gap());
    r.add("min_chord", 2.0 * safe);
    r.add("max_safe_eps", safe);
    r.add("eps_meas_resolved", eps);
    r.add("verdict", pass ? "pass" : "fail");
    const int written = emit(config, r.str(), out, err);
    if (written != kExitOk) return written;
    if (!pass) err << "error: 2*eps_meas is not below the minimum codeword chord\n";
    return pass ? kExitOk : kExitCheckFailed;
  });
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    validate(config);
    Report header;
    echo_config(header, config);
    std::ostringstream os;
    for (const auto& [k, v] : header.entries()) os << "# " << k << ": " << v << '\n';

    if (config.protocol == "lattice") {
      Table table({"d", "L", "min_gap", "max_safe_eps", "concealing_exact", "concealing_decimal", "concealing_bound",
                   "within_bound", "binding_strict", "binding_lenient"},
                  config.delimiter);
      for (int d : or_default(config.d_grid, {1, 2, 3})) {
        for (int L : or_default(config.L_grid, {4, 8, 16})) {
          const auto params = lattice::LatticeParams::create(d, L, std::nullopt, config.predicate, config.budget);
          const auto eps_exact = security::concealing_exact(params, config.budget);
          const auto bound = security::concealing_bound(d, L);
          table.add_row({std::to_string(d), std::to_string(L), to_decimal_string(params.basis().min_gap()),
                         to_decimal_string(params.basis().max_safe_eps()), to_fraction_string(eps_exact),
                         to_decimal_string(to_double(eps_exact)), to_decimal_string(to_double(bound)),
                         eps_exact <= bound ? "true" : "false",
                         to_fraction_string(security::binding_search(params, lattice::Predicate::Strict).probability),
                         to_fraction_string(security::binding_search(params, lattice::Predicate::Lenient).probability)});
        }
      }
      table.write(os);
    } else if (config.protocol == "continuous") {
      const auto grid = config.alpha_grid.empty() ? simple::default_alpha_grid() : config.alpha_grid;
      const bool mc = config.mode != Mode::Exact;
      std::vector<std::string> cols = {"alpha", "p_accept_0", "p_accept_1", "p_sum"};
      if (mc) cols.insert(cols.end(), {"p_accept_0_mc", "p_accept_1_mc", "within_3sigma"});
      Table table(cols, config.delimiter);
      for (const auto& row : security::cheat_curve_continuous(grid, mc ? config.trials : 0, config.seed)) {
        std::vector<std::string> cells = {to_decimal_string(row.alpha), to_decimal_string(row.exact_p0),
                                          to_decimal_string(row.exact_p1),
                                          to_decimal_string(row.exact_p0 + row.exact_p1)};
        if (mc) {
          cells.push_back(to_decimal_string(row.mc_p0->mean));
          cells.push_back(to_decimal_string(row.mc_p1->mean));
          cells.push_back(row.agrees ? "true" : "false");
        }
        table.add_row(std::move(cells));
      }
      table.write(os);
    } else {
      const auto a = simple::analyze_four_symbol();
      Table table({"soundness", "concealing", "flip_cheat", "sum_cheat"}, config.delimiter);
      table.add_row({to_fraction_string(a.soundness), to_fraction_string(a.concealing),
                     to_fraction_string(a.flip_cheat), to_fraction_string(a.sum_cheat)});
      table.write(os);
    }
    return emit(config, os.str(), out, err);
  });
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit commitment over misaligned reference frames: exact analysis and simulation"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string predicate = "lenient";
  std::string mode;
  std::string delimiter = ",";
  std::uint64_t seed = 42;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--protocol", config.protocol, "lattice | four-symbol | continuous");
    sub->add_option("--d", config.d, "lattice dimension");
    sub->add_option("--L", config.L, "lattice side length");
    sub->add_option("--eps", config.eps, "measurement precision eps_meas");
    sub->add_option("--predicate", predicate, "strict | lenient");
    sub->add_option("--alpha", config.alpha, "interpolation parameter in [0, 1]");
    sub->add_option("--trials", config.trials, "Monte Carlo trials");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("-o,--output", config.output, "write the report to this file");
    sub->add_option("--mode", mode, "exact | monte-carlo | both");
  };

  auto* analyze = app.add_subcommand("analyze", "exact security figures");
  common(analyze);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  common(simulate);
  auto* twirl = app.add_subcommand("twirl-check", "check the twirl compiler against the group channel");
  common(twirl);
  twirl->add_option("--group", config.group, "zN | haar");
  twirl->add_option("--samples", config.samples, "Haar samples");
  auto* mingap = app.add_subcommand("mingap", "certify codebook separation");
  common(mingap);
  auto* sweep = app.add_subcommand("sweep", "grid over d / L / alpha as a delimited table");
  common(sweep);
  sweep->add_option("--d-grid", config.d_grid, "d values")->delimiter(',');
  sweep->add_option("--L-grid", config.L_grid, "L values")->delimiter(',');
  sweep->add_option("--alpha-grid", config.alpha_grid, "alpha values")->delimiter(',');
  sweep->add_option("--delimiter", delimiter, "column delimiter (one character)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  return guarded(err, [&]() -> int {
    config.predicate = lattice::parse_predicate(predicate);
    config.budget = budget_from_env();
    config.seed_defaulted = seed == 42 && app.get_subcommands().front()->count("--seed") == 0;
    config.seed = seed;
    if (delimiter == "tab" || delimiter == "\\t") delimiter = "\t";
    if (delimiter.size() != 1) throw InvalidArgument("--delimiter must be a single character or 'tab'");
    config.delimiter = delimiter[0];

    if (analyze->parsed()) {
      config.command = "analyze";
      config.mode = mode.empty() ? Mode::Exact : parse_mode(mode);
      return cmd_analyze(config, out, err);
    }
    if (simulate->parsed()) {
      config.command = "simulate";
      config.mode = mode.empty() ? Mode::MonteCarlo : parse_mode(mode);
      return cmd_simulate(config, out, err);
    }
    if (twirl->parsed()) {
      config.command = "twirl-check";
      config.mode = mode.empty() ? Mode::Exact : parse_mode(mode);
      return cmd_twirl_check(config, out, err);
    }
    if (mingap->parsed()) {
      config.command = "mingap";
      config.mode = mode.empty() ? Mode::Exact : parse_mode(mode);
      return cmd_mingap(config, out, err);
    }
    config.command = "sweep";
    config.mode = mode.empty() ? Mode::Exact : parse_mode(mode);
    return cmd_sweep(config, out, err);
  });
}

}  // namespace framecommit::cli
