#include "framecommit/protocol.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace framecommit::protocol {

std::optional<int> ProtocolOutcome::bit() const {
  if (const auto* a = std::get_if<Accepted>(&verdict)) return a->bit;
  return std::nullopt;
}

std::string ProtocolOutcome::to_string() const {
  if (const auto* a = std::get_if<Accepted>(&verdict)) return "accepted " + std::to_string(a->bit);
  return "aborted " + std::get<Aborted>(verdict).reason;
}

// ---------------------------------------------------------------------------
// Session loop
// ---------------------------------------------------------------------------

Transcript run_session_with_rotation(Party& alice, Party& bob, const Rotationd& rotation, Rng& rng) {
  Transcript t;
  t.rotation = rotation;
  const Rotationd inverse = rotation.inverse();

  Party* parties[2] = {&alice, &bob};
  View* views[2] = {&t.alice_view, &t.bob_view};
  int current = 0;
  int idle_turns = 0;
  bool sent_this_turn = false;

  for (int step = 0;; ++step) {
    if (step >= kMaxSessionSteps) {
      t.outcome = ProtocolOutcome::abort("step limit reached");
      break;
    }
    Action action;
    try {
      action = parties[current]->act(*views[current], rng);
    } catch (const std::exception& e) {
      t.outcome = ProtocolOutcome::abort(std::string("strategy error: ") + e.what());
      break;
    }

    if (auto* send = std::get_if<Send>(&action)) {
      const Direction dir = current == 0 ? Direction::AliceToBob : Direction::BobToAlice;
      Message sent{dir, send->payload};
      Message received = sent;
      if (sent.is_vector()) {
        received.payload = Vec3d(current == 0 ? rotate(rotation, sent.vector()) : rotate(inverse, sent.vector()));
      }
      views[current]->push_back(std::move(sent));
      views[1 - current]->push_back(std::move(received));
      sent_this_turn = true;
    } else if (std::holds_alternative<Yield>(action)) {
      idle_turns = sent_this_turn ? 0 : idle_turns + 1;
      if (idle_turns >= 2) {
        t.outcome = ProtocolOutcome::abort("deadlock: both parties yielded without sending");
        break;
      }
      sent_this_turn = false;
      current = 1 - current;
    } else {
      t.outcome = std::get<Decide>(action).outcome;
      break;
    }
  }
  return t;
}

Transcript run_session(Party& alice, Party& bob, const Distribution& mu, Rng& rng) {
  const Rotationd r = sample(mu, rng);
  Transcript t = run_session_with_rotation(alice, bob, r, rng);
  t.channel = mu.name();
  return t;
}

Transcript run_session(const Protocol& protocol, Rng& rng) {
  auto alice = protocol.alice();
  auto bob = protocol.bob();
  Transcript t = run_session(*alice, *bob, protocol.channel, rng);
  t.protocol = protocol.name;
  return t;
}

// ---------------------------------------------------------------------------
// Committer / receiver
// ---------------------------------------------------------------------------

Action Committer::act(const View&, Rng& rng) {
  switch (phase_) {
    case 0:
      plan_ = plan_fn_(rng);
      phase_ = 1;
      return Send{plan_->payload};
    case 1:
      phase_ = 2;
      return Yield{};
    case 2:
      phase_ = 3;
      return Send{plan_->reveal};
    default:
      return Yield{};
  }
}

Action Receiver::act(const View& view, Rng&) {
  std::vector<const Message*> incoming;
  for (const auto& m : view) {
    if (m.direction == Direction::AliceToBob) incoming.push_back(&m);
  }
  if (incoming.empty()) return Yield{};
  if (!incoming[0]->is_vector()) return Decide{ProtocolOutcome::abort("expected a commit vector")};
  const Vec3d& commit = incoming[0]->vector();
  if (incoming.size() == 1) {
    if (auto reason = precheck_(commit)) return Decide{ProtocolOutcome::abort(*reason)};
    return Yield{};
  }
  if (incoming[1]->is_vector()) return Decide{ProtocolOutcome::abort("expected a classical reveal")};
  return Decide{decide_(commit, incoming[1]->classical())};
}

Classical lattice_reveal(int b, const lattice::LatticeCodeword& a) {
  Classical c{"reveal", {b}};
  for (int i = 0; i < a.dim(); ++i) c.values.push_back(a[i]);
  return c;
}

std::unique_ptr<Party> lattice_committer(const lattice::LatticeParams& params, int b) {
  return std::make_unique<Committer>("honest", [params, b](Rng& rng) {
    auto c = lattice::commit(params, b, rng);
    return CommitPlan{c.payload, lattice_reveal(b, c.secret)};
  });
}

std::unique_ptr<Party> lattice_fixed_committer(const lattice::LatticeParams& params,
                                               const lattice::LatticeCodeword& secret) {
  const CommitPlan plan{lattice::encode(params, secret), lattice_reveal(secret.parity(), secret)};
  return std::make_unique<Committer>("honest", [plan](Rng&) { return plan; });
}

std::unique_ptr<Party> lattice_cheat_committer(const lattice::LatticeParams&, const Vec3d& payload,
                                               int revealed_b, const lattice::LatticeCodeword& revealed_a) {
  const CommitPlan plan{payload, lattice_reveal(revealed_b, revealed_a)};
  return std::make_unique<Committer>("adversarial:scripted-reveal", [plan](Rng&) { return plan; });
}

std::unique_ptr<Party> lattice_receiver(const lattice::LatticeParams& params) {
  auto precheck = [params](const Vec3d& v) -> std::optional<std::string> {
    auto decoded = lattice::decode_commit(params, v);
    if (const auto* abort = std::get_if<Abort>(&decoded)) return abort->reason;
    return std::nullopt;
  };
  auto decide = [params](const Vec3d& v, const Classical& reveal) {
    auto decoded = lattice::decode_commit(params, v);
    if (const auto* abort = std::get_if<Abort>(&decoded)) return ProtocolOutcome::abort(abort->reason);
    if (reveal.values.size() != static_cast<std::size_t>(params.d()) + 1) {
      return ProtocolOutcome::abort("malformed reveal");
    }
    const int b = static_cast<int>(reveal.values[0]);
    Eigen::VectorXi a(params.d());
    for (int i = 0; i < params.d(); ++i) a[i] = static_cast<int>(reveal.values[i + 1]);
    const auto verdict = lattice::verify_reveal(params, std::get<lattice::LatticeCodeword>(decoded), b,
                                                lattice::LatticeCodeword(a));
    return verdict == Verdict::Accept ? ProtocolOutcome::accept(b)
                                      : ProtocolOutcome::abort("reveal rejected");
  };
  return std::make_unique<Receiver>(precheck, decide);
}

Protocol lattice_protocol(const lattice::LatticeParams& params, int b) {
  return {"lattice", lattice::lattice_mu(params), [params, b] { return lattice_committer(params, b); },
          [params] { return lattice_receiver(params); }};
}

namespace {

Classical four_symbol_reveal(const simple::FourSymbolCodeword& c) { return {"reveal", {c.a, c.b}}; }

std::unique_ptr<Party> scripted(std::string strategy, CommitPlan plan) {
  return std::make_unique<Committer>(std::move(strategy), [plan](Rng&) { return plan; });
}

}  // namespace

std::unique_ptr<Party> four_symbol_committer(const simple::FourSymbolCodeword& c) {
  return scripted("honest", {simple::four_symbol_vector(c.symbol()), four_symbol_reveal(c)});
}

std::unique_ptr<Party> four_symbol_cheat_committer(int sent_symbol, const simple::FourSymbolCodeword& revealed) {
  return scripted("adversarial:scripted-reveal",
                  {simple::four_symbol_vector(sent_symbol), four_symbol_reveal(revealed)});
}

std::unique_ptr<Party> four_symbol_receiver() {
  auto precheck = [](const Vec3d& v) -> std::optional<std::string> {
    if (!simple::four_symbol_from_vector(v)) return std::string("received vector is not a symbol");
    return std::nullopt;
  };
  auto decide = [](const Vec3d& v, const Classical& reveal) {
    const auto symbol = simple::four_symbol_from_vector(v);
    if (!symbol) return ProtocolOutcome::abort("received vector is not a symbol");
    if (reveal.values.size() != 2) return ProtocolOutcome::abort("malformed reveal");
    const simple::FourSymbolCodeword c{static_cast<int>(reveal.values[0]), static_cast<int>(reveal.values[1])};
    return simple::four_symbol_verify(*symbol, c) == Verdict::Accept ? ProtocolOutcome::accept(c.b)
                                                                     : ProtocolOutcome::abort("reveal rejected");
  };
  return std::make_unique<Receiver>(precheck, decide);
}

Protocol four_symbol_protocol(const simple::FourSymbolCodeword& c) {
  return {"four-symbol", simple::four_symbol_rotation_mu(), [c] { return four_symbol_committer(c); },
          [] { return four_symbol_receiver(); }};
}

std::unique_ptr<Party> continuous_committer(int b) {
  return scripted("honest", {planar_unit(simple::codeword_angle(b)), Classical{"reveal", {b}}});
}

std::unique_ptr<Party> interpolation_committer(const simple::InterpolationStrategy& s, int revealed_b) {
  return scripted("adversarial:interpolation", {s.payload(), Classical{"reveal", {revealed_b}}});
}

std::unique_ptr<Party> continuous_receiver() {
  auto precheck = [](const Vec3d& v) -> std::optional<std::string> {
    if (!simple::continuous_received_angle(v)) return std::string("received vector is out of plane");
    return std::nullopt;
  };
  auto decide = [](const Vec3d& v, const Classical& reveal) {
    if (reveal.values.size() != 1) return ProtocolOutcome::abort("malformed reveal");
    const int b = static_cast<int>(reveal.values[0]);
    return simple::continuous_verify_vector(v, b) == Verdict::Accept ? ProtocolOutcome::accept(b)
                                                                     : ProtocolOutcome::abort("reveal rejected");
  };
  return std::make_unique<Receiver>(precheck, decide);
}

Protocol continuous_protocol(int b) {
  return {"continuous", simple::continuous_mu(), [b] { return continuous_committer(b); },
          [] { return continuous_receiver(); }};
}

namespace {

class ProbeSender : public Party {
 public:
  Action act(const View& view, Rng&) override {
    std::size_t sent = 0;
    for (const auto& m : view) sent += m.direction == Direction::AliceToBob ? 1 : 0;
    if (sent < 2) return Send{probe_vectors()[sent]};
    return Yield{};
  }
  std::string strategy() const override { return "honest"; }
};

class ProbeResponder : public Party {
 public:
  Action act(const View& view, Rng&) override {
    const Message* first = nullptr;
    std::size_t sent = 0;
    for (const auto& m : view) {
      if (m.direction == Direction::AliceToBob && !first) first = &m;
      if (m.direction == Direction::BobToAlice) ++sent;
    }
    if (!first) return Yield{};
    if (sent == 0) return Send{first->payload};
    if (sent == 1) return Send{probe_vectors()[2]};
    return Decide{ProtocolOutcome::accept(0)};
  }
  std::string strategy() const override { return "honest"; }
};

}  // namespace

const std::vector<Vec3d>& probe_vectors() {
  static const std::vector<Vec3d> v = {Vec3d(0.3, -0.5, 0.8).normalized(), Vec3d(-0.7, 0.2, 0.4).normalized(),
                                       Vec3d(0.1, 0.9, -0.3).normalized()};
  return v;
}

Protocol probe_protocol(const Distribution& channel) {
  return {"probe", channel, [] { return std::make_unique<ProbeSender>(); },
          [] { return std::make_unique<ProbeResponder>(); }};
}

// ---------------------------------------------------------------------------
// Twirl
// ---------------------------------------------------------------------------

TwirledParty::TwirledParty(std::unique_ptr<Party> inner, Role role, Distribution group)
    : inner_(std::move(inner)), role_(role), group_(std::move(group)) {}

TwirledParty::TwirledParty(std::unique_ptr<Party> inner, Role role, const Rotationd& frame)
    : inner_(std::move(inner)), role_(role), frame_(frame) {}

Action TwirledParty::act(const View& wire, Rng& rng) {
  if (!frame_) frame_ = sample(*group_, rng);
  const Rotationd undo = frame_->inverse();
  for (; mirrored_ < wire.size(); ++mirrored_) {
    Message m = wire[mirrored_];
    if (m.is_vector()) m.payload = Vec3d(rotate(undo, m.vector()));
    inner_view_.push_back(std::move(m));
  }

  Action action = inner_->act(inner_view_, rng);
  if (auto* send = std::get_if<Send>(&action)) {
    const Direction dir = role_ == Role::Alice ? Direction::AliceToBob : Direction::BobToAlice;
    inner_view_.push_back(Message{dir, send->payload});
    ++mirrored_;
    if (const auto* v = std::get_if<Vec3d>(&send->payload)) return Send{Vec3d(rotate(*frame_, *v))};
  }
  return action;
}

View TwirledParty::logical_view(const View& wire) const {
  View out = inner_view_;
  if (mirrored_ < wire.size()) {
    if (!frame_) throw std::logic_error("twirled party received messages before its first turn");
    const Rotationd undo = frame_->inverse();
    for (std::size_t i = mirrored_; i < wire.size(); ++i) {
      Message m = wire[i];
      if (m.is_vector()) m.payload = Vec3d(rotate(undo, m.vector()));
      out.push_back(std::move(m));
    }
  }
  return out;
}

Protocol twirl_compile(const Protocol& protocol, const Distribution& group, TwirlSides sides) {
  if (!group.is_uniform_group()) throw InvalidArgument("not a uniform group distribution");
  Protocol out;
  out.name = protocol.name + "+twirl(" + group.name() + ")";
  out.channel = Distribution::aligned();
  out.alice = [inner = protocol.alice, group] {
    return std::make_unique<TwirledParty>(inner(), Role::Alice, group);
  };
  if (sides == TwirlSides::Both) {
    out.bob = [inner = protocol.bob, group] {
      return std::make_unique<TwirledParty>(inner(), Role::Bob, group);
    };
  } else {
    out.bob = protocol.bob;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact laws
// ---------------------------------------------------------------------------

namespace {

void emit_rounded(std::ostream& os, double x) { os << std::llround(x * 1e9) << ' '; }

void emit_view(std::ostream& os, const char* who, const View& view) {
  for (const auto& m : view) {
    os << who << (m.direction == Direction::AliceToBob ? ">" : "<") << ' ';
    if (m.is_vector()) {
      for (int i = 0; i < 3; ++i) emit_rounded(os, m.vector()[i]);
    } else {
      os << m.classical().tag << ' ';
      for (auto v : m.classical().values) os << v << ' ';
    }
    os << ';';
  }
}

std::string rotation_key(const Rotationd& r) {
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) emit_rounded(os, r.matrix()(i, j));
  }
  return os.str();
}

}  // namespace

std::string transcript_key(const Transcript& t, const Party& alice, const Party& bob, ViewKey which) {
  std::ostringstream os;
  if (which != ViewKey::BobOnly) emit_view(os, "A", alice.logical_view(t.alice_view));
  if (which != ViewKey::AliceOnly) emit_view(os, "B", bob.logical_view(t.bob_view));
  os << '|' << t.outcome.to_string();
  return os.str();
}

OutcomeDistribution exact_distribution(const Protocol& protocol, ViewKey which) {
  OutcomeDistribution dist;
  for (const auto& pt : enumerate_support(protocol.channel)) {
    auto alice = protocol.alice();
    auto bob = protocol.bob();
    Rng rng(0);
    const Transcript t = run_session_with_rotation(*alice, *bob, pt.rotation, rng);
    dist[transcript_key(t, *alice, *bob, which)] += pt.probability;
  }
  return dist;
}

OutcomeDistribution exact_compiled_distribution(const Protocol& protocol, const Distribution& group,
                                                ViewKey which, TwirlSides sides) {
  if (!group.is_uniform_group()) throw InvalidArgument("not a uniform group distribution");
  const auto elements = enumerate_support(group);
  const std::vector<SupportPoint<double>> bob_frames =
      sides == TwirlSides::Both ? elements
                                : std::vector<SupportPoint<double>>{{Rotationd::identity(), Probability(1)}};
  OutcomeDistribution dist;
  for (const auto& ga : elements) {
    for (const auto& gb : bob_frames) {
      TwirledParty alice(protocol.alice(), Role::Alice, ga.rotation);
      std::unique_ptr<Party> bob = sides == TwirlSides::Both
                                       ? std::make_unique<TwirledParty>(protocol.bob(), Role::Bob, gb.rotation)
                                       : protocol.bob();
      Rng rng(0);
      const Transcript t = run_session_with_rotation(alice, *bob, Rotationd::identity(), rng);
      dist[transcript_key(t, alice, *bob, which)] += ga.probability * gb.probability;
    }
  }
  return dist;
}

OutcomeDistribution relative_frame_distribution(const Distribution& group) {
  const auto elements = enumerate_support(group);
  OutcomeDistribution dist;
  for (const auto& ga : elements) {
    for (const auto& gb : elements) {
      dist[rotation_key(gb.rotation.inverse() * ga.rotation)] += ga.probability * gb.probability;
    }
  }
  return dist;
}

OutcomeDistribution frame_distribution(const Distribution& mu) {
  OutcomeDistribution dist;
  for (const auto& pt : enumerate_support(mu)) dist[rotation_key(pt.rotation)] += pt.probability;
  return dist;
}

Moments received_moments(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed) {
  Moments m;
  Rng rng(seed);
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto alice = protocol.alice();
    auto bob = protocol.bob();
    const Transcript t = run_session(*alice, *bob, protocol.channel, rng);
    for (const auto& msg : bob->logical_view(t.bob_view)) {
      if (msg.direction == Direction::AliceToBob && msg.is_vector()) {
        m.mean += msg.vector();
        second += msg.vector() * msg.vector().transpose();
        ++m.samples;
        break;
      }
    }
  }
  if (m.samples > 0) {
    const double n = static_cast<double>(m.samples);
    m.mean /= n;
    m.covariance = second / n - m.mean * m.mean.transpose();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Parallel composition
// ---------------------------------------------------------------------------

ParallelProtocol parallel_compose(const Protocol& protocol, int k) {
  if (k < 1) throw InvalidArgument("parallel composition needs at least one instance");
  return ParallelProtocol{std::vector<Protocol>(static_cast<std::size_t>(k), protocol)};
}

ParallelProtocol parallel_compose(std::vector<Protocol> instances) {
  if (instances.empty()) throw InvalidArgument("parallel composition needs at least one instance");
  return ParallelProtocol{std::move(instances)};
}

ParallelOutcome run_parallel(const ParallelProtocol& protocol, Rng& rng) {
  ParallelOutcome out;
  out.accepted = true;
  for (std::size_t i = 0; i < protocol.instances.size(); ++i) {
    Transcript t = run_session(protocol.instances[i], rng);
    t.session = i;
    if (auto b = t.outcome.bit()) {
      out.bits.push_back(*b);
    } else {
      out.accepted = false;
    }
    out.sessions.push_back(std::move(t));
  }
  if (!out.accepted) out.bits.clear();
  return out;
}

Probability exact_parallel_acceptance(const ParallelProtocol& protocol) {
  std::vector<std::vector<SupportPoint<double>>> supports;
  for (const auto& inst : protocol.instances) supports.push_back(enumerate_support(inst.channel));

  // Depth-first over the joint support; a rejected instance prunes the branch.
  std::function<Probability(std::size_t)> walk = [&](std::size_t i) -> Probability {
    if (i == protocol.instances.size()) return Probability(1);
    Probability total = 0;
    for (const auto& pt : supports[i]) {
      auto alice = protocol.instances[i].alice();
      auto bob = protocol.instances[i].bob();
      Rng rng(0);
      if (run_session_with_rotation(*alice, *bob, pt.rotation, rng).outcome.accepted()) {
        total += pt.probability * walk(i + 1);
      }
    }
    return total;
  };
  return walk(0);
}

}  // namespace framecommit::protocol
