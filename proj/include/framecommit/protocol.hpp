#pragma once

// Two-party sessions over a misalignment channel.
//
// A session draws one rotation R from mu. Every vector Alice sends reaches
// Bob as R v, every vector Bob sends reaches Alice as R^-1 w, and classical
// payloads pass untouched. Parties are driven by a turn loop: a party acts
// until it yields, then the other party acts; a Decide action ends the
// session.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "framecommit/lattice.hpp"
#include "framecommit/simple_schemes.hpp"
#include "framecommit/so3.hpp"

namespace framecommit::protocol {

enum class Direction { AliceToBob, BobToAlice };
enum class Role { Alice, Bob };

/// Frame-insensitive data, e.g. a reveal (b, a).
struct Classical {
  std::string tag;
  std::vector<std::int64_t> values;

  bool operator==(const Classical&) const = default;
};

using Payload = std::variant<Vec3d, Classical>;

struct Message {
  Direction direction = Direction::AliceToBob;
  Payload payload;

  bool is_vector() const { return std::holds_alternative<Vec3d>(payload); }
  const Vec3d& vector() const { return std::get<Vec3d>(payload); }
  const Classical& classical() const { return std::get<Classical>(payload); }
};

using View = std::vector<Message>;

struct Accepted {
  int bit = 0;
};

struct Aborted {
  std::string reason;
};

struct ProtocolOutcome {
  std::variant<Accepted, Aborted> verdict = Aborted{"no verdict"};

  static ProtocolOutcome accept(int bit) { return {Accepted{bit}}; }
  static ProtocolOutcome abort(std::string reason) { return {Aborted{std::move(reason)}}; }

  bool accepted() const { return std::holds_alternative<Accepted>(verdict); }
  std::optional<int> bit() const;
  std::string to_string() const;
};

struct Send {
  Payload payload;
};
struct Yield {};
struct Decide {
  ProtocolOutcome outcome;
};
using Action = std::variant<Send, Yield, Decide>;

class Party {
 public:
  virtual ~Party() = default;

  /// Next action given everything this party has seen and sent so far.
  virtual Action act(const View& view, Rng& rng) = 0;

  /// "honest" or an adversarial strategy id.
  virtual std::string strategy() const = 0;
  bool honest() const { return strategy() == "honest"; }

  /// The view the protocol logic inside this party works with. Wrappers that
  /// transform messages (the twirl) override this.
  virtual View logical_view(const View& wire) const { return wire; }
};

using PartyFactory = std::function<std::unique_ptr<Party>()>;

struct Protocol {
  std::string name;
  Distribution channel = Distribution::aligned();
  PartyFactory alice;
  PartyFactory bob;
};

struct Transcript {
  std::string protocol;
  std::string channel;
  std::uint64_t session = 0;
  std::optional<std::uint64_t> seed;
  Rotationd rotation;
  View alice_view;
  View bob_view;
  ProtocolOutcome outcome;
};

inline constexpr int kMaxSessionSteps = 1024;

/// Runs one session with the channel fixed to `rotation`.
Transcript run_session_with_rotation(Party& alice, Party& bob, const Rotationd& rotation, Rng& rng);

/// Samples R ~ mu once, then runs the session.
Transcript run_session(Party& alice, Party& bob, const Distribution& mu, Rng& rng);

/// Fresh parties from the protocol's factories.
Transcript run_session(const Protocol& protocol, Rng& rng);

// ---------------------------------------------------------------------------
// Parties for the commitment schemes
// ---------------------------------------------------------------------------

/// What a non-adaptive committer sends: a vector in the commit phase and a
/// classical reveal afterwards.
struct CommitPlan {
  Vec3d payload;
  Classical reveal;
};

/// Sends plan.payload, yields, sends plan.reveal, yields. The plan is drawn
/// from the party's stream on its first turn.
class Committer : public Party {
 public:
  Committer(std::string strategy, std::function<CommitPlan(Rng&)> plan)
      : strategy_(std::move(strategy)), plan_fn_(std::move(plan)) {}

  Action act(const View& view, Rng& rng) override;
  std::string strategy() const override { return strategy_; }

 private:
  std::string strategy_;
  std::function<CommitPlan(Rng&)> plan_fn_;
  std::optional<CommitPlan> plan_;
  int phase_ = 0;
};

/// Honest receiver: checks the commit vector on arrival (abort early if the
/// check fails) and decides once the reveal arrives.
class Receiver : public Party {
 public:
  using Precheck = std::function<std::optional<std::string>(const Vec3d&)>;
  using Decision = std::function<ProtocolOutcome(const Vec3d&, const Classical&)>;

  Receiver(Precheck precheck, Decision decide)
      : precheck_(std::move(precheck)), decide_(std::move(decide)) {}

  Action act(const View& view, Rng& rng) override;
  std::string strategy() const override { return "honest"; }

 private:
  Precheck precheck_;
  Decision decide_;
};

Classical lattice_reveal(int b, const lattice::LatticeCodeword& a);

/// Honest committer drawing a fresh secret each session.
std::unique_ptr<Party> lattice_committer(const lattice::LatticeParams& params, int b);
/// Honest committer with a fixed secret (deterministic, for enumeration).
std::unique_ptr<Party> lattice_fixed_committer(const lattice::LatticeParams& params,
                                               const lattice::LatticeCodeword& secret);
/// Sends an arbitrary vector, reveals (b, a).
std::unique_ptr<Party> lattice_cheat_committer(const lattice::LatticeParams& params, const Vec3d& payload,
                                               int revealed_b, const lattice::LatticeCodeword& revealed_a);
std::unique_ptr<Party> lattice_receiver(const lattice::LatticeParams& params);

Protocol lattice_protocol(const lattice::LatticeParams& params, int b);

std::unique_ptr<Party> four_symbol_committer(const simple::FourSymbolCodeword& c);
std::unique_ptr<Party> four_symbol_cheat_committer(int sent_symbol, const simple::FourSymbolCodeword& revealed);
std::unique_ptr<Party> four_symbol_receiver();
/// Four-symbol scheme over its quarter-turn rotation channel.
Protocol four_symbol_protocol(const simple::FourSymbolCodeword& c);

std::unique_ptr<Party> continuous_committer(int b);
std::unique_ptr<Party> interpolation_committer(const simple::InterpolationStrategy& s, int revealed_b);
std::unique_ptr<Party> continuous_receiver();
Protocol continuous_protocol(int b);

/// Frame probe: Alice sends two fixed generic vectors; Bob echoes the first
/// one back, sends a fixed vector of his own, then accepts bit 0. Exercises
/// both channel directions; deterministic.
Protocol probe_protocol(const Distribution& channel);

/// Fixed vectors used by probe_protocol.
const std::vector<Vec3d>& probe_vectors();

// ---------------------------------------------------------------------------
// Twirl compiler
// ---------------------------------------------------------------------------

/// Wraps a party: outgoing vectors are multiplied by a private frame U,
/// incoming vectors by U^-1 before the inner party sees them.
class TwirledParty : public Party {
 public:
  /// U is drawn from `group` on the first turn.
  TwirledParty(std::unique_ptr<Party> inner, Role role, Distribution group);
  /// U fixed, for exact enumeration over the group.
  TwirledParty(std::unique_ptr<Party> inner, Role role, const Rotationd& frame);

  Action act(const View& wire, Rng& rng) override;
  std::string strategy() const override { return inner_->strategy(); }
  View logical_view(const View& wire) const override;

  const std::optional<Rotationd>& frame() const { return frame_; }

 private:
  std::unique_ptr<Party> inner_;
  Role role_;
  std::optional<Distribution> group_;
  std::optional<Rotationd> frame_;
  View inner_view_;
  std::size_t mirrored_ = 0;
};

enum class TwirlSides { Both, AliceOnly };

/// The protocol run over an aligned channel with each party applying a
/// private uniform group frame. Rejects a group that is not Haar or cyclic.
Protocol twirl_compile(const Protocol& protocol, const Distribution& group,
                       TwirlSides sides = TwirlSides::Both);

// ---------------------------------------------------------------------------
// Exact session laws
// ---------------------------------------------------------------------------

enum class ViewKey { Both, AliceOnly, BobOnly };

/// Canonical text key of a finished session: logical views (vectors rounded
/// to 1e-9) and the outcome.
std::string transcript_key(const Transcript& t, const Party& alice, const Party& bob, ViewKey which);

using OutcomeDistribution = std::map<std::string, Probability>;

/// Law of the session over the protocol's finite channel, by running every
/// support rotation once. Parties must be deterministic.
OutcomeDistribution exact_distribution(const Protocol& protocol, ViewKey which = ViewKey::Both);

/// Law of twirl_compile(protocol, group) over the aligned channel, by
/// enumerating G x G (or G for AliceOnly) frames. Group must be finite.
OutcomeDistribution exact_compiled_distribution(const Protocol& protocol, const Distribution& group,
                                                ViewKey which = ViewKey::Both,
                                                TwirlSides sides = TwirlSides::Both);

/// Law of U_B^-1 U_A over G x G, keyed by the rounded matrix.
OutcomeDistribution relative_frame_distribution(const Distribution& group);

/// Law of R over the support of mu, same keys as relative_frame_distribution.
OutcomeDistribution frame_distribution(const Distribution& mu);

/// Empirical mean and covariance of the first vector Bob receives.
struct Moments {
  Vec3d mean = Vec3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  std::uint64_t samples = 0;
};

Moments received_moments(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Parallel composition
// ---------------------------------------------------------------------------

/// k instances run as independent sessions with independent rotations. The
/// composite accepts iff every instance accepts.
struct ParallelProtocol {
  std::vector<Protocol> instances;
};

ParallelProtocol parallel_compose(const Protocol& protocol, int k);
ParallelProtocol parallel_compose(std::vector<Protocol> instances);

struct ParallelOutcome {
  std::vector<Transcript> sessions;
  bool accepted = false;
  std::vector<int> bits;
};

ParallelOutcome run_parallel(const ParallelProtocol& protocol, Rng& rng);

/// Exact probability that all instances accept, by enumerating the joint
/// support of all instance channels.
Probability exact_parallel_acceptance(const ParallelProtocol& protocol);

// ---------------------------------------------------------------------------
// Transcript records
// ---------------------------------------------------------------------------

/// Line-delimited record; doubles at 17 significant digits.
void write_transcript(std::ostream& os, const Transcript& t);
std::string transcript_to_string(const Transcript& t);
std::vector<Transcript> read_transcripts(std::istream& is);

/// Feeds Bob's recorded view to a fresh receiver and returns its verdict.
ProtocolOutcome replay_verdict(const Transcript& t, Party& bob);

}  // namespace framecommit::protocol
