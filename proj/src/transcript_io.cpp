#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "framecommit/protocol.hpp"

namespace framecommit::protocol {

namespace {

const char* direction_token(Direction d) { return d == Direction::AliceToBob ? "A>B" : "B>A"; }

void write_message(std::ostream& os, const char* owner, const Message& m) {
  os << "msg " << owner << ' ' << direction_token(m.direction) << ' ';
  if (m.is_vector()) {
    const Vec3d& v = m.vector();
    os << "vec3 " << to_decimal_string(v.x()) << ' ' << to_decimal_string(v.y()) << ' '
       << to_decimal_string(v.z());
  } else {
    const Classical& c = m.classical();
    os << "classical " << c.tag << ' ' << c.values.size();
    for (auto v : c.values) os << ' ' << v;
  }
  os << '\n';
}

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw InvalidArgument("bad number in transcript: " + token);
  return v;
}

std::string rest_of_line(std::istringstream& in) {
  std::string rest;
  std::getline(in, rest);
  if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
  return rest;
}

}  // namespace

void write_transcript(std::ostream& os, const Transcript& t) {
  os << "session " << t.session << '\n';
  os << "protocol " << t.protocol << '\n';
  os << "channel " << t.channel << '\n';
  os << "seed " << (t.seed ? std::to_string(*t.seed) : std::string("none")) << '\n';
  os << "rotation";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) os << ' ' << to_decimal_string(t.rotation.matrix()(i, j));
  }
  os << '\n';
  for (const auto& m : t.alice_view) write_message(os, "alice", m);
  for (const auto& m : t.bob_view) write_message(os, "bob", m);
  os << "outcome " << t.outcome.to_string() << '\n';
  os << "end\n";
}

std::string transcript_to_string(const Transcript& t) {
  std::ostringstream os;
  write_transcript(os, t);
  return os.str();
}

std::vector<Transcript> read_transcripts(std::istream& is) {
  std::vector<Transcript> out;
  std::optional<Transcript> cur;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    auto need = [&](bool ok) {
      if (!ok) throw InvalidArgument("malformed transcript line " + std::to_string(lineno) + ": " + line);
    };
    if (key == "session") {
      need(!cur.has_value());
      cur.emplace();
      need(static_cast<bool>(in >> cur->session));
      continue;
    }
    need(cur.has_value());
    if (key == "protocol") {
      cur->protocol = rest_of_line(in);
    } else if (key == "channel") {
      cur->channel = rest_of_line(in);
    } else if (key == "seed") {
      std::string s;
      in >> s;
      if (s != "none") cur->seed = std::stoull(s);
    } else if (key == "rotation") {
      Rotationd::Matrix m;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          std::string tok;
          need(static_cast<bool>(in >> tok));
          m(i, j) = parse_double(tok);
        }
      }
      cur->rotation = Rotationd::from_matrix(m);
    } else if (key == "msg") {
      std::string owner, dir, kind;
      need(static_cast<bool>(in >> owner >> dir >> kind));
      need(owner == "alice" || owner == "bob");
      need(dir == "A>B" || dir == "B>A");
      Message m;
      m.direction = dir == "A>B" ? Direction::AliceToBob : Direction::BobToAlice;
      if (kind == "vec3") {
        std::string x, y, z;
        need(static_cast<bool>(in >> x >> y >> z));
        m.payload = Vec3d(parse_double(x), parse_double(y), parse_double(z));
      } else if (kind == "classical") {
        Classical c;
        std::size_t n = 0;
        need(static_cast<bool>(in >> c.tag >> n));
        for (std::size_t i = 0; i < n; ++i) {
          std::int64_t v = 0;
          need(static_cast<bool>(in >> v));
          c.values.push_back(v);
        }
        m.payload = std::move(c);
      } else {
        need(false);
      }
      (owner == "alice" ? cur->alice_view : cur->bob_view).push_back(std::move(m));
    } else if (key == "outcome") {
      std::string kind;
      in >> kind;
      if (kind == "accepted") {
        int bit = 0;
        need(static_cast<bool>(in >> bit));
        cur->outcome = ProtocolOutcome::accept(bit);
      } else {
        need(kind == "aborted");
        cur->outcome = ProtocolOutcome::abort(rest_of_line(in));
      }
    } else if (key == "end") {
      out.push_back(std::move(*cur));
      cur.reset();
    } else {
      need(false);
    }
  }
  if (cur) throw InvalidArgument("transcript ended without 'end'");
  return out;
}

ProtocolOutcome replay_verdict(const Transcript& t, Party& bob) {
  View view;
  Rng rng(0);
  for (const auto& m : t.bob_view) {
    if (m.direction != Direction::AliceToBob) continue;
    view.push_back(m);
    for (int step = 0; step < kMaxSessionSteps; ++step) {
      Action action = bob.act(view, rng);
      if (auto* send = std::get_if<Send>(&action)) {
        view.push_back(Message{Direction::BobToAlice, send->payload});
      } else if (std::holds_alternative<Yield>(action)) {
        break;
      } else {
        return std::get<Decide>(action).outcome;
      }
    }
  }
  return ProtocolOutcome::abort("replay ended without a verdict");
}

}  // namespace framecommit::protocol
