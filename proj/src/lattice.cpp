#include "framecommit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace framecommit::lattice {

std::string to_string(Predicate p) { return p == Predicate::Strict ? "strict" : "lenient"; }

Predicate parse_predicate(std::string_view text) {
  if (text == "strict") return Predicate::Strict;
  if (text == "lenient") return Predicate::Lenient;
  throw InvalidArgument("unknown predicate '" + std::string(text) + "' (expected strict|lenient)");
}

LatticeCodeword::LatticeCodeword(std::initializer_list<int> coords) : c_(coords.size()) {
  int i = 0;
  for (int v : coords) c_[i++] = v;
}

int LatticeCodeword::parity() const {
  int s = 0;
  for (Eigen::Index i = 0; i < c_.size(); ++i) s += c_[i];
  return ((s % 2) + 2) % 2;
}

bool LatticeCodeword::in_range(int lo, int hi) const {
  return c_.size() == 0 || (c_.minCoeff() >= lo && c_.maxCoeff() <= hi);
}

std::string LatticeCodeword::to_string() const {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < c_.size(); ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  return os.str();
}

LatticeCodeword operator+(const LatticeCodeword& a, const LatticeCodeword& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("lattice dimension mismatch");
  return LatticeCodeword(Eigen::VectorXi(a.coords() + b.coords()));
}

LatticeCodeword operator-(const LatticeCodeword& a, const LatticeCodeword& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("lattice dimension mismatch");
  return LatticeCodeword(Eigen::VectorXi(a.coords() - b.coords()));
}

LatticeCodeword unit_offset(int d, int j, int m) {
  Eigen::VectorXi v = Eigen::VectorXi::Zero(d);
  v[j] = m;
  return LatticeCodeword(std::move(v));
}

double AngleBasis::max_safe_eps() const { return std::sin(min_gap_ / 2.0); }

LatticeCodeword AngleBasis::point(std::uint64_t index) const {
  const auto radix = static_cast<std::uint64_t>(side_ + 2);
  Eigen::VectorXi c(dimension());
  for (int i = 0; i < dimension(); ++i) {
    c[i] = static_cast<int>(index % radix);
    index /= radix;
  }
  return LatticeCodeword(std::move(c));
}

std::uint64_t AngleBasis::index_of(const LatticeCodeword& a) const {
  if (a.dim() != dimension() || !a.in_range(0, side_ + 1)) {
    throw InvalidArgument("point " + a.to_string() + " is outside the codebook");
  }
  const auto radix = static_cast<std::uint64_t>(side_ + 2);
  std::uint64_t idx = 0;
  for (int i = dimension() - 1; i >= 0; --i) idx = idx * radix + static_cast<std::uint64_t>(a[i]);
  return idx;
}

double AngleBasis::angle_of(const LatticeCodeword& a) const {
  double alpha = 0.0;
  for (int i = 0; i < dimension(); ++i) alpha += a[i] * angles_[i];
  return alpha;
}

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int n = 2; static_cast<int>(primes.size()) < count; ++n) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

std::uint64_t codebook_points(int d, int L) {
  std::uint64_t n = 1;
  const auto radix = static_cast<std::uint64_t>(L + 2);
  for (int i = 0; i < d; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / radix) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= radix;
  }
  return n;
}

AngleBasis build_angle_basis(int d, int L, std::uint64_t budget) {
  if (d < 1) throw InvalidArgument("d must be at least 1");
  if (L < 2) throw InvalidArgument("L must be at least 2");
  const std::uint64_t n = codebook_points(d, L);
  if (n > budget) {
    throw BudgetExceeded("codebook too large to certify: (L+2)^d = " +
                         (n == std::numeric_limits<std::uint64_t>::max() ? std::string("overflow")
                                                                         : std::to_string(n)) +
                         " exceeds budget " + std::to_string(budget));
  }

  AngleBasis basis;
  basis.side_ = L;
  double root_sum = 0.0;
  std::vector<double> roots;
  for (int p : first_primes(d)) {
    roots.push_back(std::sqrt(static_cast<double>(p)));
    root_sum += roots.back();
  }
  basis.scale_ = (std::numbers::pi / 2.0) / (static_cast<double>(L + 1) * root_sum);
  for (double r : roots) basis.angles_.push_back(basis.scale_ * r);

  basis.table_.reserve(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    basis.table_.push_back({basis.angle_of(basis.point(idx)), idx});
  }
  std::sort(basis.table_.begin(), basis.table_.end(),
            [](const CodebookEntry& x, const CodebookEntry& y) { return x.angle < y.angle; });

  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < basis.table_.size(); ++i) {
    gap = std::min(gap, basis.table_[i].angle - basis.table_[i - 1].angle);
  }
  if (!(gap > 0.0)) {
    throw CertificationFailure("codebook angles are not separated (min gap " + std::to_string(gap) + ")");
  }
  basis.min_gap_ = gap;
  return basis;
}

LatticeParams LatticeParams::create(int d, int L, std::optional<double> eps_meas, Predicate predicate,
                                    std::uint64_t budget) {
  auto basis = std::make_shared<const AngleBasis>(build_angle_basis(d, L, budget));
  const double eps = eps_meas.value_or(basis->max_safe_eps() / 4.0);
  return LatticeParams(std::move(basis), eps, predicate);
}

LatticeParams::LatticeParams(std::shared_ptr<const AngleBasis> basis, double eps_meas, Predicate predicate)
    : basis_(std::move(basis)), eps_(eps_meas), predicate_(predicate) {
  if (!basis_) throw InvalidArgument("missing angle basis");
  if (!(eps_ >= 0.0)) throw InvalidArgument("eps_meas must be nonnegative");
  if (!(basis_->max_safe_eps() > eps_)) {
    throw CertificationFailure("separation condition fails: min chord " +
                               std::to_string(2.0 * basis_->max_safe_eps()) + " <= 2*eps_meas " +
                               std::to_string(2.0 * eps_));
  }
}

Vec3d encode(const LatticeParams& params, const LatticeCodeword& a) {
  if (a.dim() != params.d()) throw InvalidArgument("codeword has wrong dimension");
  if (!a.in_range(0, params.L() + 1)) {
    throw InvalidArgument("codeword " + a.to_string() + " has a coordinate outside {0..L+1}");
  }
  return planar_unit(params.basis().angle_of(a));
}

Commitment commit(const LatticeParams& params, int b, Rng& rng) {
  if (b != 0 && b != 1) throw InvalidArgument("committed bit must be 0 or 1");
  std::uniform_int_distribution<int> coord(0, params.L() - 1);
  Eigen::VectorXi c(params.d());
  LatticeCodeword a;
  do {
    for (int i = 0; i < params.d(); ++i) c[i] = coord(rng);
    a = LatticeCodeword(c);
  } while (a.parity() != b);
  Vec3d payload = encode(params, a);
  return {std::move(a), payload};
}

DecodeResult decode_commit(const LatticeParams& params, const Vec3d& received) {
  const double eps = params.eps_meas();
  if (std::abs(received.z()) > eps) return Abort{"received vector is out of the x-y plane"};

  const auto& table = params.basis().table();
  const double phi = std::atan2(received.y(), received.x());
  const auto it = std::lower_bound(table.begin(), table.end(), phi,
                                   [](const CodebookEntry& e, double a) { return e.angle < a; });

  // Neighbours of the insertion point, plus both ends for angles that are
  // closer across the wrap at +-pi.
  std::size_t candidates[4] = {0, table.size() - 1, 0, 0};
  int count = 2;
  const auto pos = static_cast<std::size_t>(it - table.begin());
  if (pos < table.size()) candidates[count++] = pos;
  if (pos > 0) candidates[count++] = pos - 1;

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (int k = 0; k < count; ++k) {
    const double dist = (planar_unit(table[candidates[k]].angle) - received).norm();
    if (dist < best) {
      best = dist;
      best_i = candidates[k];
    }
  }
  if (!(best <= eps)) return Abort{"no codeword within eps_meas of the received vector"};
  return params.basis().point(table[best_i].index);
}

LatticeCodeword apply_channel_noise(const LatticeParams& params, const LatticeCodeword& a, Rng& rng) {
  if (a.dim() != params.d() || !a.in_range(0, params.L() - 1)) {
    throw InvalidArgument("channel noise expects an honest point of {0..L-1}^d");
  }
  const int j = std::uniform_int_distribution<int>(0, params.d() - 1)(rng);
  const int m = std::uniform_int_distribution<int>(1, 2)(rng);
  return a + unit_offset(params.d(), j, m);
}

Verdict verify_reveal(const LatticeParams& params, const LatticeCodeword& decoded, int revealed_b,
                      const LatticeCodeword& revealed_a) {
  return verify_reveal(params, decoded, revealed_b, revealed_a, params.predicate());
}

Verdict verify_reveal(const LatticeParams& params, const LatticeCodeword& decoded, int revealed_b,
                      const LatticeCodeword& revealed_a, Predicate predicate) {
  if (decoded.dim() != params.d() || revealed_a.dim() != params.d()) return Verdict::Abort;
  if (revealed_b != 0 && revealed_b != 1) return Verdict::Abort;
  if (revealed_a.parity() != revealed_b) return Verdict::Abort;
  if (!revealed_a.in_range(0, params.L() - 1)) return Verdict::Abort;

  const Eigen::VectorXi diff = decoded.coords() - revealed_a.coords();
  int nonzero = 0;
  int value = 0;
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    if (diff[i] != 0) {
      ++nonzero;
      value = diff[i];
    }
  }
  if (nonzero == 1 && (value == 1 || value == 2)) return Verdict::Accept;
  if (nonzero == 0 && predicate == Predicate::Lenient) return Verdict::Accept;
  return Verdict::Abort;
}

Distribution lattice_mu(const LatticeParams& params) {
  return Distribution::two_point_mixture(params.basis().angles());
}

}  // namespace framecommit::lattice
