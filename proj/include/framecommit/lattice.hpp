#pragma once

// Lattice-angle commitment scheme.
//
// A point a of {0..L+1}^d is carried to the plane vector at angle
// sum_i a_i * theta_i. The channel rotates by theta_j or 2*theta_j, which on
// the lattice adds e_j or 2*e_j. Bob decodes the received vector back to a
// lattice point and checks the reveal against it.

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "framecommit/so3.hpp"

namespace framecommit {

enum class Verdict { Accept, Abort };

/// Reason attached to an aborted decode or session.
struct Abort {
  std::string reason;
};

}  // namespace framecommit

namespace framecommit::lattice {

/// Reading of Bob's reveal test. Strict rejects a zero difference between the
/// decoded point and the revealed one; Lenient accepts it.
enum class Predicate { Strict, Lenient };

std::string to_string(Predicate p);
Predicate parse_predicate(std::string_view text);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

class LatticeCodeword {
 public:
  LatticeCodeword() = default;
  explicit LatticeCodeword(Eigen::VectorXi coords) : c_(std::move(coords)) {}
  LatticeCodeword(std::initializer_list<int> coords);

  const Eigen::VectorXi& coords() const { return c_; }
  int dim() const { return static_cast<int>(c_.size()); }
  int operator[](int i) const { return c_[i]; }

  /// sum_i a_i mod 2
  int parity() const;

  bool in_range(int lo, int hi) const;

  bool operator==(const LatticeCodeword& other) const {
    return c_.size() == other.c_.size() && c_ == other.c_;
  }

  std::string to_string() const;

 private:
  Eigen::VectorXi c_;
};

LatticeCodeword operator+(const LatticeCodeword& a, const LatticeCodeword& b);
LatticeCodeword operator-(const LatticeCodeword& a, const LatticeCodeword& b);

/// Unit vector e_j scaled by m, in dimension d.
LatticeCodeword unit_offset(int d, int j, int m = 1);

struct CodebookEntry {
  double angle;
  std::uint64_t index;
};

/// Rationally independent angles theta_i = scale * sqrt(p_i), scaled so the
/// largest codebook angle (L+1) * sum theta_i equals pi/2, together with the
/// sorted table of all (L+2)^d codebook angles and its certified minimum gap.
class AngleBasis {
 public:
  int dimension() const { return static_cast<int>(angles_.size()); }
  /// L: honest coordinates lie in {0..L-1}; the codebook spans {0..L+1}.
  int side() const { return side_; }
  const std::vector<double>& angles() const { return angles_; }
  double scale() const { return scale_; }
  double min_gap() const { return min_gap_; }

  /// Supremum of admissible measurement precision: 2 sin(min_gap/2) > 2 eps.
  double max_safe_eps() const;

  /// Sorted by angle.
  const std::vector<CodebookEntry>& table() const { return table_; }
  std::uint64_t codebook_size() const { return table_.size(); }

  /// Mixed-radix index in base L+2, coordinate 0 least significant.
  LatticeCodeword point(std::uint64_t index) const;
  std::uint64_t index_of(const LatticeCodeword& a) const;

  /// sum_i a_i theta_i, accumulated in coordinate order.
  double angle_of(const LatticeCodeword& a) const;

 private:
  friend AngleBasis build_angle_basis(int d, int L, std::uint64_t budget);

  int side_ = 0;
  std::vector<double> angles_;
  double scale_ = 0.0;
  double min_gap_ = 0.0;
  std::vector<CodebookEntry> table_;
};

/// The first `count` primes.
std::vector<int> first_primes(int count);

/// Throws InvalidArgument for d < 1 or L < 2, BudgetExceeded when (L+2)^d
/// exceeds the enumeration budget.
AngleBasis build_angle_basis(int d, int L, std::uint64_t budget = kDefaultEnumerationBudget);

/// (L+2)^d, saturating at UINT64_MAX.
std::uint64_t codebook_points(int d, int L);

class LatticeParams {
 public:
  /// Builds the basis and validates the separation condition. A missing eps
  /// defaults to a quarter of the safe bound.
  static LatticeParams create(int d, int L, std::optional<double> eps_meas = std::nullopt,
                              Predicate predicate = Predicate::Lenient,
                              std::uint64_t budget = kDefaultEnumerationBudget);

  /// Throws CertificationFailure if 2 sin(min_gap/2) <= 2 eps_meas.
  LatticeParams(std::shared_ptr<const AngleBasis> basis, double eps_meas, Predicate predicate);

  int d() const { return basis_->dimension(); }
  int L() const { return basis_->side(); }
  const AngleBasis& basis() const { return *basis_; }
  double eps_meas() const { return eps_; }
  Predicate predicate() const { return predicate_; }

  LatticeParams with_predicate(Predicate p) const { return LatticeParams(basis_, eps_, p); }

 private:
  std::shared_ptr<const AngleBasis> basis_;
  double eps_ = 0.0;
  Predicate predicate_ = Predicate::Lenient;
};

/// Plane vector at angle alpha(a). Coordinates must lie in {0..L+1}.
Vec3d encode(const LatticeParams& params, const LatticeCodeword& a);

struct Commitment {
  LatticeCodeword secret;
  Vec3d payload;
};

/// a uniform over the parity-b points of {0..L-1}^d, by rejection.
Commitment commit(const LatticeParams& params, int b, Rng& rng);

using DecodeResult = std::variant<LatticeCodeword, Abort>;

/// Unique codebook point within eps_meas of `received`, or Abort.
DecodeResult decode_commit(const LatticeParams& params, const Vec3d& received);

/// a + e_j or a + 2 e_j, j uniform, multiplier uniform.
LatticeCodeword apply_channel_noise(const LatticeParams& params, const LatticeCodeword& a, Rng& rng);

/// Bob's reveal test under the params' predicate.
Verdict verify_reveal(const LatticeParams& params, const LatticeCodeword& decoded, int revealed_b,
                      const LatticeCodeword& revealed_a);

Verdict verify_reveal(const LatticeParams& params, const LatticeCodeword& decoded, int revealed_b,
                      const LatticeCodeword& revealed_a, Predicate predicate);

/// The two-point angle mixture over the basis angles.
Distribution lattice_mu(const LatticeParams& params);

}  // namespace framecommit::lattice
