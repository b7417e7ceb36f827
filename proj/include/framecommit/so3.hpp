#pragma once

// Rotations of R^3 and the misalignment distributions they are drawn from.
//
// Convention: Rotation::about_z(t) is the counter-clockwise turn, so the
// in-plane vector at angle a is carried to angle a + t. The matrix printed in
// most texts for a frame change by t (with +sin t above the diagonal) is the
// inverse of this one; only the relative sign between encoder and channel
// matters to the protocols, and every module uses this single convention.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "framecommit/errors.hpp"
#include "framecommit/probability.hpp"

namespace framecommit {

/// Random stream used throughout; always constructed from an explicit seed.
using Rng = std::mt19937_64;

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3d = Vec3<double>;

/// Absolute tolerance for angle comparisons modulo 2*pi.
inline constexpr double kAngleTolerance = 1e-9;

template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(angle, two_pi);
  if (r < Scalar(0)) r += two_pi;
  return r;
}

template <typename Scalar>
bool angles_equal_mod_2pi(Scalar a, Scalar b, Scalar tol = Scalar(kAngleTolerance)) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar diff = wrap_angle(a - b);
  return diff <= tol || two_pi - diff <= tol;
}

/// In-plane unit vector (cos a, sin a, 0).
template <typename Scalar>
Vec3<Scalar> planar_unit(Scalar angle) {
  return Vec3<Scalar>(std::cos(angle), std::sin(angle), Scalar(0));
}

/// Normalized copy; throws on the zero vector.
template <typename Derived>
Vec3<typename Derived::Scalar> normalized_payload(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = v.norm();
  if (!(n > Scalar(0))) throw InvalidArgument("cannot normalize a zero vector");
  return v / n;
}

/// Element of SO(3), stored as an orthogonal matrix.
template <typename Scalar>
class Rotation {
 public:
  using Matrix = Eigen::Matrix<Scalar, 3, 3>;

  Rotation() : m_(Matrix::Identity()) {}

  static Rotation identity() { return Rotation(); }

  static Rotation about_z(Scalar angle) {
    Matrix m;
    const Scalar c = std::cos(angle);
    const Scalar s = std::sin(angle);
    m << c, -s, Scalar(0),
         s, c, Scalar(0),
         Scalar(0), Scalar(0), Scalar(1);
    return Rotation(m);
  }

  static Rotation from_quaternion(const Eigen::Quaternion<Scalar>& q) {
    return Rotation(q.normalized().toRotationMatrix());
  }

  /// Accepts any matrix that is orthogonal with unit determinant within 1e-9.
  static Rotation from_matrix(const Matrix& m) {
    const Scalar tol = Scalar(1e-9);
    if (((m * m.transpose()) - Matrix::Identity()).cwiseAbs().maxCoeff() > tol) {
      throw InvalidArgument("matrix is not orthogonal");
    }
    if (std::abs(m.determinant() - Scalar(1)) > tol) {
      throw InvalidArgument("matrix does not have unit determinant");
    }
    return Rotation(m);
  }

  const Matrix& matrix() const { return m_; }

  Rotation inverse() const { return Rotation(m_.transpose()); }

  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }

  template <typename Derived>
  Vec3<Scalar> operator*(const Eigen::MatrixBase<Derived>& v) const {
    return m_ * v;
  }

  bool is_approx(const Rotation& other, Scalar tol = Scalar(1e-9)) const {
    return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
  }

  template <typename Other>
  Rotation<Other> cast() const {
    return Rotation<Other>::from_matrix(m_.template cast<Other>());
  }

 private:
  explicit Rotation(const Matrix& m) : m_(m) {}

  Matrix m_;
};

using Rotationd = Rotation<double>;

/// Matrix action of R on v.
template <typename Scalar, typename Derived>
Vec3<Scalar> rotate(const Rotation<Scalar>& r, const Eigen::MatrixBase<Derived>& v) {
  return r.matrix() * v;
}

/// Uniformly random element of SO(3): a 4D Gaussian, normalized, read as a
/// unit quaternion.
template <typename Scalar>
Rotation<Scalar> sample_haar(Rng& rng) {
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
  Eigen::Matrix<Scalar, 4, 1> q;
  do {
    for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
  } while (q.norm() < Scalar(1e-12));
  q.normalize();
  return Rotation<Scalar>::from_quaternion(Eigen::Quaternion<Scalar>(q[0], q[1], q[2], q[3]));
}

template <typename Scalar>
struct SupportPoint {
  Rotation<Scalar> rotation;
  Probability probability;
};

// Variants of the misalignment law mu.

struct HaarSO3 {};

/// Uniform over rotations by 2*pi*k/n about z.
struct CyclicZ {
  int n = 1;
};

/// Pick j uniformly, then rotate about z by angles[j] or 2*angles[j], each with
/// probability 1/2.
template <typename Scalar>
struct TwoPointAngleMixture {
  std::vector<Scalar> angles;
};

/// Rotation about z by an angle uniform on [0, max_angle].
template <typename Scalar>
struct UniformSegment {
  Scalar max_angle = Scalar(0);
};

template <typename Scalar>
struct FiniteSupport {
  std::vector<SupportPoint<Scalar>> points;
};

template <typename Scalar>
class MisalignmentDistribution {
 public:
  using Variant = std::variant<HaarSO3, CyclicZ, TwoPointAngleMixture<Scalar>,
                               UniformSegment<Scalar>, FiniteSupport<Scalar>>;

  static MisalignmentDistribution haar() { return MisalignmentDistribution(HaarSO3{}); }

  static MisalignmentDistribution cyclic_z(int n) {
    if (n < 1) throw InvalidArgument("cyclic group order must be at least 1");
    return MisalignmentDistribution(CyclicZ{n});
  }

  static MisalignmentDistribution two_point_mixture(std::vector<Scalar> angles) {
    if (angles.empty()) throw InvalidArgument("angle mixture needs at least one angle");
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (!(angles[i] > Scalar(0))) throw InvalidArgument("mixture angles must be positive");
      for (std::size_t k = 0; k < i; ++k) {
        if (angles[k] == angles[i]) throw InvalidArgument("mixture angles must be distinct");
      }
    }
    return MisalignmentDistribution(TwoPointAngleMixture<Scalar>{std::move(angles)});
  }

  static MisalignmentDistribution uniform_segment(Scalar max_angle) {
    if (!(max_angle >= Scalar(0))) throw InvalidArgument("segment length must be nonnegative");
    return MisalignmentDistribution(UniformSegment<Scalar>{max_angle});
  }

  static MisalignmentDistribution finite_support(std::vector<SupportPoint<Scalar>> points) {
    if (points.empty()) throw InvalidArgument("finite support must be nonempty");
    Probability total = 0;
    for (const auto& p : points) {
      if (p.probability < 0) throw InvalidArgument("probabilities must be nonnegative");
      total += p.probability;
    }
    if (total != 1) throw InvalidArgument("probabilities must sum to 1");
    return MisalignmentDistribution(FiniteSupport<Scalar>{std::move(points)});
  }

  /// Point mass at the identity: a perfectly aligned channel.
  static MisalignmentDistribution aligned() {
    return finite_support({SupportPoint<Scalar>{Rotation<Scalar>::identity(), Probability(1)}});
  }

  const Variant& variant() const { return v_; }

  bool is_finite() const {
    return !std::holds_alternative<HaarSO3>(v_) &&
           !std::holds_alternative<UniformSegment<Scalar>>(v_);
  }

  /// Haar measure on SO(3) or on a cyclic subgroup.
  bool is_uniform_group() const {
    return std::holds_alternative<HaarSO3>(v_) || std::holds_alternative<CyclicZ>(v_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, HaarSO3>) {
            return "haar";
          } else if constexpr (std::is_same_v<T, CyclicZ>) {
            return "z" + std::to_string(x.n);
          } else if constexpr (std::is_same_v<T, TwoPointAngleMixture<Scalar>>) {
            return "two-point-mixture(d=" + std::to_string(x.angles.size()) + ")";
          } else if constexpr (std::is_same_v<T, UniformSegment<Scalar>>) {
            return "uniform-segment";
          } else {
            return "finite(" + std::to_string(x.points.size()) + ")";
          }
        },
        v_);
  }

 private:
  explicit MisalignmentDistribution(Variant v) : v_(std::move(v)) {}

  Variant v_;
};

using Distribution = MisalignmentDistribution<double>;

/// Full support of a finite mu with exact probabilities. The order is fixed:
/// cyclic k = 0..n-1; mixture (j, 1x), (j, 2x) for j = 0..d-1; finite as given.
template <typename Scalar>
std::vector<SupportPoint<Scalar>> enumerate_support(const MisalignmentDistribution<Scalar>& mu) {
  std::vector<SupportPoint<Scalar>> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HaarSO3> || std::is_same_v<T, UniformSegment<Scalar>>) {
          throw InvalidArgument("continuous distribution has no finite support");
        } else if constexpr (std::is_same_v<T, CyclicZ>) {
          constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
          for (int k = 0; k < x.n; ++k) {
            out.push_back({Rotation<Scalar>::about_z(two_pi * Scalar(k) / Scalar(x.n)),
                           Probability(1, x.n)});
          }
        } else if constexpr (std::is_same_v<T, TwoPointAngleMixture<Scalar>>) {
          const auto d = static_cast<std::int64_t>(x.angles.size());
          for (const Scalar theta : x.angles) {
            out.push_back({Rotation<Scalar>::about_z(theta), Probability(1, 2 * d)});
            out.push_back({Rotation<Scalar>::about_z(Scalar(2) * theta), Probability(1, 2 * d)});
          }
        } else {
          out = x.points;
        }
      },
      mu.variant());
  return out;
}

/// Index into enumerate_support(mu) drawn with the support probabilities.
template <typename Scalar>
std::size_t sample_support_index(const MisalignmentDistribution<Scalar>& mu, Rng& rng) {
  return std::visit(
      [&](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HaarSO3> || std::is_same_v<T, UniformSegment<Scalar>>) {
          throw InvalidArgument("continuous distribution has no finite support");
        } else if constexpr (std::is_same_v<T, CyclicZ>) {
          return std::uniform_int_distribution<std::size_t>(0, std::size_t(x.n) - 1)(rng);
        } else if constexpr (std::is_same_v<T, TwoPointAngleMixture<Scalar>>) {
          const std::size_t j =
              std::uniform_int_distribution<std::size_t>(0, x.angles.size() - 1)(rng);
          const std::size_t twice = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
          return 2 * j + twice;
        } else {
          std::vector<double> weights;
          weights.reserve(x.points.size());
          for (const auto& p : x.points) weights.push_back(to_double(p.probability));
          return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
        }
      },
      mu.variant());
}

/// One draw R ~ mu. Deterministic given the stream state.
template <typename Scalar>
Rotation<Scalar> sample(const MisalignmentDistribution<Scalar>& mu, Rng& rng) {
  return std::visit(
      [&](const auto& x) -> Rotation<Scalar> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HaarSO3>) {
          return sample_haar<Scalar>(rng);
        } else if constexpr (std::is_same_v<T, UniformSegment<Scalar>>) {
          return Rotation<Scalar>::about_z(
              std::uniform_real_distribution<Scalar>(Scalar(0), x.max_angle)(rng));
        } else if constexpr (std::is_same_v<T, CyclicZ>) {
          constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
          const std::size_t k = sample_support_index(mu, rng);
          return Rotation<Scalar>::about_z(two_pi * Scalar(k) / Scalar(x.n));
        } else if constexpr (std::is_same_v<T, TwoPointAngleMixture<Scalar>>) {
          const std::size_t idx = sample_support_index(mu, rng);
          const Scalar theta = x.angles[idx / 2];
          return Rotation<Scalar>::about_z(idx % 2 == 0 ? theta : Scalar(2) * theta);
        } else {
          return x.points[sample_support_index(mu, rng)].rotation;
        }
      },
      mu.variant());
}

}  // namespace framecommit
