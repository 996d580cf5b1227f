#pragma once

// Two-qubit quantum mechanics: states, spin observables, Born-rule
// probabilities, product expectation values and Lueders updates.
//
// Basis ordering is fixed as (++, +-, -+, --), i.e. index = 2*i1 + i2 with
// i = 0 for spin up along z. All serialization uses the same ordering.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace esr {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Matrix2 = Eigen::Matrix2cd;
using Vector4 = Eigen::Vector4cd;

inline constexpr double kAlgebraicTolerance = 1e-12;
inline constexpr double kPsdFloor = -1e-10;
inline constexpr double kZeroBranchTolerance = 1e-14;

// Unit 3-vector. Construction validates the norm.
class Direction {
 public:
  Direction(double x, double y, double z);

  // Rescales (x, y, z) to unit norm; throws on a (near) zero vector.
  static Direction normalized(double x, double y, double z);
  // Direction at `angle` radians from +z towards +x in the xz-plane.
  static Direction in_plane(double angle);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double dot(const Direction& other) const {
    return x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
  }

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  struct Unchecked {};
  Direction(double x, double y, double z, Unchecked) : x_(x), y_(y), z_(z) {}

  double x_;
  double y_;
  double z_;
};

enum class Subsystem { first = 1, second = 2 };

// Hermitian, unit-trace, positive semidefinite 4x4 matrix.
class DensityState {
 public:
  DensityState(Matrix4 matrix, std::string label);

  static DensityState from_pure(const Vector4& amplitudes, std::string label);

  const Matrix4& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }

 private:
  Matrix4 matrix_;
  std::string label_;
};

// Discrete projective observable: distinct outcomes with a complete family of
// mutually orthogonal projectors.
class ProjectiveObservable {
 public:
  ProjectiveObservable(std::vector<double> outcomes, std::vector<Matrix4> projectors,
                       std::string label);

  const std::vector<double>& outcomes() const { return outcomes_; }
  const std::vector<Matrix4>& projectors() const { return projectors_; }
  const std::string& label() const { return label_; }

  // Projector of `outcome`; throws ValidationError if it is not in the spectrum.
  const Matrix4& projector(double outcome) const;
  bool has_outcome(double outcome) const;

  // True when every projector has the form P (x) I (first) or I (x) P (second).
  bool acts_only_on(Subsystem subsystem) const;

 private:
  std::vector<double> outcomes_;
  std::vector<Matrix4> projectors_;
  std::string label_;
};

Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();
Matrix4 kron(const Matrix2& left, const Matrix2& right);
// Embeds a single-qubit operator into the two-qubit space.
Matrix4 embed(const Matrix2& op, Subsystem subsystem);

DensityState singlet_state();

// sigma . direction on one qubit: outcomes (+1, -1) with projectors (I +- sigma.a)/2.
ProjectiveObservable spin_observable(const Direction& direction, Subsystem subsystem,
                                     std::string label = {});

// Tr[rho P], clamped to [0, 1].
double born_probability(const DensityState& state, const ProjectiveObservable& obs,
                        double outcome);

// Tr[rho P1 P2], clamped to [0, 1]. The two observables must commute.
double born_joint_probability(const DensityState& state, const ProjectiveObservable& obs1,
                              double out1, const ProjectiveObservable& obs2, double out2);

double quantum_expectation(const DensityState& state, const ProjectiveObservable& obs);

// sum_{n,p} a_n b_p P(a_n, b_p).
double quantum_expectation_product(const DensityState& state, const ProjectiveObservable& obs1,
                                   const ProjectiveObservable& obs2);

// P rho P / Tr[rho P]. Throws ZeroProbabilityBranch if Tr[rho P] <= 1e-14.
DensityState luders_update(const DensityState& state, const Matrix4& projector);

}  // namespace esr
