#include "esr/quantum_core.hpp"

#include "esr/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace esr {

namespace {

bool near(const Matrix4& lhs, const Matrix4& rhs, double tol = kAlgebraicTolerance) {
  return (lhs - rhs).cwiseAbs().maxCoeff() <= tol;
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

bool commute(const Matrix4& lhs, const Matrix4& rhs) {
  return near(lhs * rhs, rhs * lhs);
}

std::string format_direction(const Direction& d) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << '(' << d.x() << ',' << d.y() << ',' << d.z() << ')';
  return os.str();
}

}  // namespace

Direction::Direction(double x, double y, double z) : x_(x), y_(y), z_(z) {
  const double norm2 = x * x + y * y + z * z;
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kAlgebraicTolerance) {
    throw ValidationError("direction is not a unit vector");
  }
}

Direction Direction::normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(norm) || norm < 1e-12) {
    throw ValidationError("cannot normalize a zero or non-finite direction");
  }
  return Direction(x / norm, y / norm, z / norm, Unchecked{});
}

Direction Direction::in_plane(double angle) {
  return Direction(std::sin(angle), 0.0, std::cos(angle), Unchecked{});
}

DensityState::DensityState(Matrix4 matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  if (!matrix_.allFinite()) {
    throw ValidationError("density matrix has non-finite entries");
  }
  if (!near(matrix_, matrix_.adjoint())) {
    throw ValidationError("density matrix is not Hermitian");
  }
  const Complex trace = matrix_.trace();
  if (std::abs(trace.real() - 1.0) > kAlgebraicTolerance ||
      std::abs(trace.imag()) > kAlgebraicTolerance) {
    throw ValidationError("density matrix trace is not 1");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix4> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < kPsdFloor) {
    throw ValidationError("density matrix is not positive semidefinite");
  }
}

DensityState DensityState::from_pure(const Vector4& amplitudes, std::string label) {
  const double norm = amplitudes.norm();
  if (norm < 1e-12) {
    throw ValidationError("zero state vector");
  }
  const Vector4 psi = amplitudes / norm;
  return DensityState(psi * psi.adjoint(), std::move(label));
}

ProjectiveObservable::ProjectiveObservable(std::vector<double> outcomes,
                                           std::vector<Matrix4> projectors, std::string label)
    : outcomes_(std::move(outcomes)), projectors_(std::move(projectors)), label_(std::move(label)) {
  if (outcomes_.empty() || outcomes_.size() != projectors_.size()) {
    throw ValidationError("observable needs one projector per outcome");
  }
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (!std::isfinite(outcomes_[i])) {
      throw ValidationError("observable outcome is not finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (outcomes_[i] == outcomes_[j]) {
        throw ValidationError("observable outcomes are not distinct");
      }
    }
  }
  Matrix4 sum = Matrix4::Zero();
  for (std::size_t i = 0; i < projectors_.size(); ++i) {
    const Matrix4& p = projectors_[i];
    if (!near(p * p, p) || !near(p, p.adjoint())) {
      throw ValidationError("observable projector is not an orthogonal projection");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!near(p * projectors_[j], Matrix4::Zero())) {
        throw ValidationError("observable projectors are not mutually orthogonal");
      }
    }
    sum += p;
  }
  if (!near(sum, Matrix4::Identity())) {
    throw ValidationError("observable projectors do not sum to the identity");
  }
}

bool ProjectiveObservable::has_outcome(double outcome) const {
  return std::find(outcomes_.begin(), outcomes_.end(), outcome) != outcomes_.end();
}

const Matrix4& ProjectiveObservable::projector(double outcome) const {
  const auto it = std::find(outcomes_.begin(), outcomes_.end(), outcome);
  if (it == outcomes_.end()) {
    throw ValidationError("outcome is not in the spectrum of " + label_);
  }
  return projectors_[static_cast<std::size_t>(it - outcomes_.begin())];
}

bool ProjectiveObservable::acts_only_on(Subsystem subsystem) const {
  // An operator is of the form X (x) I iff it commutes with I (x) sigma_k for all k.
  const Subsystem other = subsystem == Subsystem::first ? Subsystem::second : Subsystem::first;
  const Matrix4 generators[] = {embed(pauli_x(), other), embed(pauli_y(), other),
                                embed(pauli_z(), other)};
  return std::all_of(projectors_.begin(), projectors_.end(), [&](const Matrix4& p) {
    return std::all_of(std::begin(generators), std::end(generators),
                       [&](const Matrix4& g) { return commute(p, g); });
  });
}

Matrix2 pauli_x() {
  Matrix2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2 pauli_y() {
  Matrix2 m;
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

Matrix2 pauli_z() {
  Matrix2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix4 kron(const Matrix2& left, const Matrix2& right) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = left(i, j) * right;
    }
  }
  return out;
}

Matrix4 embed(const Matrix2& op, Subsystem subsystem) {
  return subsystem == Subsystem::first ? kron(op, Matrix2::Identity())
                                       : kron(Matrix2::Identity(), op);
}

DensityState singlet_state() {
  const double h = 1.0 / std::sqrt(2.0);
  Vector4 eta;
  eta << 0.0, h, -h, 0.0;
  return DensityState(eta * eta.adjoint(), "singlet");
}

ProjectiveObservable spin_observable(const Direction& direction, Subsystem subsystem,
                                     std::string label) {
  const Matrix2 sigma_a =
      direction.x() * pauli_x() + direction.y() * pauli_y() + direction.z() * pauli_z();
  const Matrix2 up = 0.5 * (Matrix2::Identity() + sigma_a);
  const Matrix2 down = 0.5 * (Matrix2::Identity() - sigma_a);
  if (label.empty()) {
    label = "sigma" + std::to_string(static_cast<int>(subsystem)) + format_direction(direction);
  }
  return ProjectiveObservable({+1.0, -1.0}, {embed(up, subsystem), embed(down, subsystem)},
                              std::move(label));
}

double born_probability(const DensityState& state, const ProjectiveObservable& obs,
                        double outcome) {
  return clamp_probability((state.matrix() * obs.projector(outcome)).trace().real());
}

double born_joint_probability(const DensityState& state, const ProjectiveObservable& obs1,
                              double out1, const ProjectiveObservable& obs2, double out2) {
  const Matrix4& p1 = obs1.projector(out1);
  const Matrix4& p2 = obs2.projector(out2);
  if (!commute(p1, p2)) {
    throw ValidationError("joint probability needs commuting observables");
  }
  return clamp_probability((state.matrix() * p1 * p2).trace().real());
}

double quantum_expectation(const DensityState& state, const ProjectiveObservable& obs) {
  double mean = 0.0;
  for (double a : obs.outcomes()) {
    mean += a * born_probability(state, obs, a);
  }
  return mean;
}

double quantum_expectation_product(const DensityState& state, const ProjectiveObservable& obs1,
                                   const ProjectiveObservable& obs2) {
  double mean = 0.0;
  for (double a : obs1.outcomes()) {
    for (double b : obs2.outcomes()) {
      mean += a * b * born_joint_probability(state, obs1, a, obs2, b);
    }
  }
  return mean;
}

DensityState luders_update(const DensityState& state, const Matrix4& projector) {
  if (!near(projector * projector, projector) || !near(projector, projector.adjoint())) {
    throw ValidationError("Lueders update needs an orthogonal projector");
  }
  const double weight = (state.matrix() * projector).trace().real();
  if (weight <= kZeroBranchTolerance) {
    throw ZeroProbabilityBranch("cannot condition on an outcome of zero probability");
  }
  Matrix4 updated = projector * state.matrix() * projector / weight;
  // Remove the antihermitian roundoff left by the triple product.
  updated = 0.5 * (updated + updated.adjoint()).eval();
  return DensityState(std::move(updated), state.label() + "|P");
}

}  // namespace esr
