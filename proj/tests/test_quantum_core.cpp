#include "doctest.h"

#include "esr/error.hpp"
#include "esr/quantum_core.hpp"
#include "support/generators.hpp"

#include <cmath>
#include <numbers>

using namespace esr;
using esr::testing::Rng;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Direction z_axis() { return Direction(0, 0, 1); }
Direction x_axis() { return Direction(1, 0, 0); }

// Tr[rho (sigma.a (x) sigma.b)] straight from Pauli algebra.
double pauli_correlation(const DensityState& s, const Direction& a, const Direction& b) {
  return (s.matrix() * kron(testing::sigma_dot(a), testing::sigma_dot(b))).trace().real();
}

Matrix2 rotation_y(double angle) {
  Matrix2 u;
  u << std::cos(angle / 2), -std::sin(angle / 2), std::sin(angle / 2), std::cos(angle / 2);
  return u;
}

}  // namespace

TEST_CASE("direction validates unit norm") {
  CHECK_NOTHROW(Direction(0, 0, 1));
  CHECK_THROWS_AS(Direction(1, 1, 0), ValidationError);
  CHECK_THROWS_AS(Direction(0, 0, 1 + 1e-9), ValidationError);
  CHECK_THROWS_AS(Direction::normalized(0, 0, 0), ValidationError);
  const Direction d = Direction::normalized(1, 1, 1);
  CHECK(d.x() == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  const Direction p = Direction::in_plane(std::numbers::pi / 2);
  CHECK(p.x() == doctest::Approx(1.0));
  CHECK(std::abs(p.z()) < 1e-15);
}

TEST_CASE("density state invariants are enforced") {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityState(m, "half"), ValidationError);  // trace
  m(1, 1) = 0.5;
  CHECK_NOTHROW(DensityState(m, "mix"));
  Matrix4 nonherm = m;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityState(nonherm, "x"), ValidationError);
  Matrix4 negative = Matrix4::Zero();
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityState(negative, "neg"), ValidationError);
}

TEST_CASE("singlet state") {
  const DensityState s = singlet_state();
  const Matrix4& rho = s.matrix();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double expected = 0.0;
      if ((i == 1 && j == 1) || (i == 2 && j == 2)) expected = 0.5;
      if ((i == 1 && j == 2) || (i == 2 && j == 1)) expected = -0.5;
      CHECK(std::abs(rho(i, j) - Complex(expected)) < 1e-15);
    }
  }
  CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-15);
  CHECK(s.label() == "singlet");

  SUBCASE("invariant under a common rotation about y by 0.7 rad") {
    const Matrix4 u = kron(rotation_y(0.7), rotation_y(0.7));
    const Matrix4 rotated = u * rho * u.adjoint();
    CHECK((rotated - rho).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spin observables") {
  SUBCASE("z on subsystem 1") {
    const auto obs = spin_observable(z_axis(), Subsystem::first);
    Matrix4 up = Matrix4::Zero();
    up(0, 0) = up(1, 1) = 1.0;
    Matrix4 down = Matrix4::Zero();
    down(2, 2) = down(3, 3) = 1.0;
    CHECK((obs.projector(+1) - up).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((obs.projector(-1) - down).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(obs.acts_only_on(Subsystem::first));
    CHECK_FALSE(obs.acts_only_on(Subsystem::second));
  }
  SUBCASE("x on subsystem 2 has 1/2 blocks") {
    const auto obs = spin_observable(x_axis(), Subsystem::second);
    Matrix4 expected = Matrix4::Zero();
    expected.block<2, 2>(0, 0).setConstant(0.5);
    expected.block<2, 2>(2, 2).setConstant(0.5);
    CHECK((obs.projector(+1) - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(obs.acts_only_on(Subsystem::second));
  }
  SUBCASE("completeness along (1,1,1)/sqrt3") {
    const auto obs = spin_observable(Direction::normalized(1, 1, 1), Subsystem::first);
    CHECK((obs.projector(+1) + obs.projector(-1) - Matrix4::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("labels record subsystem and direction") {
    const auto obs = spin_observable(z_axis(), Subsystem::second);
    CHECK(obs.label() == "sigma2(0.000000,0.000000,1.000000)");
    CHECK(spin_observable(z_axis(), Subsystem::first, "A").label() == "A");
  }
  SUBCASE("invalid projector families are rejected") {
    Matrix4 half = 0.5 * Matrix4::Identity();
    CHECK_THROWS_AS(ProjectiveObservable({1.0}, {half}, "bad"), ValidationError);
    CHECK_THROWS_AS(ProjectiveObservable({1.0, 1.0},
                                         {Matrix4::Identity(), Matrix4::Zero()}, "dup"),
                    ValidationError);
    Matrix4 p = Matrix4::Zero();
    p(0, 0) = 1.0;
    CHECK_THROWS_AS(ProjectiveObservable({1.0}, {p}, "incomplete"), ValidationError);
  }
}

TEST_CASE("Born probabilities") {
  const auto s = singlet_state();
  const auto z1 = spin_observable(z_axis(), Subsystem::first);
  const auto z2 = spin_observable(z_axis(), Subsystem::second);
  const auto x2 = spin_observable(x_axis(), Subsystem::second);
  CHECK(born_probability(s, z1, +1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(born_joint_probability(s, z1, +1, z2, +1) == doctest::Approx(0.0));
  CHECK(born_joint_probability(s, z1, +1, x2, +1) == doctest::Approx(0.25).epsilon(1e-15));

  SUBCASE("closed form (1 - alpha beta a.b)/4 for random directions") {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
      const Direction a = testing::random_direction(rng);
      const Direction b = testing::random_direction(rng);
      const auto oa = spin_observable(a, Subsystem::first);
      const auto ob = spin_observable(b, Subsystem::second);
      for (int alpha : {+1, -1}) {
        for (int beta : {+1, -1}) {
          const double oracle = (1.0 - alpha * beta * a.dot(b)) / 4.0;
          CHECK(std::abs(born_joint_probability(s, oa, alpha, ob, beta) - oracle) < 1e-12);
        }
      }
    }
  }

  SUBCASE("error paths") {
    CHECK_THROWS_AS(born_probability(s, z1, 0.0), ValidationError);
    const auto x1 = spin_observable(x_axis(), Subsystem::first);
    CHECK_THROWS_AS(born_joint_probability(s, z1, +1, x1, +1), ValidationError);
  }
}

TEST_CASE("product expectation values") {
  const auto s = singlet_state();
  auto e = [&](const Direction& a, const Direction& b) {
    return quantum_expectation_product(s, spin_observable(a, Subsystem::first),
                                       spin_observable(b, Subsystem::second));
  };
  CHECK(e(z_axis(), z_axis()) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(e(z_axis(), x_axis())) < 1e-12);
  const double at45 = e(Direction::in_plane(0), Direction::in_plane(std::numbers::pi / 4));
  CHECK(std::abs(at45 + 1 / kSqrt2) < 1e-12);

  SUBCASE("singlet: -a.b for 100 random pairs") {
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
      const Direction a = testing::random_direction(rng);
      const Direction b = testing::random_direction(rng);
      CHECK(std::abs(e(a, b) + a.dot(b)) < 1e-12);
    }
  }

  SUBCASE("random states agree with the Pauli trace") {
    Rng rng(6);
    for (int k = 0; k < 50; ++k) {
      const auto state = testing::random_state(rng, 1 + k % 4);
      const Direction a = testing::random_direction(rng);
      const Direction b = testing::random_direction(rng);
      const double route = quantum_expectation_product(
          state, spin_observable(a, Subsystem::first), spin_observable(b, Subsystem::second));
      CHECK(std::abs(route - pauli_correlation(state, a, b)) < 1e-12);
    }
  }
}

TEST_CASE("probabilities stay in [0,1] and marginals sum to 1") {
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const auto state = testing::random_state(rng, 1 + k % 4);
    const auto oa = spin_observable(testing::random_direction(rng), Subsystem::first);
    const auto ob = spin_observable(testing::random_direction(rng), Subsystem::second);
    double joint_total = 0.0;
    for (double a : oa.outcomes()) {
      for (double b : ob.outcomes()) {
        const double p = born_joint_probability(state, oa, a, ob, b);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        joint_total += p;
      }
    }
    CHECK(std::abs(joint_total - 1.0) < 1e-12);
    CHECK(std::abs(born_probability(state, oa, +1) + born_probability(state, oa, -1) - 1.0) <
          1e-12);
  }
}

TEST_CASE("Lueders update") {
  const auto s = singlet_state();
  const auto z1 = spin_observable(z_axis(), Subsystem::first);
  const auto z2 = spin_observable(z_axis(), Subsystem::second);

  SUBCASE("conditioning the singlet on +z for particle 1") {
    const auto after = luders_update(s, z1.projector(+1));
    Matrix4 expected = Matrix4::Zero();
    expected(1, 1) = 1.0;  // |+,-><+,-|
    CHECK((after.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(born_probability(after, z2, -1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("identity projector leaves the state unchanged") {
    Rng rng(8);
    const auto state = testing::random_state(rng);
    const auto after = luders_update(state, Matrix4::Identity());
    CHECK((after.matrix() - state.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("idempotent") {
    const auto x1 = spin_observable(x_axis(), Subsystem::first);
    const auto once = luders_update(s, x1.projector(-1));
    const auto twice = luders_update(once, x1.projector(-1));
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero-probability branch") {
    const auto after = luders_update(s, z1.projector(+1));  // |+,->
    CHECK_THROWS_AS(luders_update(after, z2.projector(+1)), ZeroProbabilityBranch);
  }
  SUBCASE("non-projector rejected") {
    CHECK_THROWS_AS(luders_update(s, 0.5 * Matrix4::Identity()), ValidationError);
  }
  SUBCASE("chain rule P(a,b) = P(a) P_{S_a}(b) on random states") {
    Rng rng(9);
    for (int k = 0; k < 50; ++k) {
      const auto state = testing::random_state(rng, 1 + k % 4);
      const auto oa = spin_observable(testing::random_direction(rng), Subsystem::first);
      const auto ob = spin_observable(testing::random_direction(rng), Subsystem::second);
      for (double a : oa.outcomes()) {
        const double pa = born_probability(state, oa, a);
        if (pa < 1e-10) continue;
        const auto conditioned = luders_update(state, oa.projector(a));
        for (double b : ob.outcomes()) {
          CHECK(std::abs(born_joint_probability(state, oa, a, ob, b) -
                         pa * born_probability(conditioned, ob, b)) < 1e-12);
        }
      }
    }
  }
}
