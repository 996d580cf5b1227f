#pragma once

// Standard and detection-weighted (modified) CHSH functionals, the detection
// probability bound and searches over coplanar measurement angles.

#include "esr/esr_calculus.hpp"
#include "esr/quantum_core.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace esr {

inline constexpr double kViolationTolerance = 1e-12;
inline constexpr double kChshClassicalLimit = 2.0;

struct ChshSetting {
  Direction a;
  Direction a_prime;
  Direction b;
  Direction b_prime;

  // Coplanar setting from four angles (radians) in the xz-plane.
  static ChshSetting coplanar(double a, double a_prime, double b, double b_prime);
  static ChshSetting coplanar_degrees(double a, double a_prime, double b, double b_prime);
  // a = 0, a' = 90, b = 45, b' = 135 degrees.
  static ChshSetting tsirelson();
};

// Observable labels used for detection lookups. A DetectionModel may key
// entries by these roles to give the four observables distinct probabilities.
inline constexpr std::array<const char*, 4> kChshRoles = {"A(a)", "A(a')", "B(b)", "B(b')"};

struct ChshReport {
  // Conditional expectation values <A(x)B(y)>.
  double e_ab = 0.0;
  double e_ab_prime = 0.0;
  double e_a_prime_b = 0.0;
  double e_a_prime_b_prime = 0.0;
  double standard_lhs = 0.0;
  double modified_lhs = 0.0;
  // P^d for A(a), A(a'), B(b), B(b').
  std::array<double, 4> detection_probs{};
  // Closed-form bound, only present when the four detection probabilities agree.
  std::optional<double> bound;
  // max_{x,y} P^d(A(x)) P^d(B(y)); a heuristic comparison figure for
  // asymmetric detection, compared against 1/sqrt(2).
  double max_detection_product = 0.0;
  bool standard_violated = false;
  bool modified_violated = false;
};

double standard_chsh_lhs(double e_ab, double e_ab_prime, double e_a_prime_b,
                         double e_a_prime_b_prime);

// |P^d(A(a))[P^d(B(b))<ab> - P^d(B(b'))<ab'>]| + |P^d(A(a'))[P^d(B(b))<a'b> + P^d(B(b'))<a'b'>]|
ChshReport modified_chsh_lhs(const ChshSetting& setting, const DensityState& state,
                             const DetectionModel& det);

// sqrt(2 / (|a.b - a.b'| + |a'.b + a'.b'|)) capped at 1.
double detection_bound(const ChshSetting& setting);

struct GridPoint {
  std::array<double, 4> angles{};  // radians: a, a', b, b'
  double value = 0.0;
};

// Exhaustive minimum of detection_bound over coplanar quadruples on a grid
// of the given step (radians) covering [0, 2 pi).
GridPoint min_detection_bound(double step);

enum class ChshObjective { standard, modified };

// Extremes of both functionals over the full coplanar grid. Exact over the
// grid; uses the fact that each absolute-value term depends on only one of
// a, a' once (b, b') is fixed.
struct GridExtremes {
  GridPoint max_standard;
  GridPoint max_modified;
  GridPoint min_bound;
  bool any_modified_violated = false;
  bool any_standard_violated = false;
};

GridExtremes grid_extremes(const DensityState& state, const DetectionModel& det, double step);

struct OptimizerOptions {
  double grid_step = 10.0 * 3.14159265358979323846 / 180.0;
  int max_iterations = 200;
};

struct ChshOptimum {
  ChshSetting setting;
  std::array<double, 4> angles{};
  double value = 0.0;
};

// Grid search over coplanar quadruples followed by Nelder-Mead refinement.
ChshOptimum optimize_chsh_angles(const DensityState& state, const DetectionModel& det,
                                 ChshObjective objective, const OptimizerOptions& options = {});

struct ScanRow {
  std::array<double, 4> angles{};  // radians
  std::optional<ChshReport> report;
  std::string error;  // set when the report could not be produced
};

// Reports for every coplanar quadruple on the grid, in lexicographic
// (a, a', b, b') order. `workers` only affects speed.
std::vector<ScanRow> angle_scan(const DensityState& state, const DetectionModel& det, double step,
                                unsigned workers = 1);

// Number of grid angles in [0, 2 pi) for a step.
std::size_t grid_size(double step);

}  // namespace esr
