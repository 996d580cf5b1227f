#include "esr/bchsh.hpp"

#include "esr/error.hpp"
#include "esr/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace esr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<double, 4> role_detection(const DensityState& state, const DetectionModel& det) {
  std::array<double, 4> pd{};
  for (std::size_t r = 0; r < kChshRoles.size(); ++r) {
    pd[r] = det.effective(state.label(), kChshRoles[r]);
  }
  return pd;
}

double modified_value(const std::array<double, 4>& e, const std::array<double, 4>& pd) {
  // pd order: A(a), A(a'), B(b), B(b'); e order: ab, ab', a'b, a'b'.
  return std::abs(pd[0] * (pd[2] * e[0] - pd[3] * e[1])) +
         std::abs(pd[1] * (pd[2] * e[2] + pd[3] * e[3]));
}

ChshReport assemble_report(const std::array<double, 4>& e, const std::array<double, 4>& pd,
                           const ChshSetting& setting) {
  ChshReport r;
  r.e_ab = e[0];
  r.e_ab_prime = e[1];
  r.e_a_prime_b = e[2];
  r.e_a_prime_b_prime = e[3];
  r.standard_lhs = standard_chsh_lhs(e[0], e[1], e[2], e[3]);
  r.modified_lhs = modified_value(e, pd);
  r.detection_probs = pd;
  if (pd[0] == pd[1] && pd[0] == pd[2] && pd[0] == pd[3]) {
    r.bound = detection_bound(setting);
  }
  r.max_detection_product = std::max(pd[0], pd[1]) * std::max(pd[2], pd[3]);
  r.standard_violated = r.standard_lhs > kChshClassicalLimit + kViolationTolerance;
  r.modified_violated = r.modified_lhs > kChshClassicalLimit + kViolationTolerance;
  return r;
}

std::vector<double> grid_angles(double step) {
  std::vector<double> out(grid_size(step));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(i) * step;
  return out;
}

// Conditional correlations <A(theta_i) B(theta_j)> for every pair of grid angles.
class CorrelationTable {
 public:
  CorrelationTable(const DensityState& state, const std::vector<double>& angles)
      : n_(angles.size()), values_(n_ * n_) {
    std::vector<ProjectiveObservable> side_a;
    std::vector<ProjectiveObservable> side_b;
    side_a.reserve(n_);
    side_b.reserve(n_);
    for (double angle : angles) {
      side_a.push_back(spin_observable(Direction::in_plane(angle), Subsystem::first));
      side_b.push_back(spin_observable(Direction::in_plane(angle), Subsystem::second));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        values_[i * n_ + j] = quantum_expectation_product(state, side_a[i], side_b[j]);
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

std::array<double, 4> angles_of(const std::vector<double>& grid, std::size_t i, std::size_t ip,
                                std::size_t j, std::size_t jp) {
  return {grid[i], grid[ip], grid[j], grid[jp]};
}

ChshSetting setting_of(const std::array<double, 4>& angles) {
  return ChshSetting::coplanar(angles[0], angles[1], angles[2], angles[3]);
}

// For fixed (b, b'), the best a maximizes |T1(a)| and the best a' maximizes
// |T2(a')| independently. `term1(i)`/`term2(i)` evaluate the two absolute values.
template <typename Term1, typename Term2>
void best_over_a(std::size_t n, Term1&& term1, Term2&& term2, double& value, std::size_t& arg1,
                 std::size_t& arg2) {
  double best1 = -1.0;
  double best2 = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = term1(i);
    const double t2 = term2(i);
    if (t1 > best1) {
      best1 = t1;
      arg1 = i;
    }
    if (t2 > best2) {
      best2 = t2;
      arg2 = i;
    }
  }
  value = best1 + best2;
}

}  // namespace

ChshSetting ChshSetting::coplanar(double a, double a_prime, double b, double b_prime) {
  return {Direction::in_plane(a), Direction::in_plane(a_prime), Direction::in_plane(b),
          Direction::in_plane(b_prime)};
}

ChshSetting ChshSetting::coplanar_degrees(double a, double a_prime, double b, double b_prime) {
  constexpr double k = std::numbers::pi / 180.0;
  return coplanar(a * k, a_prime * k, b * k, b_prime * k);
}

ChshSetting ChshSetting::tsirelson() { return coplanar_degrees(0.0, 90.0, 45.0, 135.0); }

std::size_t grid_size(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ValidationError("grid step must be positive");
  }
  return static_cast<std::size_t>(std::ceil(kTwoPi / step - 1e-9));
}

double standard_chsh_lhs(double e_ab, double e_ab_prime, double e_a_prime_b,
                         double e_a_prime_b_prime) {
  for (double e : {e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime}) {
    if (!(std::abs(e) <= 1.0 + kAlgebraicTolerance)) {
      throw ValidationError("correlation values must lie in [-1, 1]");
    }
  }
  return std::abs(e_ab - e_ab_prime) + std::abs(e_a_prime_b + e_a_prime_b_prime);
}

ChshReport modified_chsh_lhs(const ChshSetting& setting, const DensityState& state,
                             const DetectionModel& det) {
  const auto pd = role_detection(state, det);
  const auto a = spin_observable(setting.a, Subsystem::first, kChshRoles[0]);
  const auto ap = spin_observable(setting.a_prime, Subsystem::first, kChshRoles[1]);
  const auto b = spin_observable(setting.b, Subsystem::second, kChshRoles[2]);
  const auto bp = spin_observable(setting.b_prime, Subsystem::second, kChshRoles[3]);
  const std::array<double, 4> e = {
      quantum_expectation_product(state, a, b), quantum_expectation_product(state, a, bp),
      quantum_expectation_product(state, ap, b), quantum_expectation_product(state, ap, bp)};
  return assemble_report(e, pd, setting);
}

double detection_bound(const ChshSetting& s) {
  const double denominator = std::abs(s.a.dot(s.b) - s.a.dot(s.b_prime)) +
                             std::abs(s.a_prime.dot(s.b) + s.a_prime.dot(s.b_prime));
  if (denominator < 1e-14) return 1.0;
  return std::min(1.0, std::sqrt(2.0 / denominator));
}

GridPoint min_detection_bound(double step) {
  const auto grid = grid_angles(step);
  const std::size_t n = grid.size();
  std::vector<double> cosines(n);
  for (std::size_t d = 0; d < n; ++d) cosines[d] = std::cos(grid[d]);
  // Coplanar a.b = cos(theta_a - theta_b); index differences wrap on the grid
  // only when the step divides 2 pi, so use the direct cosine otherwise.
  const bool periodic = std::abs(static_cast<double>(n) * step - kTwoPi) < 1e-9;
  auto dot = [&](std::size_t i, std::size_t j) {
    return periodic ? cosines[(i + n - j) % n] : std::cos(grid[i] - grid[j]);
  };

  double best_denominator = -1.0;
  std::array<std::size_t, 4> best_idx{};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t jp = 0; jp < n; ++jp) {
      double value = 0.0;
      std::size_t i = 0;
      std::size_t ip = 0;
      best_over_a(
          n, [&](std::size_t k) { return std::abs(dot(k, j) - dot(k, jp)); },
          [&](std::size_t k) { return std::abs(dot(k, j) + dot(k, jp)); }, value, i, ip);
      if (value > best_denominator) {
        best_denominator = value;
        best_idx = {i, ip, j, jp};
      }
    }
  }
  GridPoint out;
  out.angles = angles_of(grid, best_idx[0], best_idx[1], best_idx[2], best_idx[3]);
  out.value = detection_bound(setting_of(out.angles));
  return out;
}

GridExtremes grid_extremes(const DensityState& state, const DetectionModel& det, double step) {
  const auto pd = role_detection(state, det);
  const auto grid = grid_angles(step);
  const std::size_t n = grid.size();
  const CorrelationTable table(state, grid);

  GridExtremes out;
  out.max_standard.value = -1.0;
  out.max_modified.value = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t jp = 0; jp < n; ++jp) {
      double value = 0.0;
      std::size_t i = 0;
      std::size_t ip = 0;
      best_over_a(
          n, [&](std::size_t k) { return std::abs(table(k, j) - table(k, jp)); },
          [&](std::size_t k) { return std::abs(table(k, j) + table(k, jp)); }, value, i, ip);
      if (value > out.max_standard.value) {
        out.max_standard.value = value;
        out.max_standard.angles = angles_of(grid, i, ip, j, jp);
      }
      best_over_a(
          n,
          [&](std::size_t k) { return std::abs(pd[0] * (pd[2] * table(k, j) - pd[3] * table(k, jp))); },
          [&](std::size_t k) { return std::abs(pd[1] * (pd[2] * table(k, j) + pd[3] * table(k, jp))); },
          value, i, ip);
      if (value > out.max_modified.value) {
        out.max_modified.value = value;
        out.max_modified.angles = angles_of(grid, i, ip, j, jp);
      }
    }
  }
  out.min_bound = min_detection_bound(step);
  out.any_standard_violated = out.max_standard.value > kChshClassicalLimit + kViolationTolerance;
  out.any_modified_violated = out.max_modified.value > kChshClassicalLimit + kViolationTolerance;
  return out;
}

ChshOptimum optimize_chsh_angles(const DensityState& state, const DetectionModel& det,
                                 ChshObjective objective, const OptimizerOptions& options) {
  if (options.max_iterations < 0) {
    throw ValidationError("iteration budget must be non-negative");
  }
  const GridExtremes coarse = grid_extremes(state, det, options.grid_step);
  const GridPoint& start =
      objective == ChshObjective::standard ? coarse.max_standard : coarse.max_modified;

  auto negated = [&](const std::array<double, 4>& angles) {
    const ChshReport r = modified_chsh_lhs(setting_of(angles), state, det);
    return -(objective == ChshObjective::standard ? r.standard_lhs : r.modified_lhs);
  };
  const double half = 0.5 * options.grid_step;
  const auto refined = nelder_mead_minimize<4>(negated, start.angles, {half, half, half, half},
                                               options.max_iterations);

  std::array<double, 4> angles = start.angles;
  double value = start.value;
  if (-refined.value >= start.value) {
    angles = refined.point;
    value = -refined.value;
  } else {
    value = -negated(start.angles);
  }
  for (double& angle : angles) {
    angle = std::fmod(angle, kTwoPi);
    if (angle < 0.0) angle += kTwoPi;
  }
  return {setting_of(angles), angles, value};
}

std::vector<ScanRow> angle_scan(const DensityState& state, const DetectionModel& det, double step,
                                unsigned workers) {
  if (!(step > 0.0) || step > std::numbers::pi / 2.0 + 1e-15) {
    throw ValidationError("scan step must lie in (0, pi/2]");
  }
  const auto grid = grid_angles(step);
  const std::size_t n = grid.size();
  const CorrelationTable table(state, grid);

  std::array<double, 4> pd{};
  std::string error;
  try {
    pd = role_detection(state, det);
  } catch (const ConfigurationError& e) {
    error = e.what();
  }

  const std::size_t total = n * n * n * n;
  std::vector<ScanRow> rows(total);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t jp = idx % n;
      const std::size_t j = (idx / n) % n;
      const std::size_t ip = (idx / (n * n)) % n;
      const std::size_t i = idx / (n * n * n);
      ScanRow& row = rows[idx];
      row.angles = angles_of(grid, i, ip, j, jp);
      if (!error.empty()) {
        row.error = error;
        continue;
      }
      const std::array<double, 4> e = {table(i, j), table(i, jp), table(ip, j), table(ip, jp)};
      row.report = assemble_report(e, pd, setting_of(row.angles));
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1 || total < 2) {
    fill(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t begin = 0; begin < total; begin += chunk) {
      pool.emplace_back(fill, begin, std::min(total, begin + chunk));
    }
  }
  return rows;
}

}  // namespace esr
