#include "esr/cli.hpp"
#include "esr/error.hpp"

#include "format.hpp"

#include <cmath>
#include <numbers>

namespace esr::cli {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kDefaultBoundGridDeg = 1.0;
constexpr double kDefaultScanGridDeg = 45.0;

std::array<double, 4> to_degrees(const std::array<double, 4>& radians) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = radians[i] / kDegree;
  return out;
}

DetectionModel role_model(const std::array<double, 4>& pd) {
  DetectionModel model;
  for (std::size_t r = 0; r < 4; ++r) model.set(DetectionModel::kAny, kChshRoles[r], pd[r]);
  return model;
}

}  // namespace

BoundReport cmd_bound(const ExperimentConfig& config) {
  const ChshSetting s = resolve_setting(config);
  const double step_deg = config.grid_step_deg.value_or(kDefaultBoundGridDeg);
  if (!(step_deg > 0.0) || step_deg > 90.0) {
    throw ValidationError("grid step must lie in (0, 90] degrees");
  }

  BoundReport r;
  r.setting = setting_labels(config);
  r.denominator = std::abs(s.a.dot(s.b) - s.a.dot(s.b_prime)) +
                  std::abs(s.a_prime.dot(s.b) + s.a_prime.dot(s.b_prime));
  r.bound = detection_bound(s);
  r.no_registration_lower_bound = 1.0 - r.bound;
  r.grid_step_deg = step_deg;
  const GridPoint best = min_detection_bound(step_deg * kDegree);
  r.grid_min_bound = best.value;
  r.grid_min_angles_deg = to_degrees(best.angles);
  r.grid_no_registration_lower_bound = 1.0 - best.value;
  return r;
}

ScanReport cmd_scan(const ExperimentConfig& config) {
  const double step_deg = config.grid_step_deg.value_or(kDefaultScanGridDeg);
  if (!(step_deg > 0.0) || step_deg > 90.0) {
    throw ValidationError("grid step must lie in (0, 90] degrees");
  }
  const DensityState state = resolve_state(config);
  const DetectionModel det = resolve_chsh_detection(config);

  ScanReport r;
  r.state = state.label();
  r.grid_step_deg = step_deg;
  r.rows = angle_scan(state, det, step_deg * kDegree, config.workers);
  for (const auto& row : r.rows) {
    if (!row.report) throw ConfigurationError(row.error);
  }
  return r;
}

SimulateReport cmd_simulate(const ExperimentConfig& config) {
  if (config.trials < 1) throw ValidationError("--trials must be at least 1");
  const MicrostateModel model = model_by_name(config.model);
  const ChshSetting setting = resolve_setting(config);
  const DensityState state = resolve_state(config);

  SimulateReport r;
  r.model = model.name();
  r.trials = config.trials;
  r.seed = config.seed;
  r.setting = setting_labels(config);
  const SimulationSummary summary = run_experiment(model, chsh_setting_pairs(setting),
                                                   config.trials, config.seed, config.workers);
  r.stats = chsh_statistics(summary);

  std::array<double, 4> pd{};
  for (std::size_t k = 0; k < 4; ++k) pd[k] = r.stats.detection[k].value;
  const double modified = modified_chsh_lhs(setting, state, role_model(pd)).modified_lhs;
  // First-order propagation of the detection-frequency errors.
  double spread = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    auto shifted = pd;
    shifted[k] = std::clamp(pd[k] + r.stats.detection[k].std_error, 0.0, 1.0);
    spread += std::abs(modified_chsh_lhs(setting, state, role_model(shifted)).modified_lhs - modified);
  }
  r.modified_chsh_measured = {modified, spread};
  return r;
}

SequentialReport cmd_sequential(const ExperimentConfig& config) {
  const DensityState state = resolve_state(config);
  const Direction a = resolve_direction(config.obs_a);
  const Direction b = resolve_direction(config.obs_b);
  const GeneralizedObservable obs_a(spin_observable(a, Subsystem::first, kChshRoles[0]));
  const GeneralizedObservable obs_b(spin_observable(b, Subsystem::second, kChshRoles[2]));

  DetectionModel det(config.apparatus_factor);
  if (config.detection.size() == 1) {
    det.set(DetectionModel::kAny, DetectionModel::kAny, config.detection[0]);
  } else if (config.detection.size() == 2) {
    det.set(DetectionModel::kAny, obs_a.label(), config.detection[0]);
    det.set(DetectionModel::kAny, obs_b.label(), config.detection[1]);
  } else {
    throw ValidationError("sequential needs one detection value or two (A, B)");
  }

  const OutcomeDistribution table = sequential_distribution_factored(state, obs_a, obs_b, det);
  SequentialReport r;
  r.state = state.label();
  r.a = config.obs_a.degrees ? fixed6(*config.obs_a.degrees)
                             : "(" + fixed6(a.x()) + ";" + fixed6(a.y()) + ";" + fixed6(a.z()) + ")";
  r.b = config.obs_b.degrees ? fixed6(*config.obs_b.degrees)
                             : "(" + fixed6(b.x()) + ";" + fixed6(b.y()) + ";" + fixed6(b.z()) + ")";
  r.pd_a = det.effective(state, obs_a);
  r.pd_b = det.effective(state, obs_b);
  r.entries = table.entries();
  r.total = table.total();
  r.correlation = generalized_correlation(state, obs_a, obs_b, det);
  return r;
}

}  // namespace esr::cli
