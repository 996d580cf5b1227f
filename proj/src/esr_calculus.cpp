#include "esr/esr_calculus.hpp"

#include "esr/error.hpp"

#include <algorithm>
#include <cmath>

namespace esr {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

void require_bipartite(const GeneralizedObservable& obs_a, const GeneralizedObservable& obs_b) {
  if (!obs_a.base().acts_only_on(Subsystem::first) ||
      !obs_b.base().acts_only_on(Subsystem::second)) {
    throw ValidationError(
        "factored form needs A on subsystem 1 and B on subsystem 2 (" + obs_a.label() + ", " +
        obs_b.label() + ")");
  }
}

}  // namespace

GeneralizedObservable::GeneralizedObservable(ProjectiveObservable base,
                                             double no_registration_outcome)
    : base_(std::move(base)), no_registration_(no_registration_outcome) {
  if (!std::isfinite(no_registration_)) {
    throw ValidationError("no-registration outcome must be finite");
  }
  if (base_.has_outcome(no_registration_)) {
    throw ValidationError("no-registration outcome collides with a quantum outcome of " +
                          base_.label());
  }
}

std::vector<double> GeneralizedObservable::spectrum() const {
  std::vector<double> out = base_.outcomes();
  out.push_back(no_registration_);
  return out;
}

DetectionModel::DetectionModel(double apparatus_factor) : apparatus_factor_(apparatus_factor) {
  require_probability(apparatus_factor, "apparatus factor");
}

DetectionModel DetectionModel::uniform(double probability, double apparatus_factor) {
  DetectionModel model(apparatus_factor);
  model.set(kAny, kAny, probability);
  return model;
}

DetectionModel& DetectionModel::set(const std::string& state_label,
                                    const std::string& observable_label, double probability) {
  require_probability(probability, "detection probability");
  entries_[{state_label, observable_label}] = probability;
  return *this;
}

double DetectionModel::effective(const std::string& state_label,
                                 const std::string& observable_label) const {
  const std::pair<std::string, std::string> keys[] = {
      {state_label, observable_label},
      {state_label, kAny},
      {kAny, observable_label},
      {kAny, kAny},
  };
  for (const auto& key : keys) {
    if (const auto it = entries_.find(key); it != entries_.end()) {
      return it->second * apparatus_factor_;
    }
  }
  throw ConfigurationError("no detection probability for state '" + state_label +
                           "' and observable '" + observable_label + "'");
}

OutcomeDistribution::OutcomeDistribution(DistributionKind kind, std::vector<OutcomeEntry> entries)
    : kind_(kind), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
      throw ValidationError("distribution entry outside [0, 1]");
    }
  }
  if (std::abs(total() - 1.0) > kAlgebraicTolerance) {
    throw ValidationError("distribution does not sum to 1");
  }
}

double OutcomeDistribution::total() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.probability;
  return sum;
}

double OutcomeDistribution::mean() const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    sum += (kind_ == DistributionKind::single ? e.a : e.a * e.b) * e.probability;
  }
  return sum;
}

double OutcomeDistribution::probability(double a) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.a == a) sum += e.probability;
  }
  return sum;
}

double OutcomeDistribution::probability(double a, double b) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.a == a && e.b == b) sum += e.probability;
  }
  return sum;
}

double joint_detection_probability(double conditional_prob, double detection_prob) {
  require_probability(conditional_prob, "conditional probability");
  require_probability(detection_prob, "detection probability");
  return detection_prob * conditional_prob;
}

OutcomeDistribution outcome_distribution(const DensityState& state,
                                         const GeneralizedObservable& obs,
                                         const DetectionModel& det) {
  const double pd = det.effective(state, obs);
  std::vector<OutcomeEntry> entries;
  for (double a : obs.base().outcomes()) {
    entries.push_back({a, 0.0, joint_detection_probability(born_probability(state, obs.base(), a), pd)});
  }
  entries.push_back({obs.no_registration_outcome(), 0.0, 1.0 - pd});
  return OutcomeDistribution(DistributionKind::single, std::move(entries));
}

GeneralizedExpectation generalized_expectation(const DensityState& state,
                                               const GeneralizedObservable& obs,
                                               const DetectionModel& det) {
  const double pd = det.effective(state, obs);
  const double conditional = quantum_expectation(state, obs.base());
  return {obs.no_registration_outcome() * (1.0 - pd) + pd * conditional, conditional};
}

OutcomeDistribution sequential_distribution_general(const DensityState& state,
                                                    const GeneralizedObservable& obs_a,
                                                    const GeneralizedObservable& obs_b,
                                                    const SequentialFreeParameters& params) {
  require_probability(params.det_a, "P^d_S(A0)");
  require_probability(params.det_b_after_0, "P^d_{S0}(B0)");
  for (const auto& [a, p] : params.det_b_after_n) {
    require_probability(p, "P^d_{Sn}(B0)");
  }

  const auto& b_outcomes = obs_b.base().outcomes();
  double cond_sum = 0.0;
  for (const auto& [b, p] : params.cond_b_after_0) {
    if (!obs_b.base().has_outcome(b)) {
      throw ValidationError("P_{S0}(b) given for an outcome outside the spectrum of B");
    }
    require_probability(p, "P_{S0}(b)");
    cond_sum += p;
  }
  if (params.cond_b_after_0.size() != b_outcomes.size() ||
      std::abs(cond_sum - 1.0) > kAlgebraicTolerance) {
    throw ValidationError("P_{S0}(b) must be a distribution over the outcomes of B");
  }

  const double a0 = obs_a.no_registration_outcome();
  const double b0 = obs_b.no_registration_outcome();
  std::vector<OutcomeEntry> entries;
  for (double a : obs_a.base().outcomes()) {
    const auto det_it = params.det_b_after_n.find(a);
    if (det_it == params.det_b_after_n.end()) {
      throw ValidationError("missing P^d_{Sn}(B0) for an outcome of A");
    }
    const double det_b = det_it->second;
    const double p_a = born_probability(state, obs_a.base(), a);
    const double detected_a = joint_detection_probability(p_a, params.det_a);
    if (p_a > kZeroBranchTolerance) {
      const DensityState after = luders_update(state, obs_a.base().projector(a));
      for (double b : b_outcomes) {
        entries.push_back({a, b, detected_a * det_b * born_probability(after, obs_b.base(), b)});
      }
    } else {
      for (double b : b_outcomes) entries.push_back({a, b, 0.0});
    }
    entries.push_back({a, b0, detected_a * (1.0 - det_b)});
  }
  const double missed_a = 1.0 - params.det_a;
  for (double b : b_outcomes) {
    entries.push_back({a0, b, missed_a * params.det_b_after_0 * params.cond_b_after_0.at(b)});
  }
  entries.push_back({a0, b0, missed_a * (1.0 - params.det_b_after_0)});
  return OutcomeDistribution(DistributionKind::sequential, std::move(entries));
}

OutcomeDistribution sequential_distribution_factored(const DensityState& state,
                                                     const GeneralizedObservable& obs_a,
                                                     const GeneralizedObservable& obs_b,
                                                     const DetectionModel& det) {
  require_bipartite(obs_a, obs_b);
  const double pd_a = det.effective(state, obs_a);
  const double pd_b = det.effective(state, obs_b);
  const double a0 = obs_a.no_registration_outcome();
  const double b0 = obs_b.no_registration_outcome();
  const auto& a_base = obs_a.base();
  const auto& b_base = obs_b.base();

  std::vector<OutcomeEntry> entries;
  for (double a : a_base.outcomes()) {
    for (double b : b_base.outcomes()) {
      const double p = born_joint_probability(state, a_base, a, b_base, b);
      entries.push_back({a, b, joint_detection_probability(p, pd_a * pd_b)});
    }
    entries.push_back({a, b0,
                       joint_detection_probability(born_probability(state, a_base, a),
                                                   pd_a * (1.0 - pd_b))});
  }
  for (double b : b_base.outcomes()) {
    entries.push_back({a0, b,
                       joint_detection_probability(born_probability(state, b_base, b),
                                                   (1.0 - pd_a) * pd_b)});
  }
  entries.push_back({a0, b0, (1.0 - pd_a) * (1.0 - pd_b)});
  return OutcomeDistribution(DistributionKind::sequential, std::move(entries));
}

double generalized_correlation(const DensityState& state, const GeneralizedObservable& obs_a,
                               const GeneralizedObservable& obs_b, const DetectionModel& det) {
  require_bipartite(obs_a, obs_b);
  const double pd_a = det.effective(state, obs_a);
  const double pd_b = det.effective(state, obs_b);
  const double a0 = obs_a.no_registration_outcome();
  const double b0 = obs_b.no_registration_outcome();
  const auto& a_base = obs_a.base();
  const auto& b_base = obs_b.base();

  const double product = quantum_expectation_product(state, a_base, b_base);
  if (a0 == 0.0 && b0 == 0.0) {
    return pd_a * pd_b * product;
  }
  const double mean_a = quantum_expectation(state, a_base);
  const double mean_b = quantum_expectation(state, b_base);
  return pd_a * pd_b * product + b0 * pd_a * (1.0 - pd_b) * mean_a +
         a0 * (1.0 - pd_a) * pd_b * mean_b + a0 * b0 * (1.0 - pd_a) * (1.0 - pd_b);
}

}  // namespace esr
