#pragma once

// Detection-weighted probability layer on top of quantum_core.
//
// A generalized observable adjoins a no-registration outcome a0 to a
// projective observable. Quantum probabilities are read as conditional on
// detection; absolute probabilities multiply them by a detection probability
// that the caller supplies through a DetectionModel.

#include "esr/quantum_core.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace esr {

class GeneralizedObservable {
 public:
  explicit GeneralizedObservable(ProjectiveObservable base, double no_registration_outcome = 0.0);

  const ProjectiveObservable& base() const { return base_; }
  double no_registration_outcome() const { return no_registration_; }
  const std::string& label() const { return base_.label(); }
  // Quantum outcomes followed by a0.
  std::vector<double> spectrum() const;

 private:
  ProjectiveObservable base_;
  double no_registration_;
};

// Detection probabilities keyed by (state label, observable label).
//
// Either key may be the wildcard "*". Lookup prefers the exact pair, then
// (state, "*"), then ("*", observable), then ("*", "*"). The stored value is
// scaled by the apparatus factor to give the effective probability.
class DetectionModel {
 public:
  static constexpr const char* kAny = "*";

  explicit DetectionModel(double apparatus_factor = 1.0);

  static DetectionModel uniform(double probability, double apparatus_factor = 1.0);

  DetectionModel& set(const std::string& state_label, const std::string& observable_label,
                      double probability);

  double apparatus_factor() const { return apparatus_factor_; }
  bool empty() const { return entries_.empty(); }

  // Stored value times the apparatus factor. Throws ConfigurationError if no
  // entry matches.
  double effective(const std::string& state_label, const std::string& observable_label) const;
  double effective(const DensityState& state, const GeneralizedObservable& obs) const {
    return effective(state.label(), obs.label());
  }

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
  double apparatus_factor_;
};

enum class DistributionKind { single, sequential };

struct OutcomeEntry {
  double a = 0.0;
  double b = 0.0;  // unused for single distributions
  double probability = 0.0;
};

class OutcomeDistribution {
 public:
  // Validates probabilities in [0, 1] summing to 1 within 1e-12.
  OutcomeDistribution(DistributionKind kind, std::vector<OutcomeEntry> entries);

  DistributionKind kind() const { return kind_; }
  const std::vector<OutcomeEntry>& entries() const { return entries_; }

  double total() const;
  // Mean of a (single) or of a*b (sequential).
  double mean() const;
  // Probability of outcome `a` (single) or of the pair (a, b) (sequential);
  // zero when absent.
  double probability(double a) const;
  double probability(double a, double b) const;

 private:
  DistributionKind kind_;
  std::vector<OutcomeEntry> entries_;
};

struct GeneralizedExpectation {
  double absolute = 0.0;
  double conditional = 0.0;
};

// P^t = P^d * P.
double joint_detection_probability(double conditional_prob, double detection_prob);

OutcomeDistribution outcome_distribution(const DensityState& state,
                                         const GeneralizedObservable& obs,
                                         const DetectionModel& det);

GeneralizedExpectation generalized_expectation(const DensityState& state,
                                               const GeneralizedObservable& obs,
                                               const DetectionModel& det);

// Caller-supplied quantities that quantum rules leave undetermined in a
// sequential measurement of A0 then B0.
struct SequentialFreeParameters {
  double det_a = 1.0;                        // P^d_S(A0)
  std::map<double, double> det_b_after_n;    // a_n -> P^d_{S_n}(B0)
  double det_b_after_0 = 1.0;                // P^d_{S_0}(B0)
  std::map<double, double> cond_b_after_0;   // b_p -> P_{S_0}(b_p)
};

// Sequential distribution with Lueders-updated intermediate states S_n.
OutcomeDistribution sequential_distribution_general(const DensityState& state,
                                                    const GeneralizedObservable& obs_a,
                                                    const GeneralizedObservable& obs_b,
                                                    const SequentialFreeParameters& params);

// Far-apart case: A on subsystem 1, B on subsystem 2, undetected objects are
// left unperturbed and A's outcome does not change B's detection probability.
OutcomeDistribution sequential_distribution_factored(const DensityState& state,
                                                     const GeneralizedObservable& obs_a,
                                                     const GeneralizedObservable& obs_b,
                                                     const DetectionModel& det);

// Generalized correlation function P(A0, B0). Uses the product form
// P^d(A0) P^d(B0) <AB> when a0 = b0 = 0 and the full four-family sum otherwise.
double generalized_correlation(const DensityState& state, const GeneralizedObservable& obs_a,
                               const GeneralizedObservable& obs_b, const DetectionModel& det);

}  // namespace esr
