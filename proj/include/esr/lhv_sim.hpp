#pragma once

// Microstate-level machinery: discrete microstate mixtures, deterministic
// local hidden-variable models with a no-registration outcome, and seeded
// Monte Carlo experiments over them.
//
// Random streams: trials are split into fixed-size chunks of kChunkTrials.
// Chunk k draws from std::mt19937_64 seeded through std::seed_seq with the
// 32-bit words (seed_lo, seed_hi, k_lo, k_hi); each trial consumes four
// 64-bit draws, converted to doubles in [0, 1) as (x >> 11) * 2^-53. Both the
// engine and seed_seq are fully specified by the C++ standard, so results
// depend only on (seed, settings, n_trials), not on platform or worker count.

#include "esr/bchsh.hpp"
#include "esr/quantum_core.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace esr {

struct HiddenVariable {
  Direction lambda;
  double u_a = 0.0;
  double u_b = 0.0;
};

// Maps four uniforms in [0, 1) to a hidden variable: lambda uniform on the
// sphere (z = 1 - 2 u0, phi = 2 pi u1), u_a = u2, u_b = u3.
HiddenVariable hidden_variable_from_uniforms(double u0, double u1, double u2, double u3);

// Deterministic local model. Each side possesses a microscopic property with
// value +-1 for every direction and is detected or not; the registered
// outcome is the possessed value when detected and 0 otherwise. Side A never
// sees B's direction and vice versa.
class MicrostateModel {
 public:
  using PropertyFn = std::function<int(const HiddenVariable&, const Direction&)>;
  using DetectFn = std::function<bool(const HiddenVariable&, const Direction&)>;

  MicrostateModel(std::string name, PropertyFn property_a, DetectFn detect_a,
                  PropertyFn property_b, DetectFn detect_b);

  const std::string& name() const { return name_; }

  int possessed_a(const HiddenVariable& h, const Direction& a) const;
  int possessed_b(const HiddenVariable& h, const Direction& b) const;
  bool detected_a(const HiddenVariable& h, const Direction& a) const { return detect_a_(h, a); }
  bool detected_b(const HiddenVariable& h, const Direction& b) const { return detect_b_(h, b); }
  // Registered outcome in {-1, 0, +1}.
  int respond_a(const HiddenVariable& h, const Direction& a) const {
    return detected_a(h, a) ? possessed_a(h, a) : 0;
  }
  int respond_b(const HiddenVariable& h, const Direction& b) const {
    return detected_b(h, b) ? possessed_b(h, b) : 0;
  }

 private:
  std::string name_;
  PropertyFn property_a_;
  DetectFn detect_a_;
  PropertyFn property_b_;
  DetectFn detect_b_;
};

// A: sign(a.lambda), registered only if u_a < |a.lambda|. B: -sign(b.lambda), always registered.
MicrostateModel gisin_gisin_model();
// A: sign(a.lambda), B: -sign(b.lambda), both always registered.
MicrostateModel sign_sign_model();
// Looks up "gisin-gisin" or "sign-sign"; throws ValidationError otherwise.
MicrostateModel model_by_name(const std::string& name);

// ---- discrete microstate mixtures ----

struct MicrostateEnsemble {
  std::vector<double> weights;       // P(S^i | S)
  std::vector<double> micro_detect;  // P^{i,d}(F)
  std::vector<int> micro_possess;    // P^i(F) in {0, 1}
};

struct MixtureProbabilities {
  double p_t = 0.0;     // detected and possessing F
  double p_d = 0.0;     // detected
  double p_cond = 0.0;  // p_t / p_d
};

MixtureProbabilities mixture_probabilities(const MicrostateEnsemble& ensemble);

// Microscopic observable: microstate weights and, for each outcome a_n, the
// indicator of the microscopic property f_n per microstate. Every microstate
// must possess exactly one f_n.
struct MicroObservableFamily {
  std::vector<double> weights;
  std::vector<std::vector<int>> possess;  // [outcome][microstate]
};

double micro_observable_expectation(const MicroObservableFamily& family,
                                    const std::vector<double>& outcomes);

// ---- Monte Carlo ----

inline constexpr std::uint64_t kChunkTrials = 1u << 16;

// Outcome index: 0 -> -1, 1 -> 0 (no registration), 2 -> +1.
constexpr std::size_t outcome_index(int outcome) { return static_cast<std::size_t>(outcome + 1); }

struct SettingTally {
  // registered[a][b] over {-1, 0, +1} x {-1, 0, +1}
  std::array<std::array<std::uint64_t, 3>, 3> registered{};
  // possessed[a][b] over {-1, +1} x {-1, +1} (index 0 -> -1, 1 -> +1)
  std::array<std::array<std::uint64_t, 2>, 2> possessed{};

  SettingTally& operator+=(const SettingTally& other);
  friend bool operator==(const SettingTally&, const SettingTally&) = default;
};

using SettingPair = std::pair<Direction, Direction>;

struct SimulationSummary {
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::vector<SettingTally> settings;

  // Associative, commutative merge of tallies over disjoint trial sets.
  SimulationSummary& merge(const SimulationSummary& other);
  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

SimulationSummary run_experiment(const MicrostateModel& model,
                                 const std::vector<SettingPair>& settings, std::uint64_t n_trials,
                                 std::uint64_t seed, unsigned workers = 1);

// Runs only chunks [first_chunk, last_chunk) of the experiment; summing the
// pieces over a partition of the chunks reproduces run_experiment exactly.
SimulationSummary run_chunks(const MicrostateModel& model, const std::vector<SettingPair>& settings,
                             std::uint64_t n_trials, std::uint64_t seed, std::uint64_t first_chunk,
                             std::uint64_t last_chunk);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Estimators over one setting's tally.
struct SettingStatistics {
  std::uint64_t n_trials = 0;
  std::uint64_t n_detected_a = 0;
  std::uint64_t n_detected_b = 0;
  std::uint64_t n_detected_both = 0;
  Estimate detection_a;
  Estimate detection_b;
  Estimate micro_correlation;        // E[A0 B0] over all trials, zeros included
  Estimate conditional_correlation;  // E[A B] over doubly-detected trials
  Estimate all_sample_pp;            // fraction of all trials possessing (+1, +1)
  Estimate detected_pp;              // fraction of doubly-detected trials registering (+1, +1)
  Estimate divergence;               // |all_sample_pp - detected_pp|
};

// Conditional estimates are NaN when no trial was detected on both sides.
SettingStatistics setting_statistics(const SettingTally& tally, std::uint64_t n_trials);

Estimate estimate_micro_correlation(const MicrostateModel& model, const Direction& a,
                                    const Direction& b, std::uint64_t n_trials, std::uint64_t seed,
                                    unsigned workers = 1);

// The four CHSH settings in order (a,b), (a,b'), (a',b), (a',b').
std::vector<SettingPair> chsh_setting_pairs(const ChshSetting& setting);

// |P(a,b) - P(a,b')| + |P(a',b) + P(a',b')| over all-sample micro
// correlations. All four are estimated on the same trials, so the estimate
// itself never exceeds 2. std_error is the sum of the four standard errors.
Estimate micro_chsh(const MicrostateModel& model, const ChshSetting& setting,
                    std::uint64_t n_trials, std::uint64_t seed, unsigned workers = 1);

// CHSH-level estimators over a summary of the four settings produced by
// chsh_setting_pairs.
struct ChshStatistics {
  std::array<SettingStatistics, 4> per_setting;
  Estimate micro_chsh;
  Estimate conditional_chsh;
  // Detection frequencies for A(a), A(a'), B(b), B(b').
  std::array<Estimate, 4> detection;
};

ChshStatistics chsh_statistics(const SimulationSummary& summary);

struct FairSamplingResult {
  double all_sample_freq = 0.0;
  double detected_freq = 0.0;
  double divergence = 0.0;
  double std_error = 0.0;  // of the divergence
};

FairSamplingResult fair_sampling_check(const MicrostateModel& model, const Direction& a,
                                       const Direction& b, std::uint64_t n_trials,
                                       std::uint64_t seed, unsigned workers = 1);

}  // namespace esr
