#include "esr/lhv_sim.hpp"

#include "esr/error.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace esr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double x) { return x < 0.0 ? -1 : +1; }

double to_unit_interval(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t chunk_count(std::uint64_t n_trials) {
  return (n_trials + kChunkTrials - 1) / kChunkTrials;
}

Estimate proportion(std::uint64_t hits, std::uint64_t total) {
  if (total == 0) return {kNaN, kNaN};
  const double p = static_cast<double>(hits) / static_cast<double>(total);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

void require_trials(std::uint64_t n_trials) {
  if (n_trials < 1) throw ValidationError("at least one trial is required");
}

}  // namespace

HiddenVariable hidden_variable_from_uniforms(double u0, double u1, double u2, double u3) {
  const double z = 1.0 - 2.0 * u0;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * u1;
  return {Direction::normalized(r * std::cos(phi), r * std::sin(phi), z), u2, u3};
}

MicrostateModel::MicrostateModel(std::string name, PropertyFn property_a, DetectFn detect_a,
                                 PropertyFn property_b, DetectFn detect_b)
    : name_(std::move(name)),
      property_a_(std::move(property_a)),
      detect_a_(std::move(detect_a)),
      property_b_(std::move(property_b)),
      detect_b_(std::move(detect_b)) {
  if (!property_a_ || !detect_a_ || !property_b_ || !detect_b_) {
    throw ValidationError("microstate model needs all four response functions");
  }
}

int MicrostateModel::possessed_a(const HiddenVariable& h, const Direction& a) const {
  const int v = property_a_(h, a);
  if (v != 1 && v != -1) throw ValidationError("microscopic property must be +1 or -1");
  return v;
}

int MicrostateModel::possessed_b(const HiddenVariable& h, const Direction& b) const {
  const int v = property_b_(h, b);
  if (v != 1 && v != -1) throw ValidationError("microscopic property must be +1 or -1");
  return v;
}

MicrostateModel gisin_gisin_model() {
  return MicrostateModel(
      "gisin-gisin",
      [](const HiddenVariable& h, const Direction& a) { return sign_of(a.dot(h.lambda)); },
      [](const HiddenVariable& h, const Direction& a) { return h.u_a < std::abs(a.dot(h.lambda)); },
      [](const HiddenVariable& h, const Direction& b) { return -sign_of(b.dot(h.lambda)); },
      [](const HiddenVariable&, const Direction&) { return true; });
}

MicrostateModel sign_sign_model() {
  return MicrostateModel(
      "sign-sign",
      [](const HiddenVariable& h, const Direction& a) { return sign_of(a.dot(h.lambda)); },
      [](const HiddenVariable&, const Direction&) { return true; },
      [](const HiddenVariable& h, const Direction& b) { return -sign_of(b.dot(h.lambda)); },
      [](const HiddenVariable&, const Direction&) { return true; });
}

MicrostateModel model_by_name(const std::string& name) {
  if (name == "gisin-gisin") return gisin_gisin_model();
  if (name == "sign-sign") return sign_sign_model();
  throw ValidationError("unknown model '" + name + "' (expected gisin-gisin or sign-sign)");
}

MixtureProbabilities mixture_probabilities(const MicrostateEnsemble& ensemble) {
  const std::size_t n = ensemble.weights.size();
  if (n == 0 || ensemble.micro_detect.size() != n || ensemble.micro_possess.size() != n) {
    throw ValidationError("ensemble vectors must be non-empty and of equal length");
  }
  double weight_sum = 0.0;
  MixtureProbabilities out;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ensemble.weights[i];
    const double d = ensemble.micro_detect[i];
    const int f = ensemble.micro_possess[i];
    if (!(w >= 0.0 && w <= 1.0) || !(d >= 0.0 && d <= 1.0) || (f != 0 && f != 1)) {
      throw ValidationError("ensemble entries out of range");
    }
    weight_sum += w;
    out.p_t += w * d * f;
    out.p_d += w * d;
  }
  if (std::abs(weight_sum - 1.0) > kAlgebraicTolerance) {
    throw ValidationError("microstate weights must sum to 1");
  }
  if (out.p_d < kZeroBranchTolerance) {
    throw UndefinedConditional("detection probability is zero; conditional undefined");
  }
  out.p_cond = out.p_t / out.p_d;
  return out;
}

double micro_observable_expectation(const MicroObservableFamily& family,
                                    const std::vector<double>& outcomes) {
  const std::size_t n_micro = family.weights.size();
  if (family.possess.size() != outcomes.size() || outcomes.empty()) {
    throw ValidationError("need one possession indicator per outcome");
  }
  double weight_sum = 0.0;
  for (double w : family.weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("microstate weight out of range");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > kAlgebraicTolerance) {
    throw ValidationError("microstate weights must sum to 1");
  }
  for (std::size_t i = 0; i < n_micro; ++i) {
    int count = 0;
    for (const auto& indicator : family.possess) {
      if (indicator.size() != n_micro || (indicator[i] != 0 && indicator[i] != 1)) {
        throw ValidationError("possession indicators must be 0/1 per microstate");
      }
      count += indicator[i];
    }
    if (count != 1) {
      throw ValidationError("each microstate must possess exactly one outcome property");
    }
  }
  double mean = 0.0;
  for (std::size_t n = 0; n < outcomes.size(); ++n) {
    double p = 0.0;
    for (std::size_t i = 0; i < n_micro; ++i) p += family.weights[i] * family.possess[n][i];
    mean += outcomes[n] * p;
  }
  return mean;
}

SettingTally& SettingTally::operator+=(const SettingTally& other) {
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) registered[i][j] += other.registered[i][j];
  }
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) possessed[i][j] += other.possessed[i][j];
  }
  return *this;
}

SimulationSummary& SimulationSummary::merge(const SimulationSummary& other) {
  if (settings.empty()) settings.resize(other.settings.size());
  if (other.settings.size() != settings.size() || other.seed != seed) {
    throw ValidationError("cannot merge summaries of different experiments");
  }
  n_trials += other.n_trials;
  for (std::size_t s = 0; s < settings.size(); ++s) settings[s] += other.settings[s];
  return *this;
}

SimulationSummary run_chunks(const MicrostateModel& model, const std::vector<SettingPair>& settings,
                             std::uint64_t n_trials, std::uint64_t seed, std::uint64_t first_chunk,
                             std::uint64_t last_chunk) {
  SimulationSummary out;
  out.seed = seed;
  out.settings.resize(settings.size());
  last_chunk = std::min(last_chunk, chunk_count(n_trials));
  for (std::uint64_t chunk = first_chunk; chunk < last_chunk; ++chunk) {
    auto engine = chunk_engine(seed, chunk);
    const std::uint64_t begin = chunk * kChunkTrials;
    const std::uint64_t end = std::min(n_trials, begin + kChunkTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      const double u0 = to_unit_interval(engine());
      const double u1 = to_unit_interval(engine());
      const double u2 = to_unit_interval(engine());
      const double u3 = to_unit_interval(engine());
      const HiddenVariable h = hidden_variable_from_uniforms(u0, u1, u2, u3);
      for (std::size_t s = 0; s < settings.size(); ++s) {
        const auto& [a, b] = settings[s];
        const int pa = model.possessed_a(h, a);
        const int pb = model.possessed_b(h, b);
        const int ra = model.detected_a(h, a) ? pa : 0;
        const int rb = model.detected_b(h, b) ? pb : 0;
        SettingTally& tally = out.settings[s];
        ++tally.registered[outcome_index(ra)][outcome_index(rb)];
        ++tally.possessed[pa > 0 ? 1 : 0][pb > 0 ? 1 : 0];
      }
    }
    out.n_trials += end - begin;
  }
  return out;
}

SimulationSummary run_experiment(const MicrostateModel& model,
                                 const std::vector<SettingPair>& settings, std::uint64_t n_trials,
                                 std::uint64_t seed, unsigned workers) {
  require_trials(n_trials);
  const std::uint64_t chunks = chunk_count(n_trials);
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, chunks));

  SimulationSummary total;
  total.seed = seed;
  total.settings.resize(settings.size());
  if (workers == 1) {
    return total.merge(run_chunks(model, settings, n_trials, seed, 0, chunks));
  }

  // Contiguous chunk ranges per worker; integer tallies make the merge exact.
  std::vector<SimulationSummary> parts(workers);
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t first = chunks * w / workers;
      const std::uint64_t last = chunks * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] {
        try {
          parts[w] = run_chunks(model, settings, n_trials, seed, first, last);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  for (const auto& part : parts) total.merge(part);
  return total;
}

SettingStatistics setting_statistics(const SettingTally& tally, std::uint64_t n_trials) {
  SettingStatistics s;
  s.n_trials = n_trials;
  const auto& r = tally.registered;
  const std::size_t none = outcome_index(0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != none) s.n_detected_a += r[i][j];
      if (j != none) s.n_detected_b += r[i][j];
      if (i != none && j != none) s.n_detected_both += r[i][j];
    }
  }
  s.detection_a = proportion(s.n_detected_a, n_trials);
  s.detection_b = proportion(s.n_detected_b, n_trials);

  const std::uint64_t plus = outcome_index(+1);
  const std::uint64_t minus = outcome_index(-1);
  const std::uint64_t same = r[plus][plus] + r[minus][minus];
  const std::uint64_t opposite = r[plus][minus] + r[minus][plus];
  const double n = static_cast<double>(n_trials);

  // A0 B0 takes values in {-1, 0, +1}.
  const double micro_mean = (static_cast<double>(same) - static_cast<double>(opposite)) / n;
  const double micro_second = static_cast<double>(same + opposite) / n;
  s.micro_correlation = {micro_mean,
                         std::sqrt(std::max(0.0, micro_second - micro_mean * micro_mean) / n)};

  s.all_sample_pp = proportion(tally.possessed[1][1], n_trials);
  if (s.n_detected_both > 0) {
    const double nd = static_cast<double>(s.n_detected_both);
    const double c = (static_cast<double>(same) - static_cast<double>(opposite)) / nd;
    s.conditional_correlation = {c, std::sqrt(std::max(0.0, 1.0 - c * c) / nd)};
    s.detected_pp = proportion(r[plus][plus], s.n_detected_both);
    s.divergence = {std::abs(s.all_sample_pp.value - s.detected_pp.value),
                    std::hypot(s.all_sample_pp.std_error, s.detected_pp.std_error)};
  } else {
    s.conditional_correlation = {kNaN, kNaN};
    s.detected_pp = {kNaN, kNaN};
    s.divergence = {kNaN, kNaN};
  }
  return s;
}

Estimate estimate_micro_correlation(const MicrostateModel& model, const Direction& a,
                                    const Direction& b, std::uint64_t n_trials, std::uint64_t seed,
                                    unsigned workers) {
  const auto summary = run_experiment(model, {{a, b}}, n_trials, seed, workers);
  return setting_statistics(summary.settings.front(), summary.n_trials).micro_correlation;
}

std::vector<SettingPair> chsh_setting_pairs(const ChshSetting& s) {
  return {{s.a, s.b}, {s.a, s.b_prime}, {s.a_prime, s.b}, {s.a_prime, s.b_prime}};
}

ChshStatistics chsh_statistics(const SimulationSummary& summary) {
  if (summary.settings.size() != 4) {
    throw ValidationError("CHSH statistics need exactly four settings");
  }
  ChshStatistics out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.per_setting[k] = setting_statistics(summary.settings[k], summary.n_trials);
  }
  const auto& p = out.per_setting;
  auto combine = [&](auto field) {
    const Estimate e0 = p[0].*field;
    const Estimate e1 = p[1].*field;
    const Estimate e2 = p[2].*field;
    const Estimate e3 = p[3].*field;
    return Estimate{std::abs(e0.value - e1.value) + std::abs(e2.value + e3.value),
                    e0.std_error + e1.std_error + e2.std_error + e3.std_error};
  };
  out.micro_chsh = combine(&SettingStatistics::micro_correlation);
  out.conditional_chsh = combine(&SettingStatistics::conditional_correlation);
  // A(a) from (a,b), A(a') from (a',b), B(b) from (a,b), B(b') from (a,b').
  out.detection = {p[0].detection_a, p[2].detection_a, p[0].detection_b, p[1].detection_b};
  return out;
}

Estimate micro_chsh(const MicrostateModel& model, const ChshSetting& setting,
                    std::uint64_t n_trials, std::uint64_t seed, unsigned workers) {
  return chsh_statistics(run_experiment(model, chsh_setting_pairs(setting), n_trials, seed, workers))
      .micro_chsh;
}

FairSamplingResult fair_sampling_check(const MicrostateModel& model, const Direction& a,
                                       const Direction& b, std::uint64_t n_trials,
                                       std::uint64_t seed, unsigned workers) {
  const auto summary = run_experiment(model, {{a, b}}, n_trials, seed, workers);
  const auto stats = setting_statistics(summary.settings.front(), summary.n_trials);
  if (stats.n_detected_both == 0) {
    throw UndefinedConditional("no trial was detected on both sides");
  }
  return {stats.all_sample_pp.value, stats.detected_pp.value, stats.divergence.value,
          stats.divergence.std_error};
}

}  // namespace esr
