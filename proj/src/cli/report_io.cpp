#include "esr/cli.hpp"

#include "format.hpp"

#include <ostream>

namespace esr::cli {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 4> kSettingNames = {"ab", "ab'", "a'b", "a'b'"};

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json setting_json(const std::array<std::string, 4>& s) {
  return {{"a", s[0]}, {"aprime", s[1]}, {"b", s[2]}, {"bprime", s[3]}};
}

void csv_estimate(std::ostream& out, const std::string& quantity, const std::string& setting,
                  const Estimate& e) {
  out << quantity << ',' << setting << ',' << fixed6(e.value) << ',' << fixed6(e.std_error)
      << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const BoundReport& r) {
  out << "a,aprime,b,bprime,denominator,bound,no_registration_lower_bound,grid_step_deg,"
         "grid_min_bound,grid_no_registration_lower_bound,grid_a_deg,grid_aprime_deg,"
         "grid_b_deg,grid_bprime_deg\n";
  out << r.setting[0] << ',' << r.setting[1] << ',' << r.setting[2] << ',' << r.setting[3] << ','
      << fixed6(r.denominator) << ',' << fixed6(r.bound) << ','
      << fixed6(r.no_registration_lower_bound) << ',' << fixed6(r.grid_step_deg) << ','
      << fixed6(r.grid_min_bound) << ',' << fixed6(r.grid_no_registration_lower_bound);
  for (double angle : r.grid_min_angles_deg) out << ',' << fixed6(angle);
  out << '\n';
}

void write_csv(std::ostream& out, const ScanReport& r) {
  constexpr double kToDegrees = 180.0 / 3.14159265358979323846;
  out << kScanCsvHeader << '\n';
  for (const auto& row : r.rows) {
    for (double angle : row.angles) out << fixed6(angle * kToDegrees) << ',';
    const ChshReport& c = *row.report;
    for (double p : c.detection_probs) out << fixed6(p) << ',';
    out << fixed6(c.standard_lhs) << ',' << fixed6(c.modified_lhs) << ','
        << (c.bound ? fixed6(*c.bound) : std::string()) << ',' << bool_text(c.standard_violated)
        << ',' << bool_text(c.modified_violated) << '\n';
  }
}

void write_csv(std::ostream& out, const SimulateReport& r) {
  out << "quantity,setting,value,std_error\n";
  out << "n_trials,," << r.trials << ",\n";
  out << "seed,," << r.seed << ",\n";
  for (std::size_t k = 0; k < 4; ++k) {
    const SettingStatistics& s = r.stats.per_setting[k];
    const std::string name = kSettingNames[k];
    out << "n_detected_both," << name << ',' << s.n_detected_both << ",\n";
    csv_estimate(out, "detection_a", name, s.detection_a);
    csv_estimate(out, "detection_b", name, s.detection_b);
    csv_estimate(out, "micro_correlation", name, s.micro_correlation);
    csv_estimate(out, "conditional_correlation", name, s.conditional_correlation);
    csv_estimate(out, "all_sample_pp_freq", name, s.all_sample_pp);
    csv_estimate(out, "detected_pp_freq", name, s.detected_pp);
    csv_estimate(out, "fair_sampling_divergence", name, s.divergence);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    csv_estimate(out, "detection_frequency", kChshRoles[k], r.stats.detection[k]);
  }
  csv_estimate(out, "micro_chsh", "", r.stats.micro_chsh);
  csv_estimate(out, "conditional_chsh", "", r.stats.conditional_chsh);
  csv_estimate(out, "modified_chsh_measured", "", r.modified_chsh_measured);
}

void write_csv(std::ostream& out, const SequentialReport& r) {
  out << "a_outcome,b_outcome,probability,total,correlation\n";
  for (const auto& e : r.entries) {
    out << outcome_label(e.a) << ',' << outcome_label(e.b) << ',' << fixed6(e.probability) << ','
        << fixed6(r.total) << ',' << fixed6(r.correlation) << '\n';
  }
}

json to_json(const BoundReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"command", "bound"},
          {"setting", setting_json(r.setting)},
          {"denominator", r.denominator},
          {"bound", r.bound},
          {"no_registration_lower_bound", r.no_registration_lower_bound},
          {"grid_step_deg", r.grid_step_deg},
          {"grid_min_bound", r.grid_min_bound},
          {"grid_min_angles_deg", r.grid_min_angles_deg},
          {"grid_no_registration_lower_bound", r.grid_no_registration_lower_bound}};
}

json to_json(const ScanReport& r) {
  constexpr double kToDegrees = 180.0 / 3.14159265358979323846;
  json rows = json::array();
  for (const auto& row : r.rows) {
    const ChshReport& c = *row.report;
    json entry = {{"a_deg", row.angles[0] * kToDegrees},
                  {"aprime_deg", row.angles[1] * kToDegrees},
                  {"b_deg", row.angles[2] * kToDegrees},
                  {"bprime_deg", row.angles[3] * kToDegrees},
                  {"e_ab", c.e_ab},
                  {"e_abprime", c.e_ab_prime},
                  {"e_aprimeb", c.e_a_prime_b},
                  {"e_aprimebprime", c.e_a_prime_b_prime},
                  {"pd", c.detection_probs},
                  {"standard_lhs", c.standard_lhs},
                  {"modified_lhs", c.modified_lhs},
                  {"bound", c.bound ? json(*c.bound) : json(nullptr)},
                  {"max_detection_product", c.max_detection_product},
                  {"standard_violated", c.standard_violated},
                  {"modified_violated", c.modified_violated}};
    rows.push_back(std::move(entry));
  }
  return {{"schema_version", kSchemaVersion},
          {"command", "scan"},
          {"state", r.state},
          {"grid_step_deg", r.grid_step_deg},
          {"rows", std::move(rows)}};
}

json to_json(const SimulateReport& r) {
  json settings = json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const SettingStatistics& s = r.stats.per_setting[k];
    settings.push_back({{"name", kSettingNames[k]},
                        {"n_detected_a", s.n_detected_a},
                        {"n_detected_b", s.n_detected_b},
                        {"n_detected_both", s.n_detected_both},
                        {"detection_a", estimate_json(s.detection_a)},
                        {"detection_b", estimate_json(s.detection_b)},
                        {"micro_correlation", estimate_json(s.micro_correlation)},
                        {"conditional_correlation", estimate_json(s.conditional_correlation)},
                        {"all_sample_pp_freq", estimate_json(s.all_sample_pp)},
                        {"detected_pp_freq", estimate_json(s.detected_pp)},
                        {"fair_sampling_divergence", estimate_json(s.divergence)}});
  }
  json detection = json::object();
  for (std::size_t k = 0; k < 4; ++k) detection[kChshRoles[k]] = estimate_json(r.stats.detection[k]);
  return {{"schema_version", kSchemaVersion},
          {"command", "simulate"},
          {"model", r.model},
          {"trials", r.trials},
          {"seed", r.seed},
          {"setting", setting_json(r.setting)},
          {"settings", std::move(settings)},
          {"detection_frequency", std::move(detection)},
          {"micro_chsh", estimate_json(r.stats.micro_chsh)},
          {"conditional_chsh", estimate_json(r.stats.conditional_chsh)},
          {"modified_chsh_measured", estimate_json(r.modified_chsh_measured)}};
}

json to_json(const SequentialReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"a", e.a}, {"b", e.b}, {"probability", e.probability}});
  }
  return {{"schema_version", kSchemaVersion},
          {"command", "sequential"},
          {"state", r.state},
          {"a", r.a},
          {"b", r.b},
          {"pd_a", r.pd_a},
          {"pd_b", r.pd_b},
          {"entries", std::move(entries)},
          {"total", r.total},
          {"correlation", r.correlation}};
}

}  // namespace esr::cli
