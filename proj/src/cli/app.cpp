#include "esr/cli.hpp"
#include "esr/error.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <ostream>

namespace esr::cli {

namespace {

struct FlagValues {
  std::string format;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string state;
  std::string angles;
  std::string pd;
  double apparatus_factor = 1.0;
  double grid_step = 0.0;
  std::uint64_t trials = 0;
  unsigned workers = 1;
  std::string model;
  std::string a;
  std::string b;
};

template <typename Report>
void emit(const Report& report, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    write_csv(out, report);
  }
}

bool given(const CLI::App& app, const std::string& name) {
  const CLI::Option* opt = app.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detection-weighted CHSH analysis for two-qubit Bell experiments", "esr-bell"};
  app.require_subcommand(1);
  app.fallthrough();

  FlagValues f;
  app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", f.seed, "Random seed (simulate)");
  app.add_option("--config", f.config_path, "JSON file with an experiment configuration");

  auto* bound = app.add_subcommand("bound", "Detection-probability bound for a setting");
  bound->add_option("--angles", f.angles, "tsirelson | a,a',b,b' in degrees | four x,y,z;...");
  bound->add_option("--grid-step", f.grid_step, "Grid step in degrees for the minimum (default 1)");

  auto* scan = app.add_subcommand("scan", "Standard and modified CHSH over a coplanar angle grid");
  scan->add_option("--state", f.state, "Named state (singlet)");
  scan->add_option("--pd", f.pd, "Detection probability p, or four values a,a',b,b'");
  scan->add_option("--apparatus-factor", f.apparatus_factor, "Factor applied to every P^d");
  scan->add_option("--grid-step", f.grid_step, "Grid step in degrees (default 45)");
  scan->add_option("--workers", f.workers, "Worker threads");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a local microstate model");
  simulate->add_option("--model", f.model, "gisin-gisin | sign-sign");
  simulate->add_option("--angles", f.angles, "tsirelson | a,a',b,b' in degrees | four x,y,z;...");
  simulate->add_option("--trials", f.trials, "Number of trials");
  simulate->add_option("--workers", f.workers, "Worker threads (output does not depend on it)");

  auto* sequential = app.add_subcommand("sequential", "Detection-weighted sequential table");
  sequential->add_option("--state", f.state, "Named state (singlet)");
  sequential->add_option("--a", f.a, "Direction of A: degrees or x,y,z");
  sequential->add_option("--b", f.b, "Direction of B: degrees or x,y,z");
  sequential->add_option("--pd", f.pd, "Detection probability p, or two values pA,pB");
  sequential->add_option("--apparatus-factor", f.apparatus_factor, "Factor applied to every P^d");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "esr-bell: " << e.what() << '\n';
    return kExitUsage;
  }

  const CLI::App* active = app.get_subcommands().front();
  try {
    ExperimentConfig config;
    if (given(app, "--config")) config = load_config_file(f.config_path, config);
    if (given(app, "--format")) config.format = f.format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (given(app, "--seed")) config.seed = f.seed;
    if (given(*active, "--state")) {
      config.state_name = f.state;
      config.state_matrix.reset();
    }
    if (given(*active, "--angles")) {
      if (f.angles == "tsirelson") {
        config.angle_preset = f.angles;
        config.angles.reset();
      } else {
        config.angles = parse_angle_list(f.angles);
      }
    }
    if (given(*active, "--pd")) config.detection = parse_number_list(f.pd);
    if (given(*active, "--apparatus-factor")) config.apparatus_factor = f.apparatus_factor;
    if (given(*active, "--grid-step")) config.grid_step_deg = f.grid_step;
    if (given(*active, "--trials")) config.trials = f.trials;
    if (given(*active, "--workers")) config.workers = f.workers;
    if (given(*active, "--model")) config.model = f.model;
    if (given(*active, "--a")) config.obs_a = parse_direction(f.a);
    if (given(*active, "--b")) config.obs_b = parse_direction(f.b);

    if (active == bound) {
      emit(cmd_bound(config), config.format, out);
    } else if (active == scan) {
      emit(cmd_scan(config), config.format, out);
    } else if (active == simulate) {
      emit(cmd_simulate(config), config.format, out);
    } else {
      emit(cmd_sequential(config), config.format, out);
    }
  } catch (const ValidationError& e) {
    err << "esr-bell: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "esr-bell: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "esr-bell: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace esr::cli
