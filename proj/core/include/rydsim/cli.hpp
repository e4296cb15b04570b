// Run configuration, result emission and command dispatch behind the
// rydsim executable. Configuration is JSON with flat physics/run/output
// sections; command-line flags override file values. Frequencies are
// entered in ordinary MHz unless the angular flag is set (entered 2.5
// means 2*pi*2.5e6 rad/s internally; with angular=true it means 2.5e6).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydsim/experiments.hpp"
#include "rydsim/protocol.hpp"

namespace rydsim::cli {

enum class Command { epr, gate, teleport, fig3, fig4, fig5, fig6, robustness };

Command command_from_string(const std::string& name);
std::string command_name(Command c);

struct ScatteringConfig {
  bool enabled = false;
  double gamma_p_mhz = 3.0;
  double delta_p_mhz = 1000.0;
  double omega_laser_mhz = 50.0;
};

struct PhysicsConfig {
  double omega_mhz = 2.5;
  bool angular = false;
  double delta_over_omega = 20.0;
  double gamma_over_omega = 1e-3;
  ScatteringConfig scattering;
};

struct RunSection {
  std::string mode = "lindblad";  // ideal | unitary | lindblad
  std::uint64_t seed = 0;
  int points = 400;
  int parallel = 0;  // 0 = all cores (capped by RYDSIM_THREADS)
  double t_max_rescaled = 8.0;
  double alpha_re = 0.7071067811865476, alpha_im = 0.0;
  double beta_re = 0.7071067811865476, beta_im = 0.0;
  bool average_inputs = false;
  std::vector<double> delta_grid;  // fig4 / fig6
  std::vector<double> gamma_grid;  // fig4
  std::vector<double> gamma_list;  // fig6
  double perturbation = 0.1;       // robustness
};

struct OutputSection {
  std::string out_dir = ".";
};

struct RunConfig {
  Command command = Command::teleport;
  PhysicsConfig physics;
  RunSection run;
  OutputSection output;
};

// Strict parsing: unknown keys, missing required fields and non-numeric
// values are reported with their key path.
RunConfig parse_config(const std::string& json_text, Command command);
RunConfig parse_config_file(const std::string& path, Command command);
std::string serialize_config(const RunConfig& cfg);

// Flag values layered on top of the file configuration.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> points;
  std::optional<int> parallel;
  std::optional<double> omega_mhz;
  std::optional<double> delta_over_omega;
  std::optional<double> gamma_over_omega;
  std::optional<bool> scattering;
  std::optional<bool> average_inputs;
  std::optional<double> perturbation;
  std::optional<double> t_max_rescaled;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

model::SystemSpec to_system_spec(const PhysicsConfig& p);
std::optional<model::IntermediateStateSpec> to_scattering_spec(const PhysicsConfig& p);
protocol::Mode to_mode(const std::string& mode);

// Execute the configured command: write `<command>.csv` and
// `manifest.json` under out_dir. The manifest is written before the
// results; partial outputs are removed on failure. Returns the process
// exit status.
int run(const RunConfig& cfg);

// CSV cells carry 12 significant digits.
std::string format_value(double v);

}  // namespace rydsim::cli
