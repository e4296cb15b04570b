// rydsim -- Rydberg-blockade teleportation simulator.
//
//   rydsim <command> [--config FILE] [--seed N] [--out DIR]
//                    [--mode ideal|unitary|lindblad] [--points N] [--parallel N]
//
// Commands: epr, gate, teleport, fig3, fig4, fig5, fig6, robustness.
#include <CLI11.hpp>
#include <iostream>

#include "rydsim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-blockade quantum teleportation simulator"};
  app.require_subcommand(1);

  std::string config_file;
  rydsim::cli::Overrides o;

  for (const char* name : {"epr", "gate", "teleport", "fig3", "fig4", "fig5", "fig6",
                           "robustness"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "JSON configuration file");
    sub->add_option("--seed", [&o](const CLI::results_t& r) {
      o.seed = std::stoull(r[0]);
      return true;
    }, "random seed for sampling mode");
    sub->add_option("--out", [&o](const CLI::results_t& r) {
      o.out_dir = r[0];
      return true;
    }, "output directory");
    sub->add_option("--mode", [&o](const CLI::results_t& r) {
      o.mode = r[0];
      return true;
    }, "ideal | unitary | lindblad")->check(CLI::IsMember({"ideal", "unitary", "lindblad"}));
    sub->add_option("--points", [&o](const CLI::results_t& r) {
      o.points = std::stoi(r[0]);
      return true;
    }, "samples per curve");
    sub->add_option("--parallel", [&o](const CLI::results_t& r) {
      o.parallel = std::stoi(r[0]);
      return true;
    }, "sweep worker threads (0 = all cores)");
    sub->add_option("--omega-mhz", [&o](const CLI::results_t& r) {
      o.omega_mhz = std::stod(r[0]);
      return true;
    }, "Rabi frequency in MHz");
    sub->add_option("--delta-over-omega", [&o](const CLI::results_t& r) {
      o.delta_over_omega = std::stod(r[0]);
      return true;
    }, "blockade shift over Rabi frequency");
    sub->add_option("--gamma-over-omega", [&o](const CLI::results_t& r) {
      o.gamma_over_omega = std::stod(r[0]);
      return true;
    }, "total Rydberg decay rate over Rabi frequency");
    sub->add_option("--t-max", [&o](const CLI::results_t& r) {
      o.t_max_rescaled = std::stod(r[0]);
      return true;
    }, "curve window in rescaled time");
    sub->add_option("--perturbation", [&o](const CLI::results_t& r) {
      o.perturbation = std::stod(r[0]);
      return true;
    }, "fractional blockade deviation for robustness");
    sub->add_flag("--scattering", [&o](std::int64_t) { o.scattering = true; },
                  "enable intermediate-state scattering channels");
    sub->add_flag("--average-inputs", [&o](std::int64_t) { o.average_inputs = true; },
                  "also report the six-axial-input average fidelity");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    auto command = rydsim::cli::command_from_string(app.get_subcommands().front()->get_name());
    rydsim::cli::RunConfig cfg;
    if (!config_file.empty()) {
      cfg = rydsim::cli::parse_config_file(config_file, command);
    } else {
      cfg.command = command;
    }
    rydsim::cli::apply_overrides(cfg, o);
    return rydsim::cli::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "rydsim: " << e.what() << "\n";
    return 1;
  }
}
