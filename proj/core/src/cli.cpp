#include "rydsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <stdexcept>

namespace rydsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kSqrt2Inv = 0.7071067811865476;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

double get_number(const json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
  return j.at(key).get<bool>();
}

std::vector<double> get_array(const json& j, const std::string& path, const std::string& key,
                              std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) fail(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) fail(path + "." + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || (it.key() == k);
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

double to_angular(double mhz, bool angular) {
  return angular ? mhz * 1e6 : 2.0 * M_PI * mhz * 1e6;
}

void validate(const RunConfig& cfg) {
  if (cfg.physics.omega_mhz <= 0) fail("physics.omega_mhz", "must be positive");
  if (cfg.physics.gamma_over_omega < 0) fail("physics.gamma_over_omega", "must be >= 0");
  if (cfg.physics.scattering.enabled) {
    if (cfg.physics.scattering.delta_p_mhz == 0) fail("physics.scattering.delta_p_mhz", "must be nonzero");
    if (cfg.physics.scattering.gamma_p_mhz < 0) fail("physics.scattering.gamma_p_mhz", "must be >= 0");
  }
  if (cfg.run.points < 2) fail("run.points", "must be >= 2");
  if (cfg.run.parallel < 0) fail("run.parallel", "must be >= 0");
  if (cfg.run.t_max_rescaled <= 0) fail("run.t_max_rescaled", "must be positive");
  if (cfg.run.mode != "ideal" && cfg.run.mode != "unitary" && cfg.run.mode != "lindblad") {
    fail("run.mode", "must be one of ideal|unitary|lindblad");
  }
  if (cfg.run.perturbation < 0 || cfg.run.perturbation > 0.5) {
    fail("run.perturbation", "must be in [0, 0.5]");
  }
  double n = cfg.run.alpha_re * cfg.run.alpha_re + cfg.run.alpha_im * cfg.run.alpha_im +
             cfg.run.beta_re * cfg.run.beta_re + cfg.run.beta_im * cfg.run.beta_im;
  if (std::abs(n - 1.0) > 1e-9) fail("run.alpha/beta", "input amplitudes must be normalized");
}

std::string level_name(qcore::LevelLabel l) {
  switch (l) {
    case qcore::LevelLabel::g0: return "0";
    case qcore::LevelLabel::g1: return "1";
    case qcore::LevelLabel::ryd: return "r";
    default: return "?";
  }
}

class OutputWriter {
 public:
  OutputWriter(const RunConfig& cfg)
      : dir_(cfg.output.out_dir),
        csv_path_(dir_ / (command_name(cfg.command) + ".csv")),
        manifest_path_(dir_ / "manifest.json") {
    fs::create_directories(dir_);
    manifest_["config"] = json::parse(serialize_config(cfg));
    manifest_["version"] = kVersion;
    manifest_["conventions"] = {
        {"frequencies", "config MHz values scale by 2*pi*1e6 unless angular=true (then 1e6)"},
        {"rabi_convention", "H = omega |r><0| + h.c.; gate-stage matrix elements are omega/2 so "
                            "the Raman transfer completes at sqrt(2)*pi/omega"},
        {"decay_convention", "gamma is the total Rydberg decay rate; the gate stage splits it "
                             "between the |0> and |1> channels"},
        {"peak_rule", "first local maximum, three-point parabolic refinement"},
        {"averaging_rule", "probability-weighted over the four Bell branches at fixed input"},
        {"integrator", "fixed-step RK4, dt = (2*pi/400)/max(omega_scales, 1/t_total)"},
        {"step_divisor", dynamics::kStepDivisor},
    };
    manifest_["results_summary"] = nullptr;
    write_manifest();
  }

  // written before results, refreshed once results exist
  void write_manifest() {
    std::ofstream out(manifest_path_);
    if (!out) throw std::runtime_error("cannot write " + manifest_path_.string());
    out << manifest_.dump(2) << "\n";
  }

  void write_table(const experiments::SweepTable& table) {
    std::ofstream out(csv_path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path_.string());
    for (size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_value(row[c]);
      out << "\n";
    }
  }

  void write_teleport_csv(const protocol::TeleportReport& report) {
    std::ofstream out(csv_path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path_.string());
    out << "q1,q2,probability,branch_fidelity\n";
    double p = 0.0;
    for (const auto& b : report.branches) {
      out << level_name(b.outcome_q1) << "," << level_name(b.outcome_q2) << ","
          << format_value(b.probability) << "," << format_value(b.branch_fidelity) << "\n";
      p += b.probability;
    }
    out << "avg,avg," << format_value(p) << "," << format_value(report.average_fidelity) << "\n";
  }

  void finish(json summary) {
    manifest_["results_summary"] = std::move(summary);
    write_manifest();
  }

  void remove_outputs() {
    std::error_code ec;
    fs::remove(csv_path_, ec);
    fs::remove(manifest_path_, ec);
  }

  const fs::path& csv_path() const { return csv_path_; }

 private:
  fs::path dir_;
  fs::path csv_path_;
  fs::path manifest_path_;
  json manifest_;
};

json run_epr(const RunConfig& cfg, OutputWriter& out) {
  auto spec = to_system_spec(cfg.physics);
  auto mode = to_mode(cfg.run.mode);
  auto prep = protocol::prepare_epr(spec, mode, to_scattering_spec(cfg.physics));

  // population curve over the rescaled window in the configured mode
  experiments::SweepTable table;
  table.columns = {"omega_t", "p00", "p_epr", "p_rr"};
  if (mode == protocol::Mode::lindblad) {
    model::SystemSpec stage = spec;
    stage.gamma_1r = 0.0;
    auto channels = model::decay_channels(stage, 2, {0, 1}, {model::DecayTarget::to_g0});
    if (auto isp = to_scattering_spec(cfg.physics)) {
      auto extra = model::scattering_channels(
          *isp, 2, {{0, qcore::LevelLabel::g0}, {1, qcore::LevelLabel::g0}});
      channels.insert(channels.end(), extra.begin(), extra.end());
    }
    auto rho0 = qcore::DensityOperator::from_pure(
        qcore::PureState::basis(3, {qcore::LevelLabel::g0, qcore::LevelLabel::g0}));
    std::vector<double> grid;
    for (int i = 1; i < cfg.run.points; ++i) {
      grid.push_back(cfg.run.t_max_rescaled * i / (cfg.run.points - 1) / spec.omega_0r);
    }
    auto res = dynamics::propagate_lindblad(model::h_epr(stage), channels, rho0, grid);
    qcore::Vector epr = qcore::Vector::Zero(9);
    epr(2) = epr(6) = kSqrt2Inv;
    qcore::PureState probe(2, 3, epr);
    table.rows.push_back({0.0, 1.0, 0.0, 0.0});
    for (size_t i = 0; i < res.times.size(); ++i) {
      const auto& st = res.states[i];
      table.rows.push_back({res.times[i] * spec.omega_0r, st.matrix()(0, 0).real(),
                            st.population(probe), st.matrix()(8, 8).real()});
    }
  } else {
    table = experiments::fig3_populations(cfg.physics.delta_over_omega, cfg.run.t_max_rescaled,
                                          cfg.run.points);
  }
  out.write_table(table);
  return {{"elapsed_time_s", prep.elapsed_time},
          {"elapsed_time_rescaled", prep.elapsed_time * spec.omega_0r},
          {"p_epr_at_stop", prep.p_epr}};
}

json run_gate(const RunConfig& cfg, OutputWriter& out) {
  auto table = experiments::fig5_disentangle(cfg.physics.delta_over_omega,
                                             cfg.physics.gamma_over_omega,
                                             cfg.run.t_max_rescaled, cfg.run.points);
  out.write_table(table);
  double f = experiments::gate_fidelity_point(cfg.physics.delta_over_omega,
                                              cfg.physics.gamma_over_omega);
  return {{"gate_fidelity", f}};
}

json run_teleport(const RunConfig& cfg, OutputWriter& out) {
  auto spec = to_system_spec(cfg.physics);
  auto mode = to_mode(cfg.run.mode);
  protocol::TeleportOptions options;
  options.scattering = to_scattering_spec(cfg.physics);
  options.seed = cfg.run.seed;
  protocol::InputQubitSpec input{{cfg.run.alpha_re, cfg.run.alpha_im},
                                 {cfg.run.beta_re, cfg.run.beta_im}};
  auto report = protocol::teleport(input, spec, mode, options);
  out.write_teleport_csv(report);

  json summary = {
      {"average_fidelity", report.average_fidelity},
      {"p_leak", report.p_leak},
      {"total_time_ns", report.total_time * 1e9},
      {"t1_ns", report.timings.t1 * 1e9},
      {"t2_ns", report.timings.t2 * 1e9},
      {"t3_ns", report.timings.t3 * 1e9},
      {"epr_elapsed_ns", report.epr_elapsed * 1e9},
      {"epr_population", report.epr_population},
  };
  // reproducible draw from the branch distribution
  protocol::MeasurementResult meas{report.branches, report.p_leak};
  const auto& picked = protocol::sample_branch(meas, cfg.run.seed);
  summary["sampled_branch"] = level_name(picked.outcome_q1) + level_name(picked.outcome_q2);
  if (cfg.run.average_inputs) {
    summary["axial_average_fidelity"] = protocol::teleport_axial_average(spec, mode, options);
  }
  return summary;
}

json run_fig3(const RunConfig& cfg, OutputWriter& out) {
  auto table = experiments::fig3_populations(cfg.physics.delta_over_omega, cfg.run.t_max_rescaled,
                                             cfg.run.points);
  out.write_table(table);
  std::vector<double> ts, ps;
  for (const auto& r : table.rows) {
    ts.push_back(r[0]);
    ps.push_back(r[2]);
  }
  auto peaks = dynamics::local_maxima(ts, ps);
  json jp = json::array();
  for (const auto& p : peaks) jp.push_back({{"omega_t", p.t}, {"p_epr", p.value}});
  return {{"p_epr_peaks", jp}};
}

json run_fig4(const RunConfig& cfg, OutputWriter& out) {
  std::vector<double> dg = cfg.run.delta_grid, gg = cfg.run.gamma_grid;
  if (dg.empty()) for (int i = 0; i < 41; ++i) dg.push_back(20.0 * i / 40.0);
  if (gg.empty()) for (int i = 0; i < 41; ++i) gg.push_back(0.1 * i / 40.0);
  auto table = experiments::fig4_surface(dg, gg, cfg.run.parallel);
  out.write_table(table);
  double peak = 0.0;
  for (const auto& r : table.rows) peak = std::max(peak, r[2]);
  return {{"grid", {dg.size(), gg.size()}}, {"max_p_epr_peak", peak},
          {"evaluation_rule", "first local maximum of P_EPR per grid point"}};
}

json run_fig5(const RunConfig& cfg, OutputWriter& out) {
  auto table = experiments::fig5_disentangle(cfg.physics.delta_over_omega,
                                             cfg.physics.gamma_over_omega,
                                             cfg.run.t_max_rescaled, cfg.run.points);
  out.write_table(table);
  return {{"delta_over_omega", cfg.physics.delta_over_omega},
          {"gamma_over_omega", cfg.physics.gamma_over_omega}};
}

json run_fig6(const RunConfig& cfg, OutputWriter& out) {
  std::vector<double> dg = cfg.run.delta_grid, gl = cfg.run.gamma_list;
  if (dg.empty()) dg = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  if (gl.empty()) gl = {0.0, 0.005, 0.01, 0.02};
  auto table = experiments::fig6_gate_fidelity(dg, gl, cfg.run.parallel);
  out.write_table(table);
  double best = 0.0;
  for (const auto& r : table.rows) best = std::max(best, r[2]);
  return {{"max_gate_fidelity", best}};
}

json run_robustness(const RunConfig& cfg, OutputWriter& out) {
  auto spec = to_system_spec(cfg.physics);
  auto table = experiments::robustness_sweep(spec, cfg.run.perturbation, cfg.run.parallel);
  out.write_table(table);
  double lo = 1.0, hi = 0.0;
  for (const auto& r : table.rows) {
    lo = std::min(lo, r[1]);
    hi = std::max(hi, r[1]);
  }
  return {{"fidelity_min", lo}, {"fidelity_max", hi}, {"fidelity_spread", hi - lo}};
}

}  // namespace

Command command_from_string(const std::string& name) {
  if (name == "epr") return Command::epr;
  if (name == "gate") return Command::gate;
  if (name == "teleport") return Command::teleport;
  if (name == "fig3") return Command::fig3;
  if (name == "fig4") return Command::fig4;
  if (name == "fig5") return Command::fig5;
  if (name == "fig6") return Command::fig6;
  if (name == "robustness") return Command::robustness;
  throw std::invalid_argument("unknown command: " + name);
}

std::string command_name(Command c) {
  switch (c) {
    case Command::epr: return "epr";
    case Command::gate: return "gate";
    case Command::teleport: return "teleport";
    case Command::fig3: return "fig3";
    case Command::fig4: return "fig4";
    case Command::fig5: return "fig5";
    case Command::fig6: return "fig6";
    case Command::robustness: return "robustness";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& json_text, Command command) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, "", {"physics", "run", "output"});

  RunConfig cfg;
  cfg.command = command;

  if (j.contains("physics")) {
    const json& p = j.at("physics");
    reject_unknown(p, "physics",
                   {"omega_mhz", "angular", "delta_over_omega", "gamma_over_omega", "scattering"});
    cfg.physics.omega_mhz = get_number(p, "physics", "omega_mhz", cfg.physics.omega_mhz);
    cfg.physics.angular = get_bool(p, "physics", "angular", cfg.physics.angular);
    cfg.physics.delta_over_omega =
        get_number(p, "physics", "delta_over_omega", cfg.physics.delta_over_omega);
    cfg.physics.gamma_over_omega =
        get_number(p, "physics", "gamma_over_omega", cfg.physics.gamma_over_omega);
    if (p.contains("scattering")) {
      const json& s = p.at("scattering");
      reject_unknown(s, "physics.scattering",
                     {"enabled", "gamma_p_mhz", "delta_p_mhz", "omega_laser_mhz"});
      cfg.physics.scattering.enabled = get_bool(s, "physics.scattering", "enabled", false);
      cfg.physics.scattering.gamma_p_mhz =
          get_number(s, "physics.scattering", "gamma_p_mhz", cfg.physics.scattering.gamma_p_mhz);
      cfg.physics.scattering.delta_p_mhz =
          get_number(s, "physics.scattering", "delta_p_mhz", cfg.physics.scattering.delta_p_mhz);
      cfg.physics.scattering.omega_laser_mhz = get_number(
          s, "physics.scattering", "omega_laser_mhz", cfg.physics.scattering.omega_laser_mhz);
    }
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    reject_unknown(r, "run",
                   {"mode", "seed", "points", "parallel", "t_max_rescaled", "alpha_re", "alpha_im",
                    "beta_re", "beta_im", "average_inputs", "delta_grid", "gamma_grid",
                    "gamma_list", "perturbation"});
    if (r.contains("mode")) {
      if (!r.at("mode").is_string()) fail("run.mode", "expected a string");
      cfg.run.mode = r.at("mode").get<std::string>();
    }
    if (r.contains("seed")) {
      if (!r.at("seed").is_number_unsigned()) fail("run.seed", "expected an unsigned integer");
      cfg.run.seed = r.at("seed").get<std::uint64_t>();
    }
    cfg.run.points = static_cast<int>(get_number(r, "run", "points", cfg.run.points));
    cfg.run.parallel = static_cast<int>(get_number(r, "run", "parallel", cfg.run.parallel));
    cfg.run.t_max_rescaled = get_number(r, "run", "t_max_rescaled", cfg.run.t_max_rescaled);
    cfg.run.alpha_re = get_number(r, "run", "alpha_re", cfg.run.alpha_re);
    cfg.run.alpha_im = get_number(r, "run", "alpha_im", cfg.run.alpha_im);
    cfg.run.beta_re = get_number(r, "run", "beta_re", cfg.run.beta_re);
    cfg.run.beta_im = get_number(r, "run", "beta_im", cfg.run.beta_im);
    cfg.run.average_inputs = get_bool(r, "run", "average_inputs", cfg.run.average_inputs);
    cfg.run.delta_grid = get_array(r, "run", "delta_grid", cfg.run.delta_grid);
    cfg.run.gamma_grid = get_array(r, "run", "gamma_grid", cfg.run.gamma_grid);
    cfg.run.gamma_list = get_array(r, "run", "gamma_list", cfg.run.gamma_list);
    cfg.run.perturbation = get_number(r, "run", "perturbation", cfg.run.perturbation);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"out_dir"});
    if (o.contains("out_dir")) {
      if (!o.at("out_dir").is_string()) fail("output.out_dir", "expected a string");
      cfg.output.out_dir = o.at("out_dir").get<std::string>();
    }
  }

  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, command);
}

std::string serialize_config(const RunConfig& cfg) {
  json j = {
      {"physics",
       {{"omega_mhz", cfg.physics.omega_mhz},
        {"angular", cfg.physics.angular},
        {"delta_over_omega", cfg.physics.delta_over_omega},
        {"gamma_over_omega", cfg.physics.gamma_over_omega},
        {"scattering",
         {{"enabled", cfg.physics.scattering.enabled},
          {"gamma_p_mhz", cfg.physics.scattering.gamma_p_mhz},
          {"delta_p_mhz", cfg.physics.scattering.delta_p_mhz},
          {"omega_laser_mhz", cfg.physics.scattering.omega_laser_mhz}}}}},
      {"run",
       {{"mode", cfg.run.mode},
        {"seed", cfg.run.seed},
        {"points", cfg.run.points},
        {"parallel", cfg.run.parallel},
        {"t_max_rescaled", cfg.run.t_max_rescaled},
        {"alpha_re", cfg.run.alpha_re},
        {"alpha_im", cfg.run.alpha_im},
        {"beta_re", cfg.run.beta_re},
        {"beta_im", cfg.run.beta_im},
        {"average_inputs", cfg.run.average_inputs},
        {"delta_grid", cfg.run.delta_grid},
        {"gamma_grid", cfg.run.gamma_grid},
        {"gamma_list", cfg.run.gamma_list},
        {"perturbation", cfg.run.perturbation}}},
      {"output", {{"out_dir", cfg.output.out_dir}}},
  };
  return j.dump(2);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.out_dir) cfg.output.out_dir = *o.out_dir;
  if (o.mode) cfg.run.mode = *o.mode;
  if (o.points) cfg.run.points = *o.points;
  if (o.parallel) cfg.run.parallel = *o.parallel;
  if (o.omega_mhz) cfg.physics.omega_mhz = *o.omega_mhz;
  if (o.delta_over_omega) cfg.physics.delta_over_omega = *o.delta_over_omega;
  if (o.gamma_over_omega) cfg.physics.gamma_over_omega = *o.gamma_over_omega;
  if (o.scattering) cfg.physics.scattering.enabled = *o.scattering;
  if (o.average_inputs) cfg.run.average_inputs = *o.average_inputs;
  if (o.perturbation) cfg.run.perturbation = *o.perturbation;
  if (o.t_max_rescaled) cfg.run.t_max_rescaled = *o.t_max_rescaled;
  validate(cfg);
}

model::SystemSpec to_system_spec(const PhysicsConfig& p) {
  double omega = to_angular(p.omega_mhz, p.angular);
  return model::SystemSpec::uniform(omega, p.delta_over_omega * omega,
                                    p.gamma_over_omega * omega);
}

std::optional<model::IntermediateStateSpec> to_scattering_spec(const PhysicsConfig& p) {
  if (!p.scattering.enabled) return std::nullopt;
  model::IntermediateStateSpec s;
  s.gamma_p = to_angular(p.scattering.gamma_p_mhz, p.angular);
  s.delta_p = to_angular(p.scattering.delta_p_mhz, p.angular);
  s.omega_laser = to_angular(p.scattering.omega_laser_mhz, p.angular);
  s.validate();
  return s;
}

protocol::Mode to_mode(const std::string& mode) {
  if (mode == "ideal") return protocol::Mode::ideal;
  if (mode == "unitary") return protocol::Mode::full_unitary;
  if (mode == "lindblad") return protocol::Mode::lindblad;
  throw std::invalid_argument("unknown mode: " + mode);
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int run(const RunConfig& cfg) {
  std::optional<OutputWriter> out;
  try {
    out.emplace(cfg);
    json summary;
    switch (cfg.command) {
      case Command::epr: summary = run_epr(cfg, *out); break;
      case Command::gate: summary = run_gate(cfg, *out); break;
      case Command::teleport: summary = run_teleport(cfg, *out); break;
      case Command::fig3: summary = run_fig3(cfg, *out); break;
      case Command::fig4: summary = run_fig4(cfg, *out); break;
      case Command::fig5: summary = run_fig5(cfg, *out); break;
      case Command::fig6: summary = run_fig6(cfg, *out); break;
      case Command::robustness: summary = run_robustness(cfg, *out); break;
    }
    out->finish(std::move(summary));
    return 0;
  } catch (const std::exception& e) {
    if (out) out->remove_outputs();
    std::cerr << "rydsim: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rydsim::cli
