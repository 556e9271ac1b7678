#include "hbarsim/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hbarsim/constants.hpp"
#include "hbarsim/ensemble.hpp"
#include "hbarsim/errors.hpp"
#include "hbarsim/free_particle.hpp"
#include "hbarsim/noise.hpp"
#include "hbarsim/oscillator.hpp"
#include "hbarsim/photon.hpp"
#include "hbarsim/version.hpp"

namespace hbarsim::cli {

namespace {

struct ParamSpec {
  std::string name;
  double default_si = 0.0;
  double default_natural = 0.0;  // equals default_si unless unit dependent
  bool required = false;
  std::string help;
  std::string flag;  // CLI flag override; empty derives --name
};

ParamSpec required_param(std::string name, std::string help) {
  return ParamSpec{std::move(name), 0.0, 0.0, true, std::move(help), {}};
}

ParamSpec optional_param(std::string name, double value, std::string help) {
  return ParamSpec{std::move(name), value, value, false, std::move(help), {}};
}

ParamSpec unit_param(std::string name, double si, double natural,
                     std::string help) {
  return ParamSpec{std::move(name), si, natural, false, std::move(help), {}};
}

struct CommandSpec {
  std::string id;                 // dotted id used in configs and meta
  std::vector<std::string> path;  // CLI subcommand path
  std::string help;
  std::vector<ParamSpec> params;
  bool uses_mode = false;
  bool uses_convention = false;
  bool uses_sampling = false;
  std::function<ResultTable(const RunConfig&)> handler;

  const ParamSpec* find_param(const std::string& name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }
};

// Resolved-parameter accessor for the handlers.
class Args {
 public:
  explicit Args(const RunConfig& config) : config_(config) {}

  double get(const std::string& name) const {
    const auto it = config_.parameters.find(name);
    if (it == config_.parameters.end())
      throw ValidationError("missing parameter '" + name + "'");
    return it->second;
  }

  std::int64_t count(const std::string& name) const {
    const double v = get(name);
    if (!(v >= 1.0) || v != std::floor(v) || v > 9.2e18)
      throw ValidationError("parameter '" + name +
                            "' must be a positive integer count");
    return static_cast<std::int64_t>(v);
  }

  const RunConfig& config() const { return config_; }

 private:
  const RunConfig& config_;
};

MomentMode parse_mode(const std::string& mode) {
  if (mode == "exact") return MomentMode::exact;
  if (mode == "half-rate") return MomentMode::half_rate;
  throw ValidationError("unknown moment mode '" + mode + "' (exact|half-rate)");
}

AngularFrequencyConvention parse_convention(const std::string& convention) {
  if (convention == "2pi-nu")
    return AngularFrequencyConvention::omega_is_2pi_nu;
  if (convention == "nu") return AngularFrequencyConvention::omega_is_nu;
  throw ValidationError("unknown omega convention '" + convention +
                        "' (2pi-nu|nu)");
}

TravelSampling parse_sampling(const std::string& sampling) {
  if (sampling == "leading") return TravelSampling::leading_order;
  if (sampling == "exact-sqrt") return TravelSampling::exact_sqrt;
  throw ValidationError("unknown sampling mode '" + sampling +
                        "' (leading|exact-sqrt)");
}

double z_score(double estimate, double reference, double std_error) {
  return std_error > 0.0 ? (estimate - reference) / std_error : 0.0;
}

EnsembleConfig ensemble_config(const Args& args, double t_end) {
  EnsembleConfig config;
  config.n_paths = args.count("n_paths");
  config.n_steps = args.count("n_steps");
  config.t_end = t_end;
  config.master_seed = args.config().seed;
  return config;
}

void note_standard_limit(ResultTable& table, double tau) {
  if (tau == 0.0)
    table.notes.push_back(
        "standard QM limit: tau = 0, observables equal the constant-hbar "
        "values exactly");
}

// ---------------------------------------------------------------------------
// command handlers

ResultTable run_simulate_free(const RunConfig& config) {
  const Args args(config);
  const GaussianPacket packet{args.get("p_bar"), args.get("delta"),
                              args.get("mass"), args.get("hbar")};
  const NoiseParams noise = NoiseParams::from_tau(args.get("tau"));
  const double t = args.get("t");

  const double displacement = mean_displacement(packet, t);
  const double closed = spread_growth(packet, noise, t);
  const double diffusion = diffusion_coefficient(packet, noise);
  const EnsembleEstimate mc =
      mc_spread(packet, noise, ensemble_config(args, t));

  ResultTable table;
  table.columns = {"t",
                   "mean_displacement",
                   "spread_growth_closed",
                   "spread_growth_mc",
                   "spread_growth_mc_se",
                   "z_score",
                   "diffusion_coefficient"};
  table.add_row({t, displacement, closed, mc.mean, mc.std_error,
                 z_score(mc.mean, closed, mc.std_error), diffusion});
  note_standard_limit(table, noise.tau);
  return table;
}

ResultTable run_simulate_photon(const RunConfig& config) {
  const Args args(config);
  const NoiseParams noise = NoiseParams::from_tau(args.get("tau"));
  const double arm_length = args.get("L");
  const double c = args.get("c");
  const double travel_time = arm_length / c;

  const double spread = photon_spread(noise, travel_time, c);
  const double dt_var = travel_time_variance(noise, arm_length, c);
  const double speed_var = effective_speed_variance(noise, arm_length, c);
  const VarianceDecomposition mc =
      mc_travel_time(noise, arm_length, c, ensemble_config(args, travel_time),
                     parse_sampling(config.sampling));

  ResultTable table;
  table.columns = {"travel_time",
                   "mean_displacement",
                   "photon_spread_closed",
                   "travel_time_variance_closed",
                   "travel_time_mean_mc",
                   "travel_time_mean_mc_se",
                   "travel_time_variance_mc",
                   "travel_time_variance_mc_se",
                   "z_score_variance",
                   "effective_speed_variance"};
  table.add_row({travel_time, c * travel_time, spread, dt_var, mc.mean,
                 mc.mean_std_error, mc.between_variance, mc.between_std_error,
                 z_score(mc.between_variance, dt_var, mc.between_std_error),
                 speed_var});
  note_standard_limit(table, noise.tau);
  if (config.sampling == "exact-sqrt")
    table.notes.push_back(
        "exact-sqrt sampling: arrival sums sqrt(1+eps) per cell; the mean "
        "drift relative to leading order quantifies the dropped order-sigma^2 "
        "term at this grid resolution");
  return table;
}

ResultTable run_simulate_oscillator(const RunConfig& config) {
  const Args args(config);
  CoherentStateSpec spec;
  spec.lambda = args.get("lambda");
  spec.omega = args.get("omega");
  spec.mass = args.get("mass");
  spec.hbar = args.get("hbar");
  spec.mode = parse_mode(config.mode);
  const NoiseParams noise = NoiseParams::from_tau(args.get("tau"));
  const double t = args.get("t");

  const CoherentMoments closed = coherent_moments(spec, noise, t);
  const double product = uncertainty_product(spec, noise, t);
  const OscillatorMcMoments mc =
      mc_oscillator(spec, noise, ensemble_config(args, t), t);

  ResultTable table;
  table.columns = {"t",
                   "mean_x_closed",
                   "mean_x_mc",
                   "mean_x_mc_se",
                   "mean_p_closed",
                   "mean_p_mc",
                   "mean_p_mc_se",
                   "mean_x2_closed",
                   "mean_x2_mc",
                   "mean_x2_mc_se",
                   "mean_p2_closed",
                   "mean_p2_mc",
                   "mean_p2_mc_se",
                   "uncertainty_product",
                   "occupation_mc"};
  table.add_row({t, closed.mean_x, mc.mean_x.mean, mc.mean_x.std_error,
                 closed.mean_p, mc.mean_p.mean, mc.mean_p.std_error,
                 closed.mean_x2, mc.mean_x2.mean, mc.mean_x2.std_error,
                 closed.mean_p2, mc.mean_p2.mean, mc.mean_p2.std_error,
                 product, mc.occupation.mean});
  note_standard_limit(table, noise.tau);
  return table;
}

ResultTable run_interference(const RunConfig& config) {
  const Args args(config);
  const NoiseParams noise = NoiseParams::from_tau(args.get("tau"));
  const double omega = args.get("omega");
  const double arm_length = args.get("L");
  const double c = args.get("c");

  const double closed = interference_intensity(omega, noise, arm_length, c);
  const double contrast = visibility(omega, noise, arm_length, c);

  EnsembleConfig mc_config;
  mc_config.n_paths = args.count("n_samples");
  mc_config.master_seed = config.seed;
  const EnsembleEstimate mc =
      mc_interference(omega, noise, arm_length, c, mc_config);

  ResultTable table;
  table.columns = {"decoherence_exponent", "intensity_closed",  "visibility",
                   "intensity_mc",         "intensity_mc_se",   "z_score"};
  table.add_row({omega * omega * noise.tau * arm_length / (4.0 * c), closed,
                 contrast, mc.mean, mc.std_error,
                 z_score(mc.mean, closed, mc.std_error)});
  note_standard_limit(table, noise.tau);
  return table;
}

ResultTable run_bound_interferometer(const RunConfig& config) {
  const Args args(config);
  InterferometerSpec spec;
  spec.arm_length = args.get("L");
  spec.light_frequency = args.get("nu");
  spec.bandwidth = args.get("delta_nu");
  spec.power = args.get("power");
  spec.convention = parse_convention(config.convention);

  PhysicalConstants constants = PhysicalConstants::from_h(args.get("h"));
  constants.c = args.get("c");
  constants.electronvolt = args.get("ev");

  const TauBound bound = shot_noise_bound(spec, constants);

  ResultTable table;
  table.columns = {"omega", "tau_max_s", "lambda_gev"};
  table.add_row({spec.angular_frequency(), bound.tau_max, bound.lambda_gev});
  return table;
}

ResultTable run_bound_cavity(const RunConfig& config) {
  const Args args(config);
  const CavitySpec cavity =
      CavitySpec::from_q(args.get("Q"), args.get("omega"));
  PhysicalConstants constants = PhysicalConstants::si();
  constants.hbar = args.get("hbar");
  constants.h = constants.hbar * 2.0 * M_PI;
  constants.electronvolt = args.get("ev");

  const TauBound bound =
      cavity_bound(cavity, args.get("lambda"), args.get("dhbar"), constants);

  ResultTable table;
  table.columns = {"q_omega_tau", "tau_max_s", "lambda_gev"};
  table.add_row({bound.tau_max * cavity.quality_factor * cavity.omega,
                 bound.tau_max, bound.lambda_gev});
  return table;
}

ResultTable run_bound_sigma(const RunConfig& config) {
  const Args args(config);
  const double delta_t = args.get("delta_t");
  const double total_time = args.get("T");
  const double sigma = max_sigma(delta_t, total_time);
  const double count = negative_fluctuation_count(
      NoiseParams::from_sigma(sigma, delta_t), total_time);

  ResultTable table;
  table.columns = {"sigma_max", "expected_count"};
  table.add_row({sigma, count});
  if (sigma == max_sigma_sentinel && count < 1.0)
    table.notes.push_back(
        "vacuous bound: even sigma = 1 yields fewer than one expected "
        "eps < -1 event; sigma_max is the sentinel upper value");
  return table;
}

ResultTable run_figure1(const RunConfig& config) {
  if (config.format != OutputFormat::csv)
    throw ValidationError("figure1 emits a CSV artifact; use --format csv");
  CoherentStateSpec spec;
  spec.lambda = 1.0;
  spec.omega = 1.0;
  spec.mass = 1.0;
  spec.hbar = 1.0;
  spec.mode = MomentMode::half_rate;
  const NoiseParams noise = NoiseParams::from_tau(0.05);  // omega tau = 0.05

  ResultTable table;
  table.columns = {"omega_t", "mean_x", "mean_x2", "var_x"};
  for (int i = 0; i <= 1500; ++i) {
    const double omega_t = 0.1 * static_cast<double>(i);
    const CoherentMoments m = coherent_moments(spec, noise, omega_t);
    table.add_row({omega_t, m.mean_x, m.mean_x2,
                   position_variance(spec, noise, omega_t)});
  }
  table.notes.push_back(
      "coherent-state time evolution, lambda = 1, omega tau = 0.05, "
      "half-rate second moments, lengths in sqrt(hbar/(m omega))");
  return table;
}

const std::vector<CommandSpec>& command_specs();

const CommandSpec& find_command_in(const std::vector<CommandSpec>& all,
                                   const std::string& id) {
  for (const auto& spec : all)
    if (spec.id == id) return spec;
  throw std::logic_error("command registry missing '" + id + "'");
}

const CommandSpec& find_command(const std::string& id) {
  for (const auto& spec : command_specs())
    if (spec.id == id) return spec;
  throw ValidationError("unknown command '" + id + "'");
}

// Cartesian sweep over one of the single-row commands.
ResultTable run_sweep(const RunConfig& config, const std::string& base_id) {
  if (config.grids.empty())
    throw ValidationError("sweep: provide at least one --grid name=v1,v2,...");
  const CommandSpec& base = find_command(base_id);
  for (const auto& [name, values] : config.grids) {
    if (!base.find_param(name))
      throw ValidationError("sweep: '" + name + "' is not a parameter of " +
                            base_id);
    if (values.empty())
      throw ValidationError("sweep: grid '" + name + "' is empty");
  }

  std::vector<std::string> grid_names;
  for (const auto& [name, values] : config.grids) grid_names.push_back(name);

  ResultTable table;
  std::vector<std::size_t> index(grid_names.size(), 0);
  bool done = false;
  while (!done) {
    RunConfig point = config;
    point.command = base_id;
    point.grids.clear();
    for (std::size_t k = 0; k < grid_names.size(); ++k)
      point.parameters[grid_names[k]] =
          config.grids.at(grid_names[k])[index[k]];
    const ResultTable row = execute(point);
    if (row.rows.size() != 1)
      throw ValidationError("sweep: command '" + base_id +
                            "' is not sweepable");
    if (table.columns.empty()) {
      table.columns = grid_names;
      table.columns.insert(table.columns.end(), row.columns.begin(),
                           row.columns.end());
    }
    std::vector<double> out_row;
    for (std::size_t k = 0; k < grid_names.size(); ++k)
      out_row.push_back(point.parameters[grid_names[k]]);
    out_row.insert(out_row.end(), row.rows[0].begin(), row.rows[0].end());
    table.add_row(std::move(out_row));

    // odometer increment, last grid fastest
    done = true;
    for (std::size_t k = grid_names.size(); k-- > 0;) {
      if (++index[k] < config.grids.at(grid_names[k]).size()) {
        done = false;
        break;
      }
      index[k] = 0;
    }
  }

  for (const auto& name : grid_names) {
    std::ostringstream note;
    note << "grid " << name << " =";
    for (const double v : config.grids.at(name)) note << " " << format_double(v);
    table.notes.push_back(note.str());
  }
  return table;
}

// ---------------------------------------------------------------------------
// registry

constexpr double si_hbar = 6.626070040e-34 / (2.0 * M_PI);
constexpr double si_h = 6.626070040e-34;
constexpr double si_c = 299792458.0;
constexpr double si_ev = 1.602176634e-19;

std::vector<ParamSpec> mc_params() {
  return {optional_param("n_paths", 100000, "Monte-Carlo path count"),
          optional_param("n_steps", 64, "grid cells per path")};
}

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = [] {
    std::vector<CommandSpec> all;

    {
      CommandSpec spec;
      spec.id = "simulate.free";
      spec.path = {"simulate", "free"};
      spec.help = "massive Gaussian packet: spread growth, closed form vs MC";
      spec.params = {required_param("tau", "noise strength tau [s]"),
                     optional_param("t", 10.0, "evolution time"),
                     optional_param("p_bar", 1.0, "packet peak momentum"),
                     optional_param("delta", 0.1, "packet momentum width"),
                     optional_param("mass", 1.0, "particle mass"),
                     unit_param("hbar", si_hbar, 1.0, "reduced Planck constant")};
      for (auto& p : mc_params()) spec.params.push_back(p);
      spec.handler = run_simulate_free;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "simulate.photon";
      spec.path = {"simulate", "photon"};
      spec.help = "massless packet: arrival-time statistics over a baseline";
      spec.params = {required_param("tau", "noise strength tau [s]"),
                     required_param("L", "baseline length"),
                     unit_param("c", si_c, 1.0, "speed of light")};
      for (auto& p : mc_params()) spec.params.push_back(p);
      spec.uses_sampling = true;
      spec.handler = run_simulate_photon;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "simulate.oscillator";
      spec.path = {"simulate", "oscillator"};
      spec.help = "coherent state: damped moments, closed form vs MC";
      spec.params = {required_param("tau", "noise strength tau [s]"),
                     optional_param("omega", 1.0, "oscillator frequency"),
                     optional_param("lambda", 1.0, "coherent amplitude"),
                     optional_param("t", 10.0, "evolution time"),
                     optional_param("mass", 1.0, "oscillator mass"),
                     unit_param("hbar", si_hbar, 1.0, "reduced Planck constant")};
      for (auto& p : mc_params()) spec.params.push_back(p);
      spec.uses_mode = true;
      spec.handler = run_simulate_oscillator;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "interference";
      spec.path = {"interference"};
      spec.help = "two-slit fringe intensity and visibility under hbar noise";
      spec.params = {required_param("tau", "noise strength tau [s]"),
                     required_param("omega", "light angular frequency"),
                     required_param("L", "plate-to-screen distance"),
                     unit_param("c", si_c, 1.0, "speed of light"),
                     optional_param("n_samples", 1000000, "Monte-Carlo samples")};
      spec.handler = run_interference;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "bound.interferometer";
      spec.path = {"bound", "interferometer"};
      spec.help = "shot-noise-limited bound on tau from a long baseline";
      spec.params = {optional_param("L", 1000.0, "arm length [m]"),
                     optional_param("nu", 1e14, "light frequency [Hz]"),
                     optional_param("delta_nu", 1.0, "bunch bandwidth [Hz]"),
                     optional_param("power", 10.0, "light power [W]"),
                     [] {
                       ParamSpec h = optional_param("h", si_h,
                                                    "Planck constant [J s]");
                       h.flag = "--planck-h";
                       return h;
                     }(),
                     optional_param("c", si_c, "speed of light [m/s]"),
                     optional_param("ev", si_ev, "electronvolt [J]")};
      spec.uses_convention = true;
      spec.handler = run_bound_interferometer;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "bound.cavity";
      spec.path = {"bound", "cavity"};
      spec.help = "homodyne uncertainty-product bound on tau from a cavity";
      spec.params = {optional_param("Q", 1e15, "cavity quality factor"),
                     optional_param("omega", 3e15, "mode frequency [1/s]"),
                     optional_param("lambda", 1.0, "coherent amplitude"),
                     optional_param("dhbar", 0.01,
                                    "relative measurement precision on hbar"),
                     optional_param("hbar", si_hbar, "reduced Planck [J s]"),
                     optional_param("ev", si_ev, "electronvolt [J]")};
      spec.handler = run_bound_cavity;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "bound.sigma";
      spec.path = {"bound", "sigma"};
      spec.help = "largest sigma with under one eps < -1 event over period T";
      spec.params = {optional_param("T", 4.35e17, "observation period [s]"),
                     optional_param("delta_t", 5.4e-44,
                                    "noise correlation time [s]")};
      spec.handler = run_bound_sigma;
      all.push_back(std::move(spec));
    }
    {
      CommandSpec spec;
      spec.id = "figure1";
      spec.path = {"figure1"};
      spec.help = "coherent-state evolution dataset (CSV), omega tau = 0.05";
      spec.handler = run_figure1;
      all.push_back(std::move(spec));
    }

    // sweep variants of every single-row command
    const std::vector<std::pair<std::string, std::string>> sweepable = {
        {"free", "simulate.free"},
        {"photon", "simulate.photon"},
        {"oscillator", "simulate.oscillator"},
        {"interference", "interference"},
        {"bound-interferometer", "bound.interferometer"},
        {"bound-cavity", "bound.cavity"},
        {"bound-sigma", "bound.sigma"}};
    for (const auto& [leaf, base_name] : sweepable) {
      const std::string base_id = base_name;
      const CommandSpec& base = find_command_in(all, base_id);
      CommandSpec spec;
      spec.id = "sweep." + leaf;
      spec.path = {"sweep", leaf};
      spec.help = "Cartesian parameter sweep of " + base_id;
      spec.params = base.params;
      spec.uses_mode = base.uses_mode;
      spec.uses_convention = base.uses_convention;
      spec.uses_sampling = base.uses_sampling;
      spec.handler = [base_id](const RunConfig& config) {
        return run_sweep(config, base_id);
      };
      all.push_back(std::move(spec));
    }
    return all;
  }();
  return specs;
}

// ---------------------------------------------------------------------------
// resolution and config files

// Fills defaults, rejects unknown keys, checks required parameters.
RunConfig resolve(const RunConfig& config, const CommandSpec& spec) {
  RunConfig resolved = config;
  const bool is_sweep = spec.id.starts_with("sweep.");

  for (const auto& [key, value] : config.parameters) {
    (void)value;
    if (!spec.find_param(key))
      throw ValidationError("unknown parameter '" + key + "' for command " +
                            spec.id);
  }
  for (const auto& param : spec.params) {
    if (is_sweep && config.grids.count(param.name)) {
      resolved.parameters.erase(param.name);  // grid owns it; keep meta honest
      continue;
    }
    if (resolved.parameters.count(param.name)) continue;
    if (param.required) {
      if (is_sweep) continue;  // the per-point resolution reports the gap
      throw ValidationError("command " + spec.id +
                            " requires parameter '" + param.name + "'");
    }
    resolved.parameters[param.name] =
        config.natural_units ? param.default_natural : param.default_si;
  }
  if (!spec.uses_mode && !is_sweep) resolved.mode.clear();
  if (!spec.uses_convention && !is_sweep) resolved.convention.clear();
  if (!spec.uses_sampling && !is_sweep) resolved.sampling.clear();
  return resolved;
}

std::string mode_label(const RunConfig& resolved, const CommandSpec& spec) {
  std::vector<std::string> parts;
  if (spec.uses_mode && !resolved.mode.empty()) parts.push_back(resolved.mode);
  if (spec.uses_convention && !resolved.convention.empty())
    parts.push_back("omega=" + resolved.convention);
  if (spec.uses_sampling && !resolved.sampling.empty())
    parts.push_back("sampling=" + resolved.sampling);
  if (resolved.natural_units) parts.push_back("natural-units");
  std::string label;
  for (const auto& part : parts) {
    if (!label.empty()) label += ",";
    label += part;
  }
  return label;
}

void apply_config_json(RunConfig& config, const nlohmann::json& doc,
                       const std::string& invoked_command,
                       bool* format_was_set = nullptr) {
  if (!doc.is_object())
    throw ValidationError("config file: top level must be an object");
  static const std::vector<std::string> known = {
      "command",  "parameters",  "grids",       "mode",
      "convention", "sampling",  "natural_units", "seed",
      "output_path", "output_format"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config file: unknown key '" + key + "'");
  }

  if (doc.contains("command")) {
    if (!doc["command"].is_string())
      throw ValidationError("config file: command must be a string");
    const std::string from_config = doc["command"];
    if (!invoked_command.empty() && from_config != invoked_command)
      throw ValidationError("config file names command '" + from_config +
                            "' but '" + invoked_command + "' was invoked");
    config.command = from_config;
  }
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object())
      throw ValidationError("config file: parameters must be an object");
    for (const auto& [key, value] : doc["parameters"].items()) {
      if (!value.is_number())
        throw ValidationError("config file: parameter '" + key +
                              "' must be a number");
      config.parameters[key] = value.get<double>();
    }
  }
  if (doc.contains("grids")) {
    if (!doc["grids"].is_object())
      throw ValidationError("config file: grids must be an object");
    for (const auto& [key, values] : doc["grids"].items()) {
      if (!values.is_array())
        throw ValidationError("config file: grid '" + key +
                              "' must be an array");
      std::vector<double> grid;
      for (const auto& v : values) {
        if (!v.is_number())
          throw ValidationError("config file: grid '" + key +
                                "' must contain numbers");
        grid.push_back(v.get<double>());
      }
      config.grids[key] = std::move(grid);
    }
  }
  const auto string_field = [&](const char* key, std::string& into) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string())
      throw ValidationError(std::string("config file: ") + key +
                            " must be a string");
    into = doc[key].get<std::string>();
  };
  string_field("mode", config.mode);
  string_field("convention", config.convention);
  string_field("sampling", config.sampling);
  string_field("output_path", config.output_path);
  if (doc.contains("natural_units")) {
    if (!doc["natural_units"].is_boolean())
      throw ValidationError("config file: natural_units must be a boolean");
    config.natural_units = doc["natural_units"].get<bool>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ValidationError("config file: seed must be an unsigned integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output_format")) {
    if (!doc["output_format"].is_string())
      throw ValidationError("config file: output_format must be a string");
    config.format = parse_output_format(doc["output_format"].get<std::string>());
    if (format_was_set) *format_was_set = true;
  }
}

void apply_config_file(RunConfig& config, const std::string& path,
                       const std::string& invoked_command,
                       bool* format_was_set = nullptr) {
  std::ifstream file(path);
  if (!file) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
  apply_config_json(config, doc, invoked_command, format_was_set);
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("HBARSIM_SEED");
  if (!env || !*env) return RunConfig{}.seed;
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0' ||
      std::string_view(env).find('-') != std::string_view::npos)
    throw ValidationError("HBARSIM_SEED must be an unsigned integer");
  return static_cast<std::uint64_t>(value);
}

ResultTable execute(const RunConfig& config) {
  if (config.command.empty())
    throw ValidationError("no command selected");
  const CommandSpec& spec = find_command(config.command);
  const RunConfig resolved = resolve(config, spec);

  ResultTable table = spec.handler(resolved);
  table.command = spec.id;
  table.tool_version = version;
  table.seed = resolved.seed;
  table.parameters = resolved.parameters;
  table.mode = mode_label(resolved, spec);
  table.stamp();
  return table;
}

int run(const RunConfig& config) {
  try {
    const ResultTable table = execute(config);
    if (config.output_path.empty()) {
      write(table, config.format, std::cout);
    } else {
      std::ofstream out(config.output_path);
      if (!out)
        throw NumericalError("cannot open output file '" + config.output_path +
                             "'");
      write(table, config.format, out);
      if (!out)
        throw NumericalError("failed writing output file '" +
                             config.output_path + "'");
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

// ---------------------------------------------------------------------------
// command line front end

namespace {

struct LeafState {
  const CommandSpec* spec = nullptr;  // null for the bare `run` command
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, double> values;
  std::map<std::string, CLI::Option*> value_options;
  std::string mode, convention, sampling, output, format;
  std::vector<std::string> grid_args;
  std::uint64_t seed = 0;
  bool natural = false;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* convention_opt = nullptr;
  CLI::Option* sampling_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* natural_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
};

std::string flag_name(const ParamSpec& param) {
  if (!param.flag.empty()) return param.flag;
  std::string flag = "--" + param.name;
  for (auto& ch : flag)
    if (ch == '_') ch = '-';
  return flag;
}

void add_common_options(LeafState& leaf, bool with_grids) {
  CLI::App* app = leaf.app;
  app->add_option("--config", leaf.config_path,
                  "JSON config file (flags override it)");
  leaf.seed_opt = app->add_option("--seed", leaf.seed, "master random seed");
  leaf.output_opt =
      app->add_option("--output,-o", leaf.output, "output file (default stdout)");
  leaf.format_opt =
      app->add_option("--format", leaf.format, "output format: csv|json");
  leaf.natural_opt = app->add_flag("--natural-units", leaf.natural,
                                   "natural-unit defaults (hbar = c = 1)");
  if (leaf.spec) {
    for (const auto& param : leaf.spec->params) {
      leaf.value_options[param.name] =
          app->add_option(flag_name(param), leaf.values[param.name], param.help);
    }
    if (leaf.spec->uses_mode)
      leaf.mode_opt = app->add_option(
          "--mode", leaf.mode, "second-moment damping: exact|half-rate");
    if (leaf.spec->uses_convention)
      leaf.convention_opt = app->add_option(
          "--convention", leaf.convention, "omega convention: 2pi-nu|nu");
    if (leaf.spec->uses_sampling)
      leaf.sampling_opt = app->add_option(
          "--sampling", leaf.sampling, "arrival sampling: leading|exact-sqrt");
    if (with_grids)
      leaf.grid_opt = app->add_option(
          "--grid", leaf.grid_args,
          "sweep grid, name=v1,v2,... (repeatable, Cartesian product)");
  }
}

std::map<std::string, std::vector<double>> parse_grid_args(
    const std::vector<std::string>& args) {
  std::map<std::string, std::vector<double>> grids;
  for (const auto& arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError("--grid expects name=v1,v2,... got '" + arg + "'");
    const std::string name = arg.substr(0, eq);
    std::vector<double> values;
    std::stringstream list(arg.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ValidationError("--grid " + name + ": bad number '" + item + "'");
      }
    }
    if (values.empty())
      throw ValidationError("--grid " + name + ": empty value list");
    grids[name] = std::move(values);
  }
  return grids;
}

}  // namespace

int main_entry(int argc, const char* const* argv) {
  CLI::App app{"hbarsim: observables and experimental bounds for a "
               "white-noise-fluctuating Planck constant"};
  app.require_subcommand(1);

  std::list<LeafState> leaves;
  std::map<std::string, CLI::App*> groups;

  const auto group_app = [&](const std::string& name,
                             const std::string& help) {
    auto it = groups.find(name);
    if (it != groups.end()) return it->second;
    CLI::App* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    groups[name] = sub;
    return sub;
  };

  for (const auto& spec : command_specs()) {
    LeafState leaf;
    leaf.spec = &spec;
    if (spec.path.size() == 1) {
      leaf.app = app.add_subcommand(spec.path[0], spec.help);
    } else {
      const std::string group_help =
          spec.path[0] == "simulate" ? "time-evolution observables"
          : spec.path[0] == "bound"  ? "experimental bounds on tau"
                                     : "parameter sweeps";
      leaf.app = group_app(spec.path[0], group_help)
                     ->add_subcommand(spec.path[1], spec.help);
    }
    leaves.push_back(leaf);
    add_common_options(leaves.back(), spec.id.starts_with("sweep."));
  }

  // `run` executes a config file as-is.
  {
    LeafState leaf;
    leaf.app = app.add_subcommand("run", "execute a JSON config file");
    leaves.push_back(leaf);
    add_common_options(leaves.back(), false);
    leaves.back().app->get_option("--config")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // parse problems are validation failures
  }

  try {
    LeafState* chosen = nullptr;
    for (auto& leaf : leaves)
      if (leaf.app->parsed()) chosen = &leaf;
    if (!chosen) throw ValidationError("no command selected");

    RunConfig config;
    config.seed = default_seed();
    bool config_set_format = false;
    if (chosen->spec) config.command = chosen->spec->id;
    if (!chosen->config_path.empty())
      apply_config_file(config, chosen->config_path,
                        chosen->spec ? chosen->spec->id : std::string{},
                        &config_set_format);
    if (!chosen->spec && config.command.empty())
      throw ValidationError("run: config file must name a command");

    for (const auto& [name, option] : chosen->value_options)
      if (option->count() > 0) config.parameters[name] = chosen->values[name];
    if (chosen->mode_opt && chosen->mode_opt->count() > 0)
      config.mode = chosen->mode;
    if (chosen->convention_opt && chosen->convention_opt->count() > 0)
      config.convention = chosen->convention;
    if (chosen->sampling_opt && chosen->sampling_opt->count() > 0)
      config.sampling = chosen->sampling;
    if (chosen->seed_opt->count() > 0) config.seed = chosen->seed;
    if (chosen->natural_opt->count() > 0) config.natural_units = chosen->natural;
    if (chosen->output_opt->count() > 0) config.output_path = chosen->output;
    if (chosen->format_opt->count() > 0)
      config.format = parse_output_format(chosen->format);
    else if (config.command == "figure1" && !config_set_format)
      config.format = OutputFormat::csv;
    if (chosen->grid_opt && chosen->grid_opt->count() > 0)
      for (auto& [name, values] : parse_grid_args(chosen->grid_args))
        config.grids[name] = std::move(values);

    return run(config);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace hbarsim::cli
