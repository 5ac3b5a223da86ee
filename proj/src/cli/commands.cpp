// Copyright 2026 The steersim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "steersim/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "steersim/cli/io.hpp"
#include "steersim/error.hpp"
#include "steersim/rng.hpp"

namespace steersim::cli {

using nlohmann::json;

namespace {

// JSON has no infinities; keep them readable instead of turning into null.
json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? number_json(*v) : json(nullptr);
}

const RunConfig& require_run(const ExperimentConfig& config, const char* command) {
  if (!config.run) throw Error(ErrorCode::ConfigInvalid, std::string("field 'run': required by ") + command);
  return *config.run;
}

std::vector<double> schedule_delays(const RunConfig& run) {
  std::vector<double> out;
  for (const auto& step : run.effective_schedule()) out.push_back(step.delay);
  return out;
}

FilterProfile filter_or_open(const ExperimentConfig& config) {
  if (config.filter) return *config.filter;
  return FilterProfile::constant(config.energy_source->grid(), 1.0);
}

Prediction predict(const ExperimentConfig& config, const PhysicsModel& model, const Layout& layout,
                   std::span<const double> delays, bool coincidence) {
  if (config.base == Scheme::Energy) {
    return predict_energy_scheme(model, *config.energy_source, filter_or_open(config), layout, delays, coincidence);
  }
  return predict_polarization_scheme(model, *config.polarization_source, layout, delays);
}

void set_alice_path(Layout& layout, Scheme scheme, double path) {
  if (scheme == Scheme::Energy) {
    layout.path_s_f = path;
  } else {
    layout.path_s_ad = path;
  }
}

// Layout in which any collapse model with infinite speed applies: Alice's
// element sits at the source.
Layout collapsed_reference_layout(const Layout& layout, Scheme scheme) {
  Layout out = layout;
  set_alice_path(out, scheme, 0.0);
  out.dist_f_bd = std::min(out.dist_f_bd, out.path_s_bd);
  if (out.optical_f_bd) out.optical_f_bd = std::min(*out.optical_f_bd, out.path_s_bd);
  return out;
}

json base_metadata(const ExperimentConfig& config, const char* command) {
  json meta;
  meta["tool_version"] = kToolVersion;
  meta["command"] = command;
  meta["scheme"] = to_string(config.scheme);
  meta["config"] = config.raw;
  meta["config_hash"] = config_hash(config.raw);
  return meta;
}

json snr_json(const SignalToNoise& snr) {
  return {{"signal", snr.signal}, {"noise", snr.noise}, {"ratio", number_json(snr.ratio)}};
}

}  // namespace

void cmd_predict(const ExperimentConfig& config, const CommandOptions& options) {
  if (config.delays.empty()) throw Error(ErrorCode::ConfigInvalid, "field 'delays': required by predict");
  const auto prediction = predict(config, config.model, config.layout, config.delays, config.coincidence_channel());

  OutputSet out(options.out_dir);
  write_pattern_csv(out.open("singles.csv"), prediction.singles_bob);
  if (prediction.coincidence) write_pattern_csv(out.open("coincidence.csv"), *prediction.coincidence);
  if (prediction.branch_patterns) {
    write_pattern_csv(out.open("branch_transmitted.csv"), prediction.branch_patterns->transmitted);
    write_pattern_csv(out.open("branch_absorbed.csv"), prediction.branch_patterns->absorbed);
  }

  json meta = base_metadata(config, "predict");
  meta["ordering"] = {{"scheme", to_string(prediction.ordering.scheme)},
                      {"verdict", to_string(prediction.ordering.verdict)}};
  meta["collapse_applies"] = prediction.collapse_applies;
  meta["transmit_probability"] = optional_json(prediction.transmit_probability);
  meta["visibility"] = optional_json(prediction.visibility);
  meta["files"] = out.names();
  out.write_json("predict.json", meta);
  out.commit();
}

void cmd_simulate(const ExperimentConfig& config, const CommandOptions& options) {
  const auto& run = require_run(config, "simulate");
  const auto log = simulate(config.simulation_setup(), run, SimulationOptions{options.threads, 0});
  const auto schedule = run.effective_schedule();

  OutputSet out(options.out_dir);
  const EventLogHeader header{config_hash(config.raw), run.seed, to_string(config.scheme)};
  write_event_log(out.open("events.log"), log, header, options.diagnostic);

  json meta = base_metadata(config, "simulate");
  meta["seed"] = run.seed;
  meta["records"] = log.records.size();
  meta["diagnostic"] = options.diagnostic;

  const auto singles = bin_pattern(log, schedule);
  write_pattern_csv(out.open("pattern_singles.csv"), singles.pattern);
  meta["singles_counts"] = singles.counts;

  if (config.coincidence_channel()) {
    const auto pairs = coincidence_pairs(log, run.coincidence_window, run.coincidence_mode,
                                         arrival_offset(config.simulation_setup()));
    const auto coinc = bin_pattern(pairs, schedule);
    write_pattern_csv(out.open("pattern_coincidence.csv"), coinc.pattern);
    meta["coincidence_counts"] = coinc.counts;
  }
  if (config.heralded()) {
    const auto gated = herald_gate(log, run.herald_gate_width);
    const auto gated_pattern = bin_pattern(gated, schedule);
    write_pattern_csv(out.open("pattern_singles_gated.csv"), gated_pattern.pattern);
    meta["singles_gated_counts"] = gated_pattern.counts;
    const auto ungated_snr = bob_signal_to_noise(log);
    const auto gated_snr = bob_signal_to_noise(gated);
    meta["snr"] = {{"ungated", snr_json(ungated_snr)},
                   {"gated", snr_json(gated_snr)},
                   {"gated_over_ungated", number_json(gated_snr.ratio / ungated_snr.ratio)}};
  }
  meta["files"] = out.names();
  out.write_json("simulate.json", meta);
  out.commit();
}

ScanRun run_scan(const ExperimentConfig& config, unsigned threads) {
  const auto& run = require_run(config, "scan");
  const auto& paths = config.analysis.scan_paths;
  if (paths.empty()) throw Error(ErrorCode::ConfigInvalid, "field 'analysis.scan': empty scan grid");
  const auto delays = schedule_delays(run);

  ScanRun out;
  const auto unitary = predict(config, PhysicsModel::unitary(), config.layout, delays, false);
  out.reference_unitary = expected_rate(unitary.singles_bob, run);
  const auto forced = PhysicsModel::collapse(kInfiniteSpeed, 0.0, config.analysis.reference_weighting,
                                             config.analysis.reference_gamma);
  const auto collapsed = predict(config, forced, collapsed_reference_layout(config.layout, config.base), delays, false);
  out.reference_collapsed = expected_rate(collapsed.singles_bob, run);

  const auto schedule = run.effective_schedule();
  std::vector<ScanInput> inputs;
  inputs.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto setup = config.simulation_setup();
    set_alice_path(setup.layout, config.base, paths[i]);
    RunConfig point_run = run;
    point_run.seed = derive_seed(run.seed, i);
    const auto log = simulate(setup, point_run, SimulationOptions{threads, 0});
    inputs.push_back({paths[i], bin_pattern(log, schedule).pattern});
  }
  out.result = threshold_scan(inputs, out.reference_unitary, out.reference_collapsed, config.analysis.alpha,
                              config.layout);
  return out;
}

json scan_to_json(const ThresholdScanResult& result) {
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"alice_path_m", p.alice_path},
                      {"decision", to_string(p.decision)},
                      {"p_value", p.p_value},
                      {"p_unitary", p.p_unitary},
                      {"p_collapsed", p.p_collapsed},
                      {"log_likelihood_ratio", p.log_likelihood_ratio}});
  }
  return {{"points", points},
          {"verdict", to_string(result.verdict)},
          {"threshold_estimate_m", optional_json(result.threshold_estimate)},
          {"threshold_half_width_m", optional_json(result.threshold_half_width)},
          {"threshold_lower_m", optional_json(result.threshold_lower)},
          {"tau_s", optional_json(result.tau)},
          {"kappa_lower_bound_m_s", result.kappa_unbounded ? json("inf") : optional_json(result.kappa_lower_bound)},
          {"message", result.message}};
}

void cmd_scan(const ExperimentConfig& config, const CommandOptions& options) {
  const auto scan = run_scan(config, options.threads);
  OutputSet out(options.out_dir);
  json meta = base_metadata(config, "scan");
  meta["result"] = scan_to_json(scan.result);
  meta["alpha"] = config.analysis.alpha;
  out.write_json("scan.json", meta);
  out.commit();
}

void cmd_power(const ExperimentConfig& config, const CommandOptions& options) {
  auto delays = config.delays;
  if (delays.empty() && config.run) delays = schedule_delays(*config.run);
  if (delays.empty()) throw Error(ErrorCode::ConfigInvalid, "field 'delays': required by power");

  PhysicsModel alternative = config.model;
  if (alternative.kind == ModelKind::UnitaryQM) {
    alternative = PhysicsModel::collapse(kInfiniteSpeed, config.layout.alice_path(config.base),
                                         config.analysis.reference_weighting, config.analysis.reference_gamma);
  }
  const auto unitary = predict(config, PhysicsModel::unitary(), config.layout, delays, false);
  const auto collapsed = predict(config, alternative, config.layout, delays, false);
  const auto n = required_samples(unitary.singles_bob, collapsed.singles_bob, config.analysis.alpha,
                                  config.analysis.power);

  json meta = base_metadata(config, "power");
  meta["alpha"] = config.analysis.alpha;
  meta["power"] = config.analysis.power;
  meta["delays_s"] = delays;
  meta["differences"] = n.differences;
  meta["collapse_applies"] = collapsed.collapse_applies;
  meta["dof"] = n.dof;
  meta["critical_value"] = n.critical_value;
  if (!n.attainable) {
    meta["required_events_per_delay"] = "unattainable";
    meta["implied_duration_s"] = nullptr;
  } else {
    meta["required_events_per_delay"] = n.events_per_delay;
    meta["required_events_per_delay_ceil"] = n.events_per_delay_ceil;
    meta["noncentrality_per_event"] = n.noncentrality_per_event;
    if (config.run && config.run->mean_pair_rate() > 0.0) {
      const double detected_rate = config.run->mean_pair_rate() * config.run->detector_efficiency_b;
      meta["implied_duration_s"] = n.events_per_delay * static_cast<double>(delays.size()) / detected_rate;
    } else {
      meta["implied_duration_s"] = nullptr;
    }
  }
  OutputSet out(options.out_dir);
  out.write_json("power.json", meta);
  out.commit();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for classical-channel-free steering experiments with entangled photon pairs", "steersim"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool diagnostic = false;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Override run.seed");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--diagnostic", diagnostic, "Export the non-observable hidden_branch column");

  auto* predict_cmd = app.add_subcommand("predict", "Analytic patterns");
  auto* simulate_cmd = app.add_subcommand("simulate", "Event-level Monte Carlo");
  auto* scan_cmd = app.add_subcommand("scan", "Threshold scan over Alice's path length");
  auto* power_cmd = app.add_subcommand("power", "Sample-size planning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto document = read_config_document(config_path);
    if (seed && document.is_object() && document.contains("run") && document["run"].is_object()) {
      document["run"]["seed"] = *seed;
    }
    const auto config = parse_config(document);
    const CommandOptions options{out_dir, threads, diagnostic};
    if (predict_cmd->parsed()) cmd_predict(config, options);
    if (simulate_cmd->parsed()) cmd_simulate(config, options);
    if (scan_cmd->parsed()) cmd_scan(config, options);
    if (power_cmd->parsed()) cmd_power(config, options);
  } catch (const Error& e) {
    err << "steersim: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigInvalid ? kExitConfig : kExitPhysics;
  } catch (const std::exception& e) {
    err << "steersim: " << e.what() << '\n';
    return kExitPhysics;
  }
  return kExitOk;
}

}  // namespace steersim::cli
