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

#include "steersim/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "steersim/error.hpp"

namespace steersim::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, "field '" + path + "': " + what);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

// One JSON object of the schema. Tracks which keys were read so that
// finish() can reject the rest.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) missing(key);
    return node_.at(key);
  }

  // Names a close misspelling of `key`, if the object has one.
  [[noreturn]] void missing(const std::string& key) const {
    for (const auto& [present, value] : node_.items()) {
      if (!seen_.contains(present) && edit_distance(present, key) <= 2) {
        fail(key_path(present), "unknown key (did you mean '" + key + "'?)");
      }
    }
    fail(key_path(key), "required field is missing");
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) fail(key_path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key_path(key), "expected a finite number");
    return x;
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned()) fail(key_path(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) fail(key_path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) fail(key_path(key), "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  template <typename T>
  T choice(const std::string& key, std::initializer_list<std::pair<const char*, T>> options,
           std::optional<T> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    const std::string value = string(key);
    std::string allowed;
    for (const auto& [name, v] : options) {
      if (value == name) return v;
      allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    fail(key_path(key), "unknown value '" + value + "' (expected one of: " + allowed + ")");
  }

  std::vector<double> number_list(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) fail(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key_path(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Section child(const std::string& key) { return Section(at(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) fail(key_path(key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_increasing(const std::vector<double>& values, const std::string& path) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) fail(path, "values must be strictly increasing");
  }
}

std::vector<double> parse_delays(Section& root) {
  const bool listed = root.has("delays_s");
  const bool ranged = root.has("delays");
  if (listed && ranged) fail("delays", "give either 'delays' or 'delays_s', not both");
  std::vector<double> delays;
  if (listed) {
    delays = root.number_list("delays_s");
    require_increasing(delays, "delays_s");
  } else if (ranged) {
    Section s = root.child("delays");
    const double start = s.number("start_s");
    const double stop = s.number("stop_s");
    const auto count = s.unsigned_integer("count");
    s.finish();
    if (count < 1) fail("delays.count", "must be >= 1");
    if (count > 1 && !(stop > start)) fail("delays.stop_s", "must exceed start_s");
    delays = linspace(start, stop, count);
  }
  return delays;
}

FrequencyGrid parse_grid(Section& root) {
  Section s = root.child("grid");
  const double lo = s.number("omega_min_rad_s");
  const double hi = s.number("omega_max_rad_s");
  const auto n = s.unsigned_integer("n_points");
  const auto feature = s.optional_number("min_feature_width_rad_s");
  s.finish();
  try {
    return FrequencyGrid(lo, hi, n, feature);
  } catch (const Error& e) {
    fail("grid", e.what());
  }
}

FilterProfile parse_filter(Section& root, const FrequencyGrid& grid) {
  Section s = root.child("filter");
  const auto kind = s.string("kind");
  try {
    if (kind == "gaussian") {
      const double center = s.number("center_rad_s");
      const double sigma = s.number("sigma_rad_s");
      const double peak = s.number_or("peak", 1.0);
      s.finish();
      return FilterProfile::gaussian_bandpass(grid, center, sigma, peak);
    }
    if (kind == "rectangular") {
      const double low = s.number("low_rad_s");
      const double high = s.number("high_rad_s");
      s.finish();
      return FilterProfile::rectangular(grid, low, high);
    }
    if (kind == "constant") {
      const double t = s.number("transmission");
      s.finish();
      return FilterProfile::constant(grid, t);
    }
    if (kind == "step") {
      const double edge = s.number("edge_rad_s");
      const bool above = s.boolean_or("pass_above", true);
      s.finish();
      return FilterProfile::step(grid, edge, above);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    fail("filter", e.what());
  }
  fail("filter.kind", "unknown value '" + kind + "' (expected one of: gaussian, rectangular, constant, step)");
}

Layout parse_layout(Section& root, Scheme base) {
  Section s = root.child("layout");
  Layout layout;
  layout.path_s_f = s.optional_number("path_s_f_m");
  layout.path_s_ad = s.optional_number("path_s_ad_m");
  layout.path_s_bd = s.number("path_s_bd_m");
  layout.dist_f_bd = s.number("dist_f_bd_m");
  layout.optical_f_bd = s.optional_number("optical_f_bd_m");
  layout.light_speed = s.number_or("light_speed_m_s", layout.light_speed);
  layout.transit = s.choice<TransitDistance>(
      "collapse_transit", {{"spatial", TransitDistance::Spatial}, {"optical", TransitDistance::Optical}},
      TransitDistance::Spatial);
  s.finish();
  if (base == Scheme::Energy && !layout.path_s_f) fail("layout.path_s_f_m", "required for the energy schemes");
  if (base == Scheme::Polarization && !layout.path_s_ad) {
    fail("layout.path_s_ad_m", "required for the polarization scheme");
  }
  try {
    layout.validate();
  } catch (const Error& e) {
    fail("layout", e.what());
  }
  return layout;
}

double parse_speed(Section& s, const std::string& key) {
  if (!s.has(key)) return kInfiniteSpeed;
  const auto& v = s.at(key);
  if (v.is_string()) {
    const auto text = v.get<std::string>();
    if (text == "inf" || text == "infinity") return kInfiniteSpeed;
    fail(s.key_path(key), "expected a number or \"inf\"");
  }
  return s.number(key);
}

PhysicsModel parse_model(Section& root, std::optional<double> source_gamma) {
  if (!root.has("model")) return PhysicsModel::unitary();
  Section s = root.child("model");
  PhysicsModel model;
  model.kind = s.choice<ModelKind>(
      "kind", {{"unitary_qm", ModelKind::UnitaryQM}, {"finite_speed_collapse", ModelKind::FiniteSpeedCollapse}});
  if (model.kind == ModelKind::FiniteSpeedCollapse) {
    model.kappa_model = parse_speed(s, "kappa_model_m_s");
    model.d_tau = s.number("d_tau_m");
    model.weighting = s.choice<Weighting>(
        "weighting", {{"equal", Weighting::Equal}, {"probability", Weighting::Probability}}, Weighting::Equal);
    const auto gamma = s.optional_number("pre_collapse_gamma");
    if (gamma && source_gamma && *gamma != *source_gamma) {
      fail("model.pre_collapse_gamma", "disagrees with source.coherence_gamma");
    }
    model.pre_collapse_gamma = gamma ? *gamma : source_gamma.value_or(1.0);
  }
  s.finish();
  try {
    model.validate();
  } catch (const Error& e) {
    fail("model", e.what());
  }
  return model;
}

RunConfig parse_run(Section& root, const std::vector<double>& delays) {
  Section s = root.child("run");
  RunConfig run;
  run.mode = s.choice<RunMode>("mode", {{"cw", RunMode::Cw}, {"pulsed", RunMode::Pulsed}}, RunMode::Cw);
  if (run.mode == RunMode::Cw) {
    run.pair_rate = s.number("pair_rate_hz");
  } else {
    run.pairs_per_pulse = s.number("pairs_per_pulse");
    run.pulse_rate = s.number("pulse_rate_hz");
  }
  run.duration = s.number_or("duration_s", 0.0);
  run.detector_efficiency_a = s.number_or("detector_efficiency_a", 1.0);
  run.detector_efficiency_b = s.number_or("detector_efficiency_b", 1.0);
  run.dark_rate_a = s.number_or("dark_rate_a_hz", 0.0);
  run.dark_rate_b = s.number_or("dark_rate_b_hz", 0.0);
  run.timing_jitter_sigma = s.number_or("timing_jitter_sigma_s", 0.0);
  run.coincidence_window = s.number_or("coincidence_window_s", 0.0);
  run.herald_gate_width = s.number_or("herald_gate_width_s", 0.0);
  run.seed = s.has("seed") ? s.unsigned_integer("seed") : 0;
  run.coincidence_mode = s.choice<CoincidenceMode>(
      "coincidence_mode",
      {{"greedy_nearest", CoincidenceMode::GreedyNearest}, {"all_pairs", CoincidenceMode::AllPairs}},
      CoincidenceMode::GreedyNearest);
  const bool explicit_schedule = s.has("delay_schedule");
  const bool dwell = s.has("dwell_s");
  if (explicit_schedule && dwell) fail("run.dwell_s", "give either 'dwell_s' or 'delay_schedule', not both");
  if (explicit_schedule) {
    const auto& list = s.at("delay_schedule");
    if (!list.is_array()) fail("run.delay_schedule", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section step(list[i], "run.delay_schedule[" + std::to_string(i) + "]");
      run.delay_schedule.push_back({step.number("delay_s"), step.number("dwell_s")});
      step.finish();
    }
  } else if (dwell) {
    if (delays.empty()) fail("run.dwell_s", "needs 'delays' or 'delays_s' at the top level");
    run.delay_schedule = uniform_schedule(delays, s.number("dwell_s"));
  }
  s.finish();
  try {
    run.validate();
  } catch (const Error& e) {
    fail("run", e.what());
  }
  return run;
}

AnalysisOptions parse_analysis(Section& root) {
  AnalysisOptions out;
  if (!root.has("analysis")) return out;
  Section s = root.child("analysis");
  out.alpha = s.number_or("alpha", out.alpha);
  out.power = s.number_or("power", out.power);
  out.reference_weighting = s.choice<Weighting>(
      "reference_weighting", {{"equal", Weighting::Equal}, {"probability", Weighting::Probability}},
      Weighting::Equal);
  out.reference_gamma = s.number_or("reference_gamma", 1.0);
  if (s.has("scan")) {
    Section scan = s.child("scan");
    if (scan.has("paths_m")) {
      out.scan_paths = scan.number_list("paths_m");
    } else {
      const double start = scan.number("start_m");
      const double stop = scan.number("stop_m");
      const double step = scan.number("step_m");
      if (!(step > 0.0) || !(stop >= start)) fail("analysis.scan", "needs step_m > 0 and stop_m >= start_m");
      const auto n = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
      for (std::size_t i = 0; i < n; ++i) out.scan_paths.push_back(start + static_cast<double>(i) * step);
    }
    scan.finish();
    require_increasing(out.scan_paths, "analysis.scan");
  }
  s.finish();
  if (!(out.alpha > 0.0 && out.alpha < 1.0)) fail("analysis.alpha", "must lie in (0, 1)");
  if (!(out.power > out.alpha && out.power < 1.0)) fail("analysis.power", "must lie in (alpha, 1)");
  if (!(out.reference_gamma >= 0.0 && out.reference_gamma <= 1.0)) {
    fail("analysis.reference_gamma", "must lie in [0, 1]");
  }
  return out;
}

}  // namespace

SimulationSetup ExperimentConfig::simulation_setup() const {
  SimulationSetup setup;
  setup.scheme = base;
  setup.model = model;
  setup.energy_source = energy_source;
  setup.filter = filter;
  setup.polarization_source = polarization_source;
  setup.layout = layout;
  return setup;
}

ExperimentConfig parse_config(const json& document) {
  ExperimentConfig cfg;
  cfg.raw = document;
  Section root(document, "");
  cfg.scheme = root.choice<ExperimentScheme>("scheme", {{"kc_coincidence", ExperimentScheme::KcCoincidence},
                                                        {"energy_singles", ExperimentScheme::EnergySingles},
                                                        {"polarization", ExperimentScheme::Polarization},
                                                        {"heralded", ExperimentScheme::Heralded}});
  switch (cfg.scheme) {
    case ExperimentScheme::KcCoincidence:
    case ExperimentScheme::EnergySingles: cfg.base = Scheme::Energy; break;
    case ExperimentScheme::Polarization: cfg.base = Scheme::Polarization; break;
    case ExperimentScheme::Heralded:
      cfg.base = root.choice<Scheme>("heralded_base",
                                     {{"energy", Scheme::Energy}, {"polarization", Scheme::Polarization}},
                                     Scheme::Energy);
      break;
  }

  std::optional<double> source_gamma;
  {
    Section src = root.child("source");
    const auto type = src.choice<Scheme>("type", {{"energy", Scheme::Energy}, {"polarization", Scheme::Polarization}});
    if (type != cfg.base) fail("source.type", "does not match the scheme");
    if (cfg.base == Scheme::Energy) {
      const auto grid = parse_grid(root);
      const double pump = src.number("pump_center_rad_s");
      const double pump_sigma = src.number_or("pump_bandwidth_sigma_rad_s", 0.0);
      const double signal = src.number_or("signal_center_rad_s", 0.5 * pump);
      const double pm_sigma = src.number("phase_matching_sigma_rad_s");
      src.finish();
      try {
        cfg.energy_source.emplace(pump, pump_sigma, signal, pm_sigma, grid);
      } catch (const Error& e) {
        fail("source", e.what());
      }
      if (root.has("filter")) cfg.filter = parse_filter(root, grid);
      if (cfg.scheme == ExperimentScheme::KcCoincidence && !cfg.filter) {
        fail("filter", "the coincidence scheme needs Alice's filter");
      }
    } else {
      PolarizationEntangledSource p;
      source_gamma = src.optional_number("coherence_gamma");
      p.center_frequency = src.number("center_frequency_rad_s");
      src.finish();
      if (root.has("filter")) fail("filter", "the polarization scheme has no spectral filter");
      if (root.has("grid")) fail("grid", "the polarization scheme has no frequency grid");
      cfg.polarization_source = p;
    }
  }

  cfg.layout = parse_layout(root, cfg.base);
  cfg.model = parse_model(root, source_gamma);
  if (cfg.polarization_source) {
    cfg.polarization_source->coherence_gamma = source_gamma.value_or(cfg.model.pre_collapse_gamma);
    try {
      cfg.polarization_source->validate();
    } catch (const Error& e) {
      fail("source", e.what());
    }
  }
  cfg.delays = parse_delays(root);
  if (root.has("run")) cfg.run = parse_run(root, cfg.delays);
  cfg.analysis = parse_analysis(root);
  root.finish();

  if (cfg.run) {
    if (cfg.heralded()) {
      if (cfg.run->mode != RunMode::Pulsed) fail("run.mode", "the heralded scheme needs mode 'pulsed'");
      if (!(cfg.run->herald_gate_width > 0.0)) fail("run.herald_gate_width_s", "must be > 0 for the heralded scheme");
    }
    if (cfg.coincidence_channel() && !(cfg.run->coincidence_window > 0.0)) {
      fail("run.coincidence_window_s", "must be > 0 for the coincidence scheme");
    }
  }
  return cfg;
}

nlohmann::json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
}

const char* to_string(ExperimentScheme scheme) noexcept {
  switch (scheme) {
    case ExperimentScheme::KcCoincidence: return "kc_coincidence";
    case ExperimentScheme::EnergySingles: return "energy_singles";
    case ExperimentScheme::Polarization: return "polarization";
    case ExperimentScheme::Heralded: return "heralded";
  }
  return "unknown";
}

}  // namespace steersim::cli
