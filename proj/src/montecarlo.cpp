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

#include "steersim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "steersim/error.hpp"
#include "steersim/rng.hpp"

namespace steersim {

namespace {

void config_check(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

void RunConfig::validate(bool coincidence_on) const {
  config_check(pair_rate >= 0.0 && std::isfinite(pair_rate), "pair_rate must be >= 0");
  config_check(pairs_per_pulse >= 0.0 && std::isfinite(pairs_per_pulse), "pairs_per_pulse must be >= 0");
  config_check(pulse_rate >= 0.0 && std::isfinite(pulse_rate), "pulse_rate must be >= 0");
  if (mode == RunMode::Pulsed) config_check(pulse_rate > 0.0, "pulsed mode needs pulse_rate > 0");
  config_check(is_probability(detector_efficiency_a), "detector_efficiency_a must lie in [0, 1]");
  config_check(is_probability(detector_efficiency_b), "detector_efficiency_b must lie in [0, 1]");
  config_check(dark_rate_a >= 0.0 && dark_rate_b >= 0.0, "dark rates must be >= 0");
  config_check(timing_jitter_sigma >= 0.0, "timing_jitter_sigma must be >= 0");
  config_check(coincidence_window >= 0.0, "coincidence_window must be >= 0");
  config_check(herald_gate_width >= 0.0, "herald_gate_width must be >= 0");
  if (coincidence_on) config_check(coincidence_window > 0.0, "coincidence mode needs coincidence_window > 0");
  for (std::size_t i = 0; i < delay_schedule.size(); ++i) {
    config_check(delay_schedule[i].dwell > 0.0, "dwell times must be > 0");
    config_check(std::isfinite(delay_schedule[i].delay), "delays must be finite");
    if (i > 0) config_check(delay_schedule[i].delay > delay_schedule[i - 1].delay, "delays must be strictly increasing");
  }
  if (delay_schedule.empty()) {
    config_check(duration > 0.0 && std::isfinite(duration), "duration must be > 0 when no delay schedule is given");
  } else if (duration > 0.0) {
    double sum = 0.0;
    for (const auto& step : delay_schedule) sum += step.dwell;
    config_check(std::fabs(sum - duration) <= 1e-12 * sum, "duration disagrees with the sum of dwell times");
  }
}

std::vector<DelayStep> RunConfig::effective_schedule() const {
  if (!delay_schedule.empty()) return delay_schedule;
  return {DelayStep{0.0, duration}};
}

double RunConfig::total_duration() const {
  if (delay_schedule.empty()) return duration;
  double sum = 0.0;
  for (const auto& step : delay_schedule) sum += step.dwell;
  return sum;
}

double RunConfig::mean_pair_rate() const noexcept {
  return mode == RunMode::Cw ? pair_rate : pairs_per_pulse * pulse_rate;
}

std::vector<DelayStep> uniform_schedule(std::span<const double> delays, double dwell) {
  std::vector<DelayStep> out;
  out.reserve(delays.size());
  for (double d : delays) out.push_back({d, dwell});
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace {

class Timeline {
 public:
  explicit Timeline(std::vector<DelayStep> steps) : steps_(std::move(steps)) {
    double t = 0.0;
    for (const auto& s : steps_) {
      starts_.push_back(t);
      t += s.dwell;
    }
    end_ = t;
  }

  double end() const noexcept { return end_; }
  std::size_t size() const noexcept { return steps_.size(); }
  double delay(std::size_t i) const noexcept { return steps_[i].delay; }

  // Index of the step active at time t (clamped to the last step).
  std::size_t step_at(double t) const noexcept {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    return it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin() - 1);
  }

 private:
  std::vector<DelayStep> steps_;
  std::vector<double> starts_;
  double end_ = 0.0;
};

struct Emission {
  double time;
};

// Everything a worker needs, resolved once.
struct EventContext {
  const SimulationSetup* setup;
  const RunConfig* run;
  const Timeline* timeline;
  bool collapse;
  double bob_flight;
  double alice_flight;
  double transmit_probability = 1.0;  // energy scheme
  double polarization_visibility = 0.0;
};

void push_if_inside(std::vector<EventRecord>& out, const EventRecord& r, double end) {
  if (r.timestamp >= 0.0 && r.timestamp <= end) out.push_back(r);
}

void simulate_pair(const EventContext& ctx, std::int64_t pair_id, double emission, std::vector<EventRecord>& out) {
  const auto& setup = *ctx.setup;
  const auto& run = *ctx.run;
  RandomStream rng(run.seed, stream_id(StreamDomain::Pair, static_cast<std::uint64_t>(pair_id)));

  const double arrival_b = emission + ctx.bob_flight;
  const double delay = ctx.timeline->delay(ctx.timeline->step_at(arrival_b));

  bool alice_clicks_possible = false;  // photon reaches Alice's detector
  Outcome alice_outcome = Outcome::AliceTransmitted;
  HiddenBranch hidden = HiddenBranch::None;
  double p_plus = 0.5;

  if (setup.scheme == Scheme::Energy) {
    const auto& src = *setup.energy_source;
    const bool equal_split = ctx.collapse && setup.model.weighting == Weighting::Equal && setup.filter &&
                             ctx.transmit_probability > 0.0 && ctx.transmit_probability < 1.0;
    PairSample pair;
    bool transmitted;
    if (equal_split) {
      transmitted = rng.bernoulli(0.5);
      pair = sample_pair_in_branch(src, *setup.filter, transmitted ? Branch::Transmitted : Branch::Absorbed, rng);
    } else {
      pair = sample_pair(src, rng);
      const double t = setup.filter ? setup.filter->transmission_at(pair.omega_a) : 1.0;
      transmitted = rng.bernoulli(t);
    }
    if (ctx.collapse) hidden = transmitted ? HiddenBranch::Transmitted : HiddenBranch::Absorbed;
    alice_clicks_possible = transmitted;
    alice_outcome = Outcome::AliceTransmitted;
    p_plus = 0.5 * (1.0 + std::cos(pair.omega_b * delay));
  } else {
    // Alice's PBS: one polarization is absorbed by her detector, the other
    // propagates freely.
    const bool absorbed_at_ad = rng.bernoulli(0.5);
    if (ctx.collapse) hidden = absorbed_at_ad ? HiddenBranch::Absorbed : HiddenBranch::Transmitted;
    alice_clicks_possible = absorbed_at_ad;
    alice_outcome = Outcome::AliceAbsorbed;
    p_plus = 0.5 * (1.0 + ctx.polarization_visibility * std::cos(setup.polarization_source->center_frequency * delay));
  }

  // Fixed draw order per pair keeps streams aligned across configurations.
  const bool alice_detected = rng.bernoulli(run.detector_efficiency_a);
  const double alice_jitter = rng.normal() * run.timing_jitter_sigma;
  const bool plus_port = rng.bernoulli(p_plus);
  const bool bob_detected = rng.bernoulli(run.detector_efficiency_b);
  const double bob_jitter = rng.normal() * run.timing_jitter_sigma;

  if (alice_clicks_possible && alice_detected) {
    push_if_inside(out, {pair_id, Wing::A, emission + ctx.alice_flight + alice_jitter, alice_outcome, hidden},
                   ctx.timeline->end());
  }
  if (bob_detected) {
    push_if_inside(out,
                   {pair_id, Wing::B, arrival_b + bob_jitter, plus_port ? Outcome::PortPlus : Outcome::PortMinus,
                    hidden},
                   ctx.timeline->end());
  }
}

void poisson_process(double rate, double end, StreamDomain domain, const RunConfig& run, Wing wing, Outcome outcome,
                     std::vector<EventRecord>& out) {
  if (!(rate > 0.0)) return;
  RandomStream rng(run.seed, stream_id(domain, 0));
  for (double t = rng.exponential(rate); t <= end; t += rng.exponential(rate)) {
    out.push_back({kNoPair, wing, t, outcome, HiddenBranch::None});
  }
}

bool record_less(const EventRecord& a, const EventRecord& b) noexcept {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (a.wing != b.wing) return a.wing < b.wing;
  if (a.outcome != b.outcome) return a.outcome < b.outcome;
  if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
  return a.hidden_branch < b.hidden_branch;
}

}  // namespace

EventLog simulate(const SimulationSetup& setup, const RunConfig& run, SimulationOptions options) {
  run.validate();
  setup.model.validate();
  setup.layout.validate();
  if (setup.scheme == Scheme::Energy && !setup.energy_source) {
    throw Error(ErrorCode::IncompatibleScheme, "energy scheme needs an energy-entangled source");
  }
  if (setup.scheme == Scheme::Polarization && !setup.polarization_source) {
    throw Error(ErrorCode::IncompatibleScheme, "polarization scheme needs a polarization-entangled source");
  }
  if (setup.scheme == Scheme::Polarization && setup.filter) {
    throw Error(ErrorCode::IncompatibleScheme, "the polarization scheme has no spectral filter");
  }
  if (setup.filter && !(setup.filter->grid() == setup.energy_source->grid())) {
    throw Error(ErrorCode::GridMismatch, "filter must be sampled on the source grid");
  }
  if (setup.polarization_source) setup.polarization_source->validate();

  const Timeline timeline(run.effective_schedule());
  const double end = timeline.end();

  EventContext ctx{&setup, &run, &timeline, setup.model.collapse_applies(setup.layout, setup.scheme),
                   setup.layout.path_s_bd / setup.layout.light_speed,
                   setup.layout.alice_detector_path(setup.scheme) / setup.layout.light_speed};
  if (setup.scheme == Scheme::Energy && setup.filter) {
    ctx.transmit_probability = transmit_probability(marginal_spectrum(*setup.energy_source, Wing::A), *setup.filter);
  }
  if (setup.scheme == Scheme::Polarization) {
    ctx.polarization_visibility =
        bob_polarization_state(setup.model, *setup.polarization_source, ctx.collapse).visibility();
  }

  // Emissions and heralds, from one sequential stream.
  std::vector<Emission> emissions;
  std::vector<EventRecord> fixed;
  {
    RandomStream rng(run.seed, stream_id(StreamDomain::Emission, 0));
    if (run.mode == RunMode::Cw) {
      if (run.pair_rate > 0.0) {
        for (double t = rng.exponential(run.pair_rate); t <= end; t += rng.exponential(run.pair_rate)) {
          emissions.push_back({t});
        }
      }
    } else {
      const double period = 1.0 / run.pulse_rate;
      for (std::uint64_t j = 0;; ++j) {
        const double t = static_cast<double>(j) * period;
        if (t > end) break;
        const auto n = rng.poisson(run.pairs_per_pulse);
        for (std::uint64_t k = 0; k < n; ++k) emissions.push_back({t});
        const double herald = t + ctx.bob_flight;
        if (herald <= end) fixed.push_back({kNoPair, Wing::B, herald, Outcome::Herald, HiddenBranch::None});
      }
    }
  }

  const Outcome alice_dark = setup.scheme == Scheme::Energy ? Outcome::AliceTransmitted : Outcome::AliceAbsorbed;
  poisson_process(run.dark_rate_a, end, StreamDomain::DarkA, run, Wing::A, alice_dark, fixed);
  poisson_process(run.dark_rate_b, end, StreamDomain::DarkBPlus, run, Wing::B, Outcome::PortPlus, fixed);
  poisson_process(run.dark_rate_b, end, StreamDomain::DarkBMinus, run, Wing::B, Outcome::PortMinus, fixed);

  // Pair batches.
  const unsigned threads = std::max(1u, options.threads);
  const std::size_t n_pairs = emissions.size();
  std::size_t n_batches = options.batches ? options.batches : threads;
  n_batches = std::max<std::size_t>(1, std::min(n_batches, std::max<std::size_t>(n_pairs, 1)));
  std::vector<std::vector<EventRecord>> batch_out(n_batches);
  auto run_batch = [&](std::size_t b) {
    const std::size_t lo = n_pairs * b / n_batches;
    const std::size_t hi = n_pairs * (b + 1) / n_batches;
    auto& out = batch_out[b];
    out.reserve(2 * (hi - lo));
    for (std::size_t i = lo; i < hi; ++i) simulate_pair(ctx, static_cast<std::int64_t>(i), emissions[i].time, out);
  };
  if (threads == 1 || n_batches == 1) {
    for (std::size_t b = 0; b < n_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, n_batches); ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_batches; b = next++) run_batch(b);
      });
    }
  }

  EventLog log;
  log.config_echo = run;
  log.model_echo = setup.model;
  log.scheme = setup.scheme;
  std::size_t total = fixed.size();
  for (const auto& b : batch_out) total += b.size();
  log.records.reserve(total);
  for (auto& b : batch_out) log.records.insert(log.records.end(), b.begin(), b.end());
  log.records.insert(log.records.end(), fixed.begin(), fixed.end());
  std::sort(log.records.begin(), log.records.end(), record_less);
  return log;
}

// ---------------------------------------------------------------------------
// Coincidences, heralding, binning
// ---------------------------------------------------------------------------

double arrival_offset(const SimulationSetup& setup) {
  const auto& l = setup.layout;
  return (l.alice_detector_path(setup.scheme) - l.path_s_bd) / l.light_speed;
}

std::vector<CoincidencePair> coincidence_pairs(const EventLog& log, double window, CoincidenceMode mode,
                                               double alice_offset) {
  std::vector<const EventRecord*> alice;
  std::vector<const EventRecord*> bob;
  for (const auto& r : log.records) {
    if (r.is_alice_detection()) alice.push_back(&r);
    if (r.is_bob_detection()) bob.push_back(&r);
  }
  std::vector<CoincidencePair> pairs;
  if (!(window > 0.0) || alice.empty()) return pairs;
  const double half = 0.5 * window;
  std::vector<bool> used(alice.size(), false);
  std::size_t first = 0;
  for (const EventRecord* b : bob) {
    const double center = b->timestamp + alice_offset;
    while (first < alice.size() && alice[first]->timestamp < center - half) ++first;
    if (mode == CoincidenceMode::AllPairs) {
      for (std::size_t i = first; i < alice.size() && alice[i]->timestamp <= center + half; ++i) {
        pairs.emplace_back(*alice[i], *b);
      }
      continue;
    }
    std::size_t best = alice.size();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < alice.size() && alice[i]->timestamp <= center + half; ++i) {
      if (used[i]) continue;
      const double gap = std::fabs(alice[i]->timestamp - center);
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < alice.size()) {
      used[best] = true;
      pairs.emplace_back(*alice[best], *b);
    }
  }
  return pairs;
}

EventLog herald_gate(const EventLog& log, double gate_width) {
  std::vector<double> heralds;
  for (const auto& r : log.records) {
    if (r.outcome == Outcome::Herald) heralds.push_back(r.timestamp);
  }
  if (heralds.empty()) throw Error(ErrorCode::NoHeralds, "log contains no herald records");
  const double half = 0.5 * gate_width;
  EventLog out;
  out.config_echo = log.config_echo;
  out.model_echo = log.model_echo;
  out.scheme = log.scheme;
  for (const auto& r : log.records) {
    if (!r.is_bob_detection()) {
      out.records.push_back(r);
      continue;
    }
    const auto it = std::lower_bound(heralds.begin(), heralds.end(), r.timestamp);
    double gap = std::numeric_limits<double>::infinity();
    if (it != heralds.end()) gap = *it - r.timestamp;
    if (it != heralds.begin()) gap = std::min(gap, r.timestamp - *(it - 1));
    if (gap < half) out.records.push_back(r);
  }
  return out;
}

namespace {

BinnedPattern finish_bins(std::vector<std::uint64_t> counts, std::span<const DelayStep> schedule) {
  BinnedPattern out;
  out.counts = std::move(counts);
  out.empty_bins.resize(schedule.size());
  auto& p = out.pattern;
  p.delays.resize(schedule.size());
  p.values.resize(schedule.size());
  p.errors.resize(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double n = static_cast<double>(out.counts[i]);
    p.delays[i] = schedule[i].delay;
    p.values[i] = n / schedule[i].dwell;
    p.errors[i] = std::sqrt(n) / schedule[i].dwell;
    out.empty_bins[i] = out.counts[i] == 0;
  }
  p.validate();
  return out;
}

std::vector<DelayStep> checked_schedule(std::span<const DelayStep> schedule) {
  if (schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty delay schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i].dwell > 0.0)) throw Error(ErrorCode::InvalidArgument, "dwell times must be > 0");
  }
  return {schedule.begin(), schedule.end()};
}

}  // namespace

BinnedPattern bin_pattern(const EventLog& log, std::span<const DelayStep> schedule) {
  const Timeline timeline(checked_schedule(schedule));
  std::vector<std::uint64_t> counts(schedule.size(), 0);
  for (const auto& r : log.records) {
    if (r.is_bob_detection() && r.outcome == Outcome::PortPlus && r.timestamp <= timeline.end()) {
      ++counts[timeline.step_at(r.timestamp)];
    }
  }
  return finish_bins(std::move(counts), schedule);
}

BinnedPattern bin_pattern(std::span<const CoincidencePair> pairs, std::span<const DelayStep> schedule) {
  const Timeline timeline(checked_schedule(schedule));
  std::vector<std::uint64_t> counts(schedule.size(), 0);
  for (const auto& [a, b] : pairs) {
    if (b.outcome == Outcome::PortPlus && b.timestamp <= timeline.end()) ++counts[timeline.step_at(b.timestamp)];
  }
  return finish_bins(std::move(counts), schedule);
}

SignalToNoise bob_signal_to_noise(const EventLog& log) {
  SignalToNoise out;
  for (const auto& r : log.records) {
    if (!r.is_bob_detection()) continue;
    if (r.pair_id == kNoPair) {
      ++out.noise;
    } else {
      ++out.signal;
    }
  }
  out.ratio = out.noise == 0 ? std::numeric_limits<double>::infinity()
                             : static_cast<double>(out.signal) / static_cast<double>(out.noise);
  return out;
}

InterferencePattern expected_rate(const InterferencePattern& probability, const RunConfig& run) {
  InterferencePattern out = probability;
  const double scale = run.mean_pair_rate() * run.detector_efficiency_b;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = scale * probability.values[i] + run.dark_rate_b;
    out.errors[i] = scale * probability.errors[i];
  }
  return out;
}

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::PortPlus: return "detected_port_plus";
    case Outcome::PortMinus: return "detected_port_minus";
    case Outcome::AliceTransmitted: return "alice_transmitted";
    case Outcome::AliceAbsorbed: return "alice_absorbed";
    case Outcome::Herald: return "herald";
  }
  return "unknown";
}

const char* to_string(HiddenBranch branch) noexcept {
  switch (branch) {
    case HiddenBranch::None: return "none";
    case HiddenBranch::Transmitted: return "transmitted";
    case HiddenBranch::Absorbed: return "absorbed";
  }
  return "unknown";
}

}  // namespace steersim
