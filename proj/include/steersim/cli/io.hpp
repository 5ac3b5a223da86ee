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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "steersim/montecarlo.hpp"
#include "steersim/spectra.hpp"

namespace steersim::cli {

inline constexpr int kEventLogSchemaVersion = 1;
inline constexpr std::string_view kDiagnosticMarker = "NON-OBSERVABLE DIAGNOSTIC";

// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_number(double value);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string config_hash(const nlohmann::json& config);

void write_pattern_csv(std::ostream& os, const InterferencePattern& pattern);

struct EventLogHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string scheme;
};

// Line-delimited records with '#' header lines. hidden_branch is written
// only when `diagnostic` is set, and then the header says so.
void write_event_log(std::ostream& os, const EventLog& log, const EventLogHeader& header, bool diagnostic);

// Collects output files and commits them together: each file is written to
// a temporary name and renamed on commit(); anything left uncommitted is
// removed on destruction.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet();

  // Opens <dir>/<name> for writing (temporarily under a .partial name).
  std::ostream& open(const std::string& name);
  void write_text(const std::string& name, std::string_view text);
  void write_json(const std::string& name, const nlohmann::json& value);
  void commit();
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  struct Pending;
  std::filesystem::path dir_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<Pending>> pending_;
  bool committed_ = false;
};

}  // namespace steersim::cli
