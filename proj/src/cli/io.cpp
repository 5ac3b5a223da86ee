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

#include "steersim/cli/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "steersim/error.hpp"

namespace steersim::cli {

namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf.data(), end);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(config.dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

void write_pattern_csv(std::ostream& os, const InterferencePattern& pattern) {
  os << "delay_s,value,error\n";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double err = i < pattern.errors.size() ? pattern.errors[i] : 0.0;
    os << format_number(pattern.delays[i]) << ',' << format_number(pattern.values[i]) << ','
       << format_number(err) << '\n';
  }
}

void write_event_log(std::ostream& os, const EventLog& log, const EventLogHeader& header, bool diagnostic) {
  os << "# steersim event log\n";
  if (diagnostic) os << "# " << kDiagnosticMarker << ": hidden_branch is not an observable\n";
  os << "# schema_version: " << kEventLogSchemaVersion << '\n';
  os << "# config_hash: " << header.config_hash << '\n';
  os << "# seed: " << header.seed << '\n';
  os << "# scheme: " << header.scheme << '\n';
  os << "# records: " << log.records.size() << '\n';
  os << "# fields: pair_id,wing,timestamp_s,outcome" << (diagnostic ? ",hidden_branch" : "") << '\n';
  for (const auto& r : log.records) {
    os << r.pair_id << ',' << (r.wing == Wing::A ? 'A' : 'B') << ',' << format_number(r.timestamp) << ','
       << to_string(r.outcome);
    if (diagnostic) os << ',' << to_string(r.hidden_branch);
    os << '\n';
  }
}

struct OutputSet::Pending {
  fs::path final_path;
  fs::path temp_path;
  std::ofstream stream;
};

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::ConfigInvalid, "cannot create output directory '" + dir_.string() + "'");
}

OutputSet::~OutputSet() {
  if (committed_) return;
  for (auto& p : pending_) {
    p->stream.close();
    std::error_code ec;
    fs::remove(p->temp_path, ec);
  }
}

std::ostream& OutputSet::open(const std::string& name) {
  auto p = std::make_unique<Pending>();
  p->final_path = dir_ / name;
  p->temp_path = dir_ / (name + ".partial");
  p->stream.open(p->temp_path, std::ios::binary | std::ios::trunc);
  if (!p->stream) throw Error(ErrorCode::ConfigInvalid, "cannot write '" + p->temp_path.string() + "'");
  names_.push_back(name);
  pending_.push_back(std::move(p));
  return pending_.back()->stream;
}

void OutputSet::write_text(const std::string& name, std::string_view text) { open(name) << text; }

void OutputSet::write_json(const std::string& name, const nlohmann::json& value) {
  open(name) << value.dump(2) << '\n';
}

void OutputSet::commit() {
  for (auto& p : pending_) {
    p->stream.close();
    if (p->stream.fail()) throw Error(ErrorCode::InvalidArgument, "write failed for '" + p->temp_path.string() + "'");
  }
  for (auto& p : pending_) fs::rename(p->temp_path, p->final_path);
  committed_ = true;
}

}  // namespace steersim::cli
