#include "qdemux/event_stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "qdemux/errors.hpp"

namespace qdemux {

using nlohmann::json;

Picoseconds EventStream::duration_ps() const { return std::llround(duration_s * kPsPerSecond); }

bool EventStream::is_sorted() const { return std::is_sorted(timestamps_ps.begin(), timestamps_ps.end()); }

bool EventStream::is_strictly_increasing() const {
  return std::adjacent_find(timestamps_ps.begin(), timestamps_ps.end(),
                            [](Picoseconds a, Picoseconds b) { return b <= a; }) == timestamps_ps.end();
}

void EventStream::validate() const {
  if (!(duration_s >= 0.0)) throw ValidationError(channel_label, "duration must be non-negative");
  if (!is_strictly_increasing()) throw ValidationError(channel_label, "timestamps are not strictly increasing");
  if (!timestamps_ps.empty() && (timestamps_ps.front() < 0 || timestamps_ps.back() > duration_ps())) {
    throw ValidationError(channel_label, "timestamp outside [0, duration]");
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".manifest.json");
  return p;
}

void write_streams(std::span<const EventStream> streams, const std::filesystem::path& csv_path,
                   const std::string& config_digest, std::optional<double> phase_rad) {
  StreamManifest manifest;
  manifest.config_digest = config_digest;
  manifest.phase_rad = phase_rad;
  for (const auto& s : streams) {
    s.validate();
    if (s.channel_label.empty() || s.channel_label.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("channel_label", fmt::format("'{}' is not a valid CSV label", s.channel_label));
    }
    if (!manifest.labels.empty() && s.duration_s != manifest.duration_s) {
      throw ValidationError(s.channel_label, "streams in one file must share a duration");
    }
    manifest.duration_s = s.duration_s;
    manifest.labels.push_back(s.channel_label);
    manifest.seeds.push_back(s.seed);
  }
  if (!streams.empty()) manifest.seed = streams.front().seed;

  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
  out << "channel,time_ps\n";
  std::string buffer;
  for (const auto& s : streams) {
    for (Picoseconds t : s.timestamps_ps) {
      buffer += s.channel_label;
      buffer += ',';
      buffer += std::to_string(t);
      buffer += '\n';
      if (buffer.size() > (1u << 20)) {
        out << buffer;
        buffer.clear();
      }
    }
  }
  out << buffer;

  json j;
  j["duration_s"] = manifest.duration_s;
  j["seed"] = manifest.seed;
  j["config_digest"] = manifest.config_digest;
  j["labels"] = manifest.labels;
  j["seeds"] = manifest.seeds;
  if (phase_rad) j["phase_rad"] = *phase_rad;
  std::ofstream mout(manifest_path_for(csv_path), std::ios::binary);
  if (!mout) throw std::runtime_error("cannot open manifest for " + csv_path.string());
  mout << j.dump(2) << '\n';
}

namespace {

StreamManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing stream manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, fmt::format("{}: {}", path.string(), e.what()));
  }
  StreamManifest m;
  try {
    m.duration_s = j.at("duration_s").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_digest = j.value("config_digest", std::string{});
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.seeds = j.value("seeds", std::vector<std::uint64_t>(m.labels.size(), m.seed));
    if (j.contains("phase_rad")) m.phase_rad = j.at("phase_rad").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string(), e.what());
  }
  if (m.seeds.size() != m.labels.size()) throw ValidationError(path.string(), "seeds and labels differ in length");
  return m;
}

}  // namespace

StreamFile read_streams(const std::filesystem::path& csv_path) {
  StreamFile file;
  file.manifest = read_manifest(manifest_path_for(csv_path));

  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < file.manifest.labels.size(); ++i) {
    slot.emplace(file.manifest.labels[i], i);
    file.streams.push_back(EventStream{file.manifest.labels[i], {}, file.manifest.duration_s, file.manifest.seeds[i]});
  }

  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "channel,time_ps") throw ParseError(line_no, "expected header 'channel,time_ps'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(line_no, "expected two fields 'channel,time_ps'");
    }
    const std::string label = line.substr(0, comma);
    const auto it = slot.find(label);
    if (it == slot.end()) throw ParseError(line_no, fmt::format("channel '{}' not listed in manifest", label));
    Picoseconds t = 0;
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, t);
    if (ec != std::errc{} || ptr != last || first == last) {
      throw ParseError(line_no, fmt::format("'{}' is not an integer picosecond time", std::string(first, last)));
    }
    auto& ts = file.streams[it->second].timestamps_ps;
    if (!ts.empty() && t <= ts.back()) {
      throw ValidationError(label, fmt::format("line {}: timestamp {} not after previous {}", line_no, t, ts.back()));
    }
    ts.push_back(t);
  }
  for (const auto& s : file.streams) s.validate();
  return file;
}

}  // namespace qdemux
