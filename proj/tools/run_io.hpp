// run_io.hpp
// Run manifests, config hashing and deterministic CSV/JSON writers for the
// qrf command-line tool.

#pragma once

#include <json.hpp>

#include "qrf/linalg.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qrf::io {

inline constexpr const char* kArtifactVersion = "1.0.0";

using Json = nlohmann::json;  // std::map-backed: keys serialize sorted

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Digest of the canonical (sorted-key, compact) serialization.
inline std::string config_hash(const Json& config) { return hex64(fnv1a(config.dump())); }

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  std::string artifact_version = kArtifactVersion;
  std::string config_hash;
  std::string started;
  std::string finished;
  Json extra = Json::object();  // run metadata outside the hashed config

  RunManifest(std::string cmd, Json cfg, std::uint64_t s)
      : command(std::move(cmd)), config(std::move(cfg)), seed(s) {
    Json hashed = config;
    hashed["command"] = command;
    hashed["seed"] = seed;
    config_hash = io::config_hash(hashed);
    started = utc_timestamp();
  }

  Json to_json() const {
    return Json{{"command", command},   {"config", config},
                {"seed", seed},         {"artifact_version", artifact_version},
                {"config_hash", config_hash}, {"started", started},
                {"finished", finished}, {"run", extra}};
  }
};

inline std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline void write_manifest(const std::filesystem::path& dir, RunManifest& m) {
  m.finished = utc_timestamp();
  write_json(dir / "manifest.json", m.to_json());
}

/// Header row, 12 significant digits, '.' decimal separator, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) text_ += ',';
      text_ += header[k];
    }
    text_ += '\n';
  }

  void row(const std::vector<double>& values) {
    char buf[40];
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k) text_ += ',';
      std::snprintf(buf, sizeof buf, "%.12g", values[k] == 0.0 ? 0.0 : values[k]);
      text_ += buf;
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const { write_text(path, text_); }

 private:
  std::string text_;
};

}  // namespace qrf::io
