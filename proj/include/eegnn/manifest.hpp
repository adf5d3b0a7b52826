#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eegnn {

/// key=value configuration file: one pair per line, '#' comments and blank
/// lines ignored, whitespace around keys and values trimmed.
struct KeyValueConfig {
  std::map<std::string, std::string> values;

  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
};

/// FNV-1a (64-bit) digest of a file's raw bytes. Throws IoError when the
/// file cannot be read.
std::uint64_t fnv1a_digest_file(const std::string& path);
std::string fnv1a_hex(std::uint64_t digest);

/// Reproducibility record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;         // resolved settings
  std::map<std::string, std::string> input_digests;  // path -> hex digest
  std::vector<std::string> outputs;
  double wall_time_seconds = 0.0;

  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);
};

/// Byte-level equality of two manifests with the wall-time field ignored.
bool manifests_equivalent(const std::string& path_a, const std::string& path_b);

}  // namespace eegnn
