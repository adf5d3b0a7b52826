#include "eegnn/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "eegnn/graph.hpp"

namespace eegnn {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
    cfg.values[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return values.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': not a number: " + it->second);
  }
  if (pos != it->second.size())
    throw ParseError("config key '" + key + "': not a number: " + it->second);
  return v;
}

long long KeyValueConfig::get_int(const std::string& key,
                                  long long fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(it->second, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': not an integer: " + it->second);
  }
  if (pos != it->second.size())
    throw ParseError("config key '" + key + "': not an integer: " + it->second);
  return v;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key,
                                       std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(it->second, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key +
                     "': not an unsigned integer: " + it->second);
  }
  if (pos != it->second.size())
    throw ParseError("config key '" + key +
                     "': not an unsigned integer: " + it->second);
  return v;
}

std::uint64_t fnv1a_digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for digest: " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (in.eof()) break;
  }
  return h;
}

std::string fnv1a_hex(std::uint64_t digest) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

void RunManifest::save(const std::string& path) const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["params"] = params;
  j["input_digests"] = input_digests;
  j["outputs"] = outputs;
  j["wall_time_seconds"] = wall_time_seconds;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": invalid manifest JSON: " + e.what());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    m.input_digests =
        j.at("input_digests").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": manifest missing field: " + e.what());
  }
  return m;
}

bool manifests_equivalent(const std::string& path_a,
                          const std::string& path_b) {
  auto normalized = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    nlohmann::ordered_json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": invalid manifest JSON: " + e.what());
    }
    j.erase("wall_time_seconds");
    return j.dump();
  };
  return normalized(path_a) == normalized(path_b);
}

}  // namespace eegnn
