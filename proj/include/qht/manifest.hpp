#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "qht/errors.hpp"

namespace qht {

inline constexpr const char* kToolVersion = "qht 0.1.0";

// FNV-1a 64-bit over raw bytes; hex string.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Emitted alongside every output; re-running with an identical manifest must
// reproduce outputs byte for byte.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> arguments;
  std::map<std::string, std::string> input_digests;
  std::map<std::string, std::string> output_digests;
  std::uint64_t seed = 0;

  void add_input_file(const std::string& path) { input_digests[path] = fnv1a_hex(read_file_bytes(path)); }
  void add_output_bytes(const std::string& name, const std::string& bytes) {
    output_digests[name] = fnv1a_hex(bytes);
  }
  void add_output_file(const std::string& path) { output_digests[path] = fnv1a_hex(read_file_bytes(path)); }

  nlohmann::json to_json() const {
    return nlohmann::json{{"command", command},     {"arguments", arguments},
                          {"inputs", input_digests}, {"outputs", output_digests},
                          {"tool_version", kToolVersion}, {"seed", seed}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::BadInput, "cannot write " + path);
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace qht
