#pragma once

#include "polylab/stats.hpp"

#include <string>
#include <vector>

namespace polylab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

/// Provenance of one run. The stored config is hashed again on load.
struct RunManifest {
  std::string config_hash;
  std::string config;  // normalized config JSON
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC, ISO 8601
  std::uint64_t seed = 0;
  ConstantsConfig constants;
  std::vector<std::string> outputs;
  bool dry_run = false;

  std::string to_json() const;
};

RunManifest make_manifest(const ExperimentConfig& config, const std::vector<std::string>& outputs,
                          bool dry_run);

/// Throws ParseError on malformed input and PreconditionViolated when the
/// stored hash does not match the stored config.
RunManifest load_manifest(const std::string& json_text);

}  // namespace polylab
