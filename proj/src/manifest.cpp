#include "polylab/manifest.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>

namespace polylab {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Runtime, "SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string RunManifest::to_json() const {
  nlohmann::json j{{"config_hash", config_hash},
                   {"config", nlohmann::json::parse(config)},
                   {"tool_version", tool_version},
                   {"timestamp", timestamp},
                   {"seed", seed},
                   {"constants",
                    {{"asymptotic", constants.asymptotic},
                     {"alpha_desk", constants.alpha_desk},
                     {"beta_desk", constants.beta_desk},
                     {"b2", constants.b2}}},
                   {"outputs", outputs},
                   {"dry_run", dry_run}};
  return j.dump(2);
}

RunManifest make_manifest(const ExperimentConfig& config, const std::vector<std::string>& outputs,
                          bool dry_run) {
  RunManifest m;
  m.config = config_to_json(config);
  m.config_hash = sha256_hex(m.config);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  m.timestamp = buf;
  m.seed = config.seed;
  m.constants = config.constants;
  m.outputs = outputs;
  m.dry_run = dry_run;
  return m;
}

RunManifest load_manifest(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config").dump(2);
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.dry_run = j.value("dry_run", false);
    const auto& k = j.at("constants");
    m.constants.asymptotic = k.at("asymptotic").get<bool>();
    m.constants.alpha_desk = k.at("alpha_desk").get<double>();
    m.constants.beta_desk = k.at("beta_desk").get<double>();
    m.constants.b2 = k.at("b2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("manifest: ") + e.what());
  }
  // Normalize through the config parser so key order and formatting match.
  const std::string normalized = config_to_json(parse_config(m.config));
  if (sha256_hex(normalized) != m.config_hash)
    throw Error(ErrorKind::PreconditionViolated, "manifest config hash mismatch");
  m.config = normalized;
  return m;
}

}  // namespace polylab
