#pragma once

// Run configuration and its JSON form. All durations in JSON are
// milliseconds (fractions allowed); see docs/formats.md for the schema.

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "trustsim/chain.hpp"
#include "trustsim/device.hpp"
#include "trustsim/environment.hpp"
#include "trustsim/network.hpp"
#include "trustsim/verifier.hpp"

namespace trustsim {

struct RunConfig {
  Scenario scenario;
  DeviceConfig device;
  Channel channel;
  ChainParams chain;

  // Validates every part plus the cross-module rules. Throws ConfigError or
  // ScenarioError.
  void validate() const;
};

// Audit parameters implied by a configuration.
TimingParams timing_params(const RunConfig& config);

nlohmann::json to_json(const Sampler& s);
Sampler sampler_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DeviceConfig& d);
DeviceConfig device_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Channel& c);
Channel channel_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChainParams& c);
ChainParams chain_from_json(const nlohmann::json& j);

// {"scenario": ..., "device": ..., "channel": ..., "chain": ...}
nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TimingParams& p);
TimingParams timing_params_from_json(const nlohmann::json& j);

// A scenario file is a scenario object with an optional embedded "config"
// holding device/channel/chain sections. A config file holds those sections
// only and overrides the embedded ones section by section.
RunConfig load_run_config(const std::filesystem::path& scenario_path, const std::filesystem::path* config_path);

// Throws ConfigError on I/O or syntax errors.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace trustsim
