#pragma once

// Deterministic discrete-event engine. One virtual clock drives the device,
// channel and chain; every random draw comes from a substream of the run
// seed, so a (config, seed) pair always produces the same trace.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trustsim/chain.hpp"
#include "trustsim/config.hpp"
#include "trustsim/device.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

// Ties at one instant: GST first, so an arrival exactly at a GST misses that block.
enum class EventKind { kGst, kBct, kDelivery, kAlarmDelivery, kAckDelivery, kSenseTick };

struct RunSummary {
  std::size_t sensed = 0;
  std::size_t committed = 0;
  std::size_t recovered = 0;
  std::size_t alarms = 0;
  std::size_t alarms_committed = 0;
  std::size_t uploads = 0;
  std::size_t uploads_dropped = 0;
  std::size_t acks_dropped = 0;
  std::size_t rejected = 0;
};

struct Trace {
  std::uint64_t seed = 0;
  RunConfig config;
  PublicKey device_pk{};
  std::vector<nlohmann::ordered_json> events;  // in processing order
  std::vector<RecordLifecycle> lifecycle;      // in sensing order
  std::vector<AlarmMessage> alarms;            // every alarm the device raised
  std::vector<CommittedAlarm> committed_alarms;
  DeviceStatus status;
  DigitalEntity entity;
  Micros end_time{0};
  RunSummary summary;
};

// Throws ConfigError or ScenarioError before the first event.
Trace run(const RunConfig& config, std::uint64_t seed);

}  // namespace trustsim
