#pragma once

// The sensing device: periodic sense, violation check, sign, drain the backup
// queue, seal and hand the upload to the channel. Unacknowledged uploads go
// back into the backup queue; a backlog longer than max_fd is fatal.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustsim/crypto.hpp"
#include "trustsim/environment.hpp"
#include "trustsim/sampling.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

inline constexpr const char* kExceedRecoveryTolerance = "Exceed maximum recovery tolerance";

enum class ViolationKind { kBoxOpened, kAbnormalTemperature, kRouteDeviated };

struct Violation {
  ViolationKind kind;
  std::string detail;
};

std::string_view alarm_text(ViolationKind kind);

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
};

// Meters, via an equirectangular projection about the mean latitude.
double dist_meters(GeoPoint a, GeoPoint b);

// Empty result means the reading complies with the pattern.
std::vector<Violation> violation_check(const SensorReading& reading, const Pattern& pattern);

struct DeviceConfig {
  std::string device_id = "vaccine-box-1";
  std::int64_t delta_t_ms = 10000;
  std::int64_t first_tick_ms = 0;
  std::size_t max_fd = 5;
  std::int64_t clock_skew_ms = 0;
  Sampler processing_delay = Sampler::uniform(50.0, 158.0);  // epsilon_1
  SensorNoise noise;
  Pattern pattern;

  // Throws ConfigError.
  void validate() const;
};

enum class DeviceState { kRunning, kFailed };

struct DeviceStatus {
  DeviceState state = DeviceState::kRunning;
  std::string reason;

  bool failed() const { return state == DeviceState::kFailed; }
};

struct SenseOutput {
  Record record;
  std::vector<Violation> violations;
  std::optional<AlarmMessage> alarm;
  std::optional<UploadMessage> upload;  // absent when this cycle failed the device
  std::vector<std::uint64_t> carried;   // timestamps in the upload, oldest first
  Micros send_at{0};                    // sense time + epsilon_1
};

class Device {
 public:
  Device(DeviceConfig config, DeviceKeys keys, SessionKey session);

  // Precondition: status() is running. Throws std::logic_error otherwise.
  SenseOutput sense_cycle(Micros now, const Scenario& scenario, Rng& rng);

  // Unknown or repeated ids are ignored.
  void handle_ack(std::uint64_t message_id);

  // ACK timeout for one message: its records return to the backup queue.
  void handle_timeout(std::uint64_t message_id);

  // Times out every outstanding message; returns their ids.
  std::vector<std::uint64_t> expire_outstanding();

  const DeviceStatus& status() const { return status_; }
  const std::deque<Record>& backup_queue() const { return queue_; }
  std::size_t outstanding_count() const { return outstanding_.size(); }
  const DeviceConfig& config() const { return config_; }
  const PublicKey& public_key() const { return keys_.public_key; }
  std::uint64_t timestamp_for(Micros now) const;

 private:
  void requeue(std::vector<Record> records);

  DeviceConfig config_;
  DeviceKeys keys_;
  SessionKey session_;
  NonceCounter nonces_;
  std::deque<Record> queue_;
  std::map<std::uint64_t, std::vector<Record>> outstanding_;
  DeviceStatus status_;
};

Record make_record(std::uint64_t timestamp_ms, const SensorReading& reading, const SigningSecret& secret);
AlarmMessage make_alarm(std::uint64_t timestamp_ms, std::vector<std::string> messages, const SigningSecret& secret);
bool verify_record(const Record& record, const PublicKey& pk);
bool verify_alarm(const AlarmMessage& alarm, const PublicKey& pk);

}  // namespace trustsim
