#pragma once

// Domain values shared by every module. All of them are plain immutable
// values once constructed; validate() enforces the documented invariants.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace trustsim {

using Bytes = std::vector<std::uint8_t>;

// Virtual time. The simulator clock ticks in microseconds so fractional
// millisecond latencies stay exact; record timestamps are whole milliseconds.
using Micros = std::chrono::duration<std::int64_t, std::micro>;

inline Micros from_ms(double ms) { return Micros{std::llround(ms * 1000.0)}; }
inline double to_ms(Micros t) { return static_cast<double>(t.count()) / 1000.0; }
inline Micros from_whole_ms(std::int64_t ms) { return Micros{ms * 1000}; }

struct SensorReading {
  std::uint8_t brightness = 0;  // 0 dark, 1 bright
  double temperature_c = 0.0;
  double latitude = 0.0;
  double longitude = 0.0;

  void validate() const;
  bool operator==(const SensorReading&) const = default;
};

// The signed part of a record.
struct RecordBody {
  std::uint64_t timestamp_ms = 0;
  SensorReading reading;

  bool operator==(const RecordBody&) const = default;
};

struct Record {
  std::uint64_t timestamp_ms = 0;
  SensorReading reading;
  Bytes signature;

  RecordBody body() const { return {timestamp_ms, reading}; }
  bool operator==(const Record&) const = default;
};

// Backlog followed by the fresh record, in strictly increasing timestamp order.
struct RecordBatch {
  std::vector<Record> records;

  bool operator==(const RecordBatch&) const = default;
};

inline constexpr const char* kBoxOpened = "Box opened";
inline constexpr const char* kAbnormalTemperature = "Abnormal Temperature";
inline constexpr const char* kRouteDeviated = "Route Deviated";

struct AlarmBody {
  std::uint64_t timestamp_ms = 0;
  std::vector<std::string> messages;

  bool operator==(const AlarmBody&) const = default;
};

struct AlarmMessage {
  std::uint64_t timestamp_ms = 0;
  std::vector<std::string> messages;
  Bytes signature;

  AlarmBody body() const { return {timestamp_ms, messages}; }
  void validate() const;
  bool operator==(const AlarmMessage&) const = default;
};

struct UploadMessage {
  std::string device_id;
  std::uint64_t message_id = 0;  // also the AEAD nonce counter
  Bytes ciphertext;
};

struct Checkpoint {
  double latitude = 0.0;
  double longitude = 0.0;
  double radius_m = 0.0;

  bool operator==(const Checkpoint&) const = default;
};

struct TemperatureBand {
  double min_c = 0.0;
  double max_c = 0.0;

  bool operator==(const TemperatureBand&) const = default;
};

struct Pattern {
  std::set<std::uint8_t> permitted_brightness{0};
  TemperatureBand temperature;
  std::vector<Checkpoint> checkpoints;

  void validate() const;
  bool operator==(const Pattern&) const = default;
};

struct CommittedRecord {
  Record record;
  Micros commit_time{0};
  std::uint64_t depth = 0;

  bool operator==(const CommittedRecord&) const = default;
};

// The chronologically ordered chain of committed records of one device.
class DigitalEntity {
 public:
  DigitalEntity() = default;
  explicit DigitalEntity(std::string device_id) : device_id_(std::move(device_id)) {}

  // Throws std::invalid_argument unless the timestamp is strictly newer.
  void append(CommittedRecord entry);

  const std::string& device_id() const { return device_id_; }
  const std::vector<CommittedRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Time at which the chain was observed; used for the trailing-gap check.
  std::optional<Micros> as_of() const { return as_of_; }
  void set_as_of(Micros t) { as_of_ = t; }

  bool operator==(const DigitalEntity&) const = default;

 private:
  std::string device_id_;
  std::vector<CommittedRecord> records_;
  std::optional<Micros> as_of_;
};

// Per-record timing facts gathered by the simulator.
struct RecordLifecycle {
  std::uint64_t timestamp_ms = 0;
  SensorReading reading;
  Micros sensed_at{0};
  std::optional<Micros> sent_at;     // the send attempt that reached the agent
  std::optional<Micros> arrived_at;  // first arrival at the agent
  std::optional<Micros> block_gst;
  std::optional<Micros> committed_at;
  std::uint64_t depth = 0;
  std::uint32_t resend_count = 0;  // times carried as backlog
  bool recovered = false;          // re-sent from the backup queue and committed

  bool committed() const { return committed_at.has_value(); }
};

}  // namespace trustsim
