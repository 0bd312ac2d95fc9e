#include "trustsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "trustsim/encoding.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

std::string_view alarm_text(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kBoxOpened:
      return kBoxOpened;
    case ViolationKind::kAbnormalTemperature:
      return kAbnormalTemperature;
    case ViolationKind::kRouteDeviated:
      return kRouteDeviated;
  }
  return {};
}

double dist_meters(GeoPoint a, GeoPoint b) {
  double mean_lat = 0.5 * (a.latitude + b.latitude) * kDegToRad;
  double dx = (b.longitude - a.longitude) * kDegToRad * std::cos(mean_lat);
  double dy = (b.latitude - a.latitude) * kDegToRad;
  return kEarthRadiusM * std::hypot(dx, dy);
}

std::vector<Violation> violation_check(const SensorReading& reading, const Pattern& pattern) {
  std::vector<Violation> out;
  if (!pattern.permitted_brightness.contains(reading.brightness)) {
    out.push_back({ViolationKind::kBoxOpened, "photosensor reads " + std::to_string(reading.brightness)});
  }
  if (reading.temperature_c > pattern.temperature.max_c || reading.temperature_c < pattern.temperature.min_c) {
    out.push_back({ViolationKind::kAbnormalTemperature, std::to_string(reading.temperature_c) + " C"});
  }
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& cp : pattern.checkpoints) {
    double d = dist_meters({reading.latitude, reading.longitude}, {cp.latitude, cp.longitude});
    margin = std::min(margin, d - cp.radius_m);
  }
  if (margin > 0.0) {
    out.push_back({ViolationKind::kRouteDeviated, std::to_string(margin) + " m outside the nearest safe radius"});
  }
  return out;
}

void DeviceConfig::validate() const {
  if (device_id.empty()) throw ConfigError("device id is empty");
  if (delta_t_ms <= 0) throw ConfigError("sensing interval must be positive");
  if (first_tick_ms < 0) throw ConfigError("first tick must be non-negative");
  if (first_tick_ms + clock_skew_ms < 0) throw ConfigError("clock skew would produce a negative timestamp");
  if (processing_delay.min_ms() < 0.0) throw ConfigError("processing delay must be non-negative");
  try {
    pattern.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pattern: ") + e.what());
  }
}

Record make_record(std::uint64_t timestamp_ms, const SensorReading& reading, const SigningSecret& secret) {
  Record r;
  r.timestamp_ms = timestamp_ms;
  r.reading = reading;
  r.signature = sign(encode(r.body()), secret);
  return r;
}

AlarmMessage make_alarm(std::uint64_t timestamp_ms, std::vector<std::string> messages, const SigningSecret& secret) {
  AlarmMessage a;
  a.timestamp_ms = timestamp_ms;
  a.messages = std::move(messages);
  a.signature = sign(encode(a.body()), secret);
  return a;
}

bool verify_record(const Record& record, const PublicKey& pk) {
  try {
    return verify(encode(record.body()), record.signature, pk);
  } catch (const EncodingError&) {
    return false;
  }
}

bool verify_alarm(const AlarmMessage& alarm, const PublicKey& pk) {
  return verify(encode(alarm.body()), alarm.signature, pk);
}

Device::Device(DeviceConfig config, DeviceKeys keys, SessionKey session)
    : config_(std::move(config)), keys_(keys), session_(session) {
  config_.validate();
}

std::uint64_t Device::timestamp_for(Micros now) const {
  return static_cast<std::uint64_t>(now.count() / 1000 + config_.clock_skew_ms);
}

SenseOutput Device::sense_cycle(Micros now, const Scenario& scenario, Rng& rng) {
  if (status_.failed()) throw std::logic_error("sense_cycle on a failed device");

  SenseOutput out;
  SensorReading reading = sample_sensors(scenario, now, scenario.theta, config_.noise);
  std::uint64_t t = timestamp_for(now);

  out.violations = violation_check(reading, config_.pattern);
  if (!out.violations.empty()) {
    std::vector<std::string> messages;
    for (const auto& v : out.violations) messages.emplace_back(alarm_text(v.kind));
    out.alarm = make_alarm(t, std::move(messages), keys_.signing_secret);
  }

  out.record = make_record(t, reading, keys_.signing_secret);
  out.send_at = now + config_.processing_delay.sample(rng);

  if (queue_.size() > config_.max_fd) {
    status_ = {DeviceState::kFailed, kExceedRecoveryTolerance};
    return out;
  }

  RecordBatch batch;
  batch.records.assign(queue_.begin(), queue_.end());
  queue_.clear();
  batch.records.push_back(out.record);
  for (const auto& r : batch.records) out.carried.push_back(r.timestamp_ms);

  UploadMessage msg;
  msg.device_id = config_.device_id;
  msg.message_id = nonces_.next();
  msg.ciphertext = seal(encode(batch), session_, msg.message_id, as_bytes(config_.device_id));
  outstanding_.emplace(msg.message_id, std::move(batch.records));
  out.upload = std::move(msg);
  return out;
}

void Device::handle_ack(std::uint64_t message_id) { outstanding_.erase(message_id); }

void Device::handle_timeout(std::uint64_t message_id) {
  auto it = outstanding_.find(message_id);
  if (it == outstanding_.end()) return;
  auto records = std::move(it->second);
  outstanding_.erase(it);
  requeue(std::move(records));
}

std::vector<std::uint64_t> Device::expire_outstanding() {
  std::vector<std::uint64_t> ids;
  for (const auto& [id, _] : outstanding_) ids.push_back(id);
  for (auto id : ids) handle_timeout(id);
  return ids;
}

void Device::requeue(std::vector<Record> records) {
  for (auto& r : records) {
    auto pos = std::lower_bound(queue_.begin(), queue_.end(), r.timestamp_ms,
                                [](const Record& q, std::uint64_t t) { return q.timestamp_ms < t; });
    if (pos != queue_.end() && pos->timestamp_ms == r.timestamp_ms) continue;
    queue_.insert(pos, std::move(r));
  }
}

}  // namespace trustsim
