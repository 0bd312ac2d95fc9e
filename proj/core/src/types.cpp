#include "trustsim/types.hpp"

#include <stdexcept>

namespace trustsim {

void SensorReading::validate() const {
  if (brightness > 1) throw std::invalid_argument("brightness flag must be 0 or 1");
  if (!std::isfinite(temperature_c)) throw std::invalid_argument("temperature must be finite");
  if (!(latitude >= -90.0 && latitude <= 90.0)) throw std::invalid_argument("latitude out of range");
  if (!(longitude >= -180.0 && longitude <= 180.0)) throw std::invalid_argument("longitude out of range");
}

void AlarmMessage::validate() const {
  if (messages.empty()) throw std::invalid_argument("alarm carries no messages");
  for (const auto& m : messages) {
    if (m != kBoxOpened && m != kAbnormalTemperature && m != kRouteDeviated) {
      throw std::invalid_argument("unknown alarm message: " + m);
    }
  }
}

void Pattern::validate() const {
  if (permitted_brightness.empty()) throw std::invalid_argument("pattern permits no brightness value");
  for (auto v : permitted_brightness) {
    if (v > 1) throw std::invalid_argument("brightness flag must be 0 or 1");
  }
  if (!(temperature.min_c <= temperature.max_c)) throw std::invalid_argument("K_min exceeds K_max");
  if (checkpoints.empty()) throw std::invalid_argument("pattern has no checkpoints");
  for (const auto& cp : checkpoints) {
    if (!(cp.radius_m > 0.0)) throw std::invalid_argument("checkpoint radius must be positive");
  }
}

void DigitalEntity::append(CommittedRecord entry) {
  if (!records_.empty() && entry.record.timestamp_ms <= records_.back().record.timestamp_ms) {
    throw std::invalid_argument("entity records must be strictly increasing in time");
  }
  records_.push_back(std::move(entry));
}

}  // namespace trustsim
