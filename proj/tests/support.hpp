#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "trustsim/config.hpp"
#include "trustsim/crypto.hpp"

namespace trustsim::testing {

// Stationary box at one checkpoint, 14 C, lid closed.
inline RunConfig quiet_config(std::int64_t duration_ms, std::int64_t delta_t_ms = 10000) {
  RunConfig c;
  c.scenario.duration = from_whole_ms(duration_ms);
  c.scenario.route = {{Micros{0}, 36.1, 120.4}};
  c.scenario.temperature = {{Micros{0}, 14.0}};
  c.device.delta_t_ms = delta_t_ms;
  c.device.pattern.permitted_brightness = {0};
  c.device.pattern.temperature = {13.0, 15.0};
  c.device.pattern.checkpoints = {{36.1, 120.4, 500.0}};
  return c;
}

inline DeviceKeys test_keys(std::uint8_t fill) {
  Seed s;
  s.fill(fill);
  return keygen(s);
}

inline SessionKey test_session(std::uint8_t fill) {
  SessionKey k;
  k.bytes.fill(fill);
  return k;
}

inline std::string scenario_path(const std::string& name) { return std::string(TRUSTSIM_SCENARIO_DIR) + "/" + name; }

// Great-circle distance on a sphere of radius 6371 km.
inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double r = 6371000.0;
  constexpr double rad = std::numbers::pi / 180.0;
  double dphi = (lat2 - lat1) * rad;
  double dl = (lon2 - lon1) * rad;
  double h = std::pow(std::sin(dphi / 2), 2) + std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::pow(std::sin(dl / 2), 2);
  return 2.0 * r * std::asin(std::sqrt(h));
}

}  // namespace trustsim::testing
