#pragma once

// Ground truth for the shipping box and the sensor sampling that observes it.

#include <cstdint>
#include <vector>

#include "trustsim/types.hpp"

namespace trustsim {

struct Waypoint {
  Micros at{0};
  double latitude = 0.0;
  double longitude = 0.0;
};

struct TemperaturePoint {
  Micros at{0};
  double celsius = 0.0;
};

// Half-open [begin, end).
struct Interval {
  Micros begin{0};
  Micros end{0};

  bool contains(Micros t) const { return t >= begin && t < end; }
};

struct Scenario {
  Micros duration{0};
  std::vector<Waypoint> route;
  std::vector<TemperaturePoint> temperature;
  std::vector<Interval> open_intervals;
  double lux_open = 10000.0;
  double lux_closed = 0.5;
  double theta = 50.0;  // photosensor threshold in lux

  // Throws ScenarioError.
  void validate() const;
};

struct BoxState {
  double lux = 0.0;
  double temperature_c = 0.0;
  double latitude = 0.0;
  double longitude = 0.0;
  bool lid_open = false;
};

// Zero-mean uniform noise per channel; all zero means exact sensors.
struct SensorNoise {
  double temperature_c = 0.0;  // half-width
  double position_m = 0.0;     // half-width, applied to both axes
  std::uint64_t seed = 0;
};

// Throws ScenarioError when `at` lies outside [0, duration].
BoxState ground_truth(const Scenario& scenario, Micros at);

// Pure in (scenario, at, theta, noise).
SensorReading sample_sensors(const Scenario& scenario, Micros at, double theta, const SensorNoise& noise = {});

}  // namespace trustsim
