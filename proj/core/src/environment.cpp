#include "trustsim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trustsim/errors.hpp"
#include "trustsim/sampling.hpp"

namespace trustsim {
namespace {

constexpr double kMetersPerDegree = 6371000.0 * std::numbers::pi / 180.0;

template <class Point>
void check_sorted(const std::vector<Point>& points, const char* what) {
  if (points.empty()) throw ScenarioError(std::string(what) + " is empty");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].at <= points[i - 1].at) throw ScenarioError(std::string(what) + " is not sorted by time");
  }
}

// Index of the segment [i, i+1] that brackets `at` (clamped at both ends).
template <class Point>
std::pair<std::size_t, double> locate(const std::vector<Point>& points, Micros at) {
  if (points.size() == 1 || at <= points.front().at) return {0, 0.0};
  if (at >= points.back().at) return {points.size() - 1, 0.0};
  auto it = std::upper_bound(points.begin(), points.end(), at, [](Micros t, const Point& p) { return t < p.at; });
  std::size_t i = static_cast<std::size_t>(it - points.begin()) - 1;
  double span = static_cast<double>((points[i + 1].at - points[i].at).count());
  double frac = static_cast<double>((at - points[i].at).count()) / span;
  return {i, frac};
}

double lerp(double a, double b, double f) { return f == 0.0 ? a : a + (b - a) * f; }

// Uniform draw in [-1, 1) that depends only on (seed, time, channel).
double noise_unit(std::uint64_t seed, Micros at, std::string_view channel) {
  Rng rng(derive_seed(seed ^ static_cast<std::uint64_t>(at.count()), channel));
  return 2.0 * rng.uniform01() - 1.0;
}

}  // namespace

void Scenario::validate() const {
  if (duration <= Micros{0}) throw ScenarioError("duration must be positive");
  check_sorted(route, "route");
  check_sorted(temperature, "temperature profile");
  for (const auto& w : route) {
    if (!(w.latitude >= -90.0 && w.latitude <= 90.0) || !(w.longitude >= -180.0 && w.longitude <= 180.0)) {
      throw ScenarioError("waypoint outside valid coordinates");
    }
  }
  for (const auto& p : temperature) {
    if (!std::isfinite(p.celsius)) throw ScenarioError("temperature must be finite");
  }
  for (std::size_t i = 0; i < open_intervals.size(); ++i) {
    if (open_intervals[i].end <= open_intervals[i].begin) throw ScenarioError("empty open interval");
    if (i > 0 && open_intervals[i].begin < open_intervals[i - 1].end) {
      throw ScenarioError("open intervals overlap or are unsorted");
    }
  }
  if (!(lux_closed < theta && theta <= lux_open)) {
    throw ScenarioError("need ambient_lux_closed < theta <= ambient_lux_open");
  }
}

BoxState ground_truth(const Scenario& scenario, Micros at) {
  if (at < Micros{0} || at > scenario.duration) throw ScenarioError("time outside the scenario");
  BoxState s;
  auto [ri, rf] = locate(scenario.route, at);
  const auto& a = scenario.route[ri];
  const auto& b = scenario.route[std::min(ri + 1, scenario.route.size() - 1)];
  s.latitude = lerp(a.latitude, b.latitude, rf);
  s.longitude = lerp(a.longitude, b.longitude, rf);

  auto [ti, tf] = locate(scenario.temperature, at);
  const auto& ka = scenario.temperature[ti];
  const auto& kb = scenario.temperature[std::min(ti + 1, scenario.temperature.size() - 1)];
  s.temperature_c = lerp(ka.celsius, kb.celsius, tf);

  s.lid_open = std::any_of(scenario.open_intervals.begin(), scenario.open_intervals.end(),
                           [at](const Interval& iv) { return iv.contains(at); });
  s.lux = s.lid_open ? scenario.lux_open : scenario.lux_closed;
  return s;
}

SensorReading sample_sensors(const Scenario& scenario, Micros at, double theta, const SensorNoise& noise) {
  BoxState s = ground_truth(scenario, at);
  SensorReading c;
  c.brightness = s.lux > theta ? 1 : 0;
  c.temperature_c = s.temperature_c;
  c.latitude = s.latitude;
  c.longitude = s.longitude;
  if (noise.temperature_c > 0.0) {
    c.temperature_c += noise.temperature_c * noise_unit(noise.seed, at, "temperature");
  }
  if (noise.position_m > 0.0) {
    double dlat = noise.position_m * noise_unit(noise.seed, at, "latitude") / kMetersPerDegree;
    double coslat = std::max(std::cos(c.latitude * std::numbers::pi / 180.0), 1e-6);
    double dlon = noise.position_m * noise_unit(noise.seed, at, "longitude") / (kMetersPerDegree * coslat);
    c.latitude = std::clamp(c.latitude + dlat, -90.0, 90.0);
    c.longitude = std::clamp(c.longitude + dlon, -180.0, 180.0);
  }
  return c;
}

}  // namespace trustsim
