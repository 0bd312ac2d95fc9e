#include "trustsim/config.hpp"

#include <cmath>
#include <fstream>

#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

using nlohmann::json;

Micros ms_field(const json& j, const char* key) { return from_ms(j.at(key).get<double>()); }

template <class T>
T opt(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

// Converts library exceptions raised while reading `what` into ConfigError.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

json interval_json(const Interval& w) { return {{"begin_ms", to_ms(w.begin)}, {"end_ms", to_ms(w.end)}}; }

Interval interval_from(const json& j) { return {ms_field(j, "begin_ms"), ms_field(j, "end_ms")}; }

}  // namespace

void RunConfig::validate() const {
  scenario.validate();
  device.validate();
  channel.validate();
  chain.validate();
  double round_trip = device.processing_delay.max_ms() + 2.0 * channel.latency.max_ms();
  if (!(round_trip < static_cast<double>(device.delta_t_ms))) {
    throw ConfigError("eps1_max + 2 * eps2_max must be below the sensing interval or ACKs time out spuriously");
  }
}

TimingParams timing_params(const RunConfig& c) {
  TimingParams p;
  p.eps1_max_ms = c.device.processing_delay.max_ms();
  p.eps2_max_ms = c.channel.latency.max_ms();
  p.eps_s_abs_ms = std::abs(static_cast<double>(c.device.clock_skew_ms));
  p.delta_gst_max_ms = c.chain.max_gst_interval_ms();
  p.L_ms = c.chain.sync_period_ms;
  p.delta_t_ms = static_cast<double>(c.device.delta_t_ms);
  p.max_fd = c.device.max_fd;
  p.processing_jitter_ms = (c.device.processing_delay.max_ms() - c.device.processing_delay.min_ms()) +
                           (c.channel.latency.max_ms() - c.channel.latency.min_ms());
  return p;
}

json to_json(const Sampler& s) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Sampler::Constant>) {
          return {{"kind", "constant"}, {"value_ms", k.value_ms}};
        } else if constexpr (std::is_same_v<K, Sampler::Uniform>) {
          return {{"kind", "uniform"}, {"min_ms", k.min_ms}, {"max_ms", k.max_ms}};
        } else {
          return {{"kind", "cycle"}, {"values_ms", k.values_ms}};
        }
      },
      s.kind());
}

Sampler sampler_from_json(const json& j) {
  return guarded("sampler", [&] {
    if (j.is_number()) return Sampler::constant(j.get<double>());
    auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Sampler::constant(j.at("value_ms").get<double>());
    if (kind == "uniform") return Sampler::uniform(j.at("min_ms").get<double>(), j.at("max_ms").get<double>());
    if (kind == "cycle") return Sampler::cycle(j.at("values_ms").get<std::vector<double>>());
    throw ConfigError("unknown sampler kind: " + kind);
  });
}

json to_json(const Scenario& s) {
  json route = json::array();
  for (const auto& w : s.route) route.push_back({{"at_ms", to_ms(w.at)}, {"lat", w.latitude}, {"lon", w.longitude}});
  json temp = json::array();
  for (const auto& p : s.temperature) temp.push_back({{"at_ms", to_ms(p.at)}, {"celsius", p.celsius}});
  json open = json::array();
  for (const auto& w : s.open_intervals) open.push_back(interval_json(w));
  return {{"duration_ms", to_ms(s.duration)}, {"route", route},          {"temperature", temp},
          {"open_intervals", open},          {"lux_open", s.lux_open}, {"lux_closed", s.lux_closed},
          {"theta", s.theta}};
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario s;
    s.duration = ms_field(j, "duration_ms");
    for (const auto& w : j.at("route")) s.route.push_back({ms_field(w, "at_ms"), w.at("lat"), w.at("lon")});
    for (const auto& p : j.at("temperature")) s.temperature.push_back({ms_field(p, "at_ms"), p.at("celsius")});
    if (j.contains("open_intervals")) {
      for (const auto& w : j.at("open_intervals")) s.open_intervals.push_back(interval_from(w));
    }
    s.lux_open = opt(j, "lux_open", s.lux_open);
    s.lux_closed = opt(j, "lux_closed", s.lux_closed);
    s.theta = opt(j, "theta", s.theta);
    return s;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

json to_json(const DeviceConfig& d) {
  json cps = json::array();
  for (const auto& cp : d.pattern.checkpoints) {
    cps.push_back({{"lat", cp.latitude}, {"lon", cp.longitude}, {"radius_m", cp.radius_m}});
  }
  return {
      {"device_id", d.device_id},
      {"delta_t_ms", d.delta_t_ms},
      {"first_tick_ms", d.first_tick_ms},
      {"max_fd", d.max_fd},
      {"clock_skew_ms", d.clock_skew_ms},
      {"processing_delay", to_json(d.processing_delay)},
      {"noise",
       {{"temperature_c", d.noise.temperature_c}, {"position_m", d.noise.position_m}, {"seed", d.noise.seed}}},
      {"pattern",
       {{"permitted_brightness", d.pattern.permitted_brightness},
        {"temperature", {{"min_c", d.pattern.temperature.min_c}, {"max_c", d.pattern.temperature.max_c}}},
        {"checkpoints", cps}}},
  };
}

DeviceConfig device_from_json(const json& j) {
  return guarded("device", [&] {
    DeviceConfig d;
    d.device_id = opt(j, "device_id", d.device_id);
    d.delta_t_ms = opt(j, "delta_t_ms", d.delta_t_ms);
    d.first_tick_ms = opt(j, "first_tick_ms", d.first_tick_ms);
    d.max_fd = opt(j, "max_fd", d.max_fd);
    d.clock_skew_ms = opt(j, "clock_skew_ms", d.clock_skew_ms);
    if (j.contains("processing_delay")) d.processing_delay = sampler_from_json(j.at("processing_delay"));
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      d.noise.temperature_c = opt(n, "temperature_c", 0.0);
      d.noise.position_m = opt(n, "position_m", 0.0);
      d.noise.seed = opt<std::uint64_t>(n, "seed", 0);
    }
    const auto& p = j.at("pattern");
    d.pattern.permitted_brightness = p.at("permitted_brightness").get<std::set<std::uint8_t>>();
    d.pattern.temperature = {p.at("temperature").at("min_c"), p.at("temperature").at("max_c")};
    for (const auto& cp : p.at("checkpoints")) d.pattern.checkpoints.push_back({cp.at("lat"), cp.at("lon"), cp.at("radius_m")});
    return d;
  });
}

json to_json(const Channel& c) {
  json jams = json::array();
  for (const auto& w : c.jam_windows) jams.push_back(interval_json(w));
  return {{"latency", to_json(c.latency)}, {"jam_windows", jams}, {"loss_rate", c.loss_rate}};
}

Channel channel_from_json(const json& j) {
  return guarded("channel", [&] {
    Channel c;
    if (j.contains("latency")) c.latency = sampler_from_json(j.at("latency"));
    if (j.contains("jam_windows")) {
      for (const auto& w : j.at("jam_windows")) c.jam_windows.push_back(interval_from(w));
    }
    c.loss_rate = opt(j, "loss_rate", 0.0);
    return c;
  });
}

json to_json(const ChainParams& c) {
  json gst;
  if (c.gst_mode == GstMode::kConstant) {
    gst = {{"mode", "constant"}, {"interval_ms", c.gst_interval_ms}};
  } else {
    gst = {{"mode", "bounded_random"}, {"bound_ms", c.gst_bound_ms}, {"sampler", to_json(c.gst_sampler)}};
  }
  return {{"nodes", c.nodes},
          {"byzantine", c.byzantine},
          {"gst", gst},
          {"L_ms", c.sync_period_ms},
          {"l1", to_json(c.commit_duration)}};
}

ChainParams chain_from_json(const json& j) {
  return guarded("chain", [&] {
    ChainParams c;
    c.nodes = opt(j, "nodes", c.nodes);
    c.byzantine = opt(j, "byzantine", c.byzantine);
    if (j.contains("gst")) {
      const auto& g = j.at("gst");
      auto mode = g.at("mode").get<std::string>();
      if (mode == "constant") {
        c.gst_mode = GstMode::kConstant;
        c.gst_interval_ms = g.at("interval_ms");
      } else if (mode == "bounded_random") {
        c.gst_mode = GstMode::kBoundedRandom;
        c.gst_bound_ms = g.at("bound_ms");
        c.gst_sampler = sampler_from_json(g.at("sampler"));
      } else {
        throw ConfigError("unknown GST mode: " + mode);
      }
    }
    c.sync_period_ms = opt(j, "L_ms", c.sync_period_ms);
    if (j.contains("l1")) c.commit_duration = sampler_from_json(j.at("l1"));
    return c;
  });
}

json to_json(const RunConfig& c) {
  return {{"scenario", to_json(c.scenario)},
          {"device", to_json(c.device)},
          {"channel", to_json(c.channel)},
          {"chain", to_json(c.chain)}};
}

RunConfig run_config_from_json(const json& j) {
  return guarded("config", [&] {
    RunConfig c;
    c.scenario = scenario_from_json(j.at("scenario"));
    c.device = device_from_json(j.at("device"));
    c.channel = channel_from_json(j.at("channel"));
    c.chain = chain_from_json(j.at("chain"));
    return c;
  });
}

json to_json(const TimingParams& p) {
  return {{"eps1_max_ms", p.eps1_max_ms},
          {"eps2_max_ms", p.eps2_max_ms},
          {"eps_s_abs_ms", p.eps_s_abs_ms},
          {"delta_gst_max_ms", p.delta_gst_max_ms},
          {"L_ms", p.L_ms},
          {"delta_t_ms", p.delta_t_ms},
          {"max_fd", p.max_fd},
          {"processing_jitter_ms", p.processing_jitter_ms}};
}

TimingParams timing_params_from_json(const json& j) {
  return guarded("params", [&] {
    TimingParams p;
    p.eps1_max_ms = j.at("eps1_max_ms");
    p.eps2_max_ms = j.at("eps2_max_ms");
    p.eps_s_abs_ms = j.at("eps_s_abs_ms");
    p.delta_gst_max_ms = j.at("delta_gst_max_ms");
    p.L_ms = j.at("L_ms");
    p.delta_t_ms = j.at("delta_t_ms");
    p.max_fd = j.at("max_fd");
    p.processing_jitter_ms = opt(j, "processing_jitter_ms", 0.0);
    p.validate();
    return p;
  });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& scenario_path, const std::filesystem::path* config_path) {
  json doc = read_json_file(scenario_path);
  json sections = doc.contains("config") ? doc.at("config") : json::object();
  if (config_path) {
    json override_doc = read_json_file(*config_path);
    if (!override_doc.is_object()) throw ConfigError(config_path->string() + ": expected an object");
    for (const auto& [key, value] : override_doc.items()) sections[key] = value;
  }
  RunConfig c;
  c.scenario = scenario_from_json(doc);
  if (!sections.contains("device")) throw ConfigError("no device section in scenario or config");
  c.device = device_from_json(sections.at("device"));
  c.channel = channel_from_json(sections.value("channel", json::object()));
  c.chain = chain_from_json(sections.value("chain", json::object()));
  c.validate();
  return c;
}

}  // namespace trustsim
