#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "trustsim/config.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path write_temp(const std::string& name, const json& j) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

TEST(Config, SamplerForms) {
  EXPECT_EQ(sampler_from_json(json(76.3)).max_ms(), 76.3);
  Sampler u = sampler_from_json(json{{"kind", "uniform"}, {"min_ms", 50}, {"max_ms", 80}});
  EXPECT_EQ(u.min_ms(), 50);
  EXPECT_EQ(u.max_ms(), 80);
  EXPECT_EQ(sampler_from_json(json{{"kind", "cycle"}, {"values_ms", {1, 2}}}).mean_ms(), 1.5);
  EXPECT_THROW(sampler_from_json(json{{"kind", "gaussian"}}), ConfigError);
  EXPECT_THROW(sampler_from_json(json{{"kind", "uniform"}, {"min_ms", 9}, {"max_ms", 1}}), ConfigError);
  EXPECT_THROW(sampler_from_json(json{{"kind", "uniform"}}), ConfigError);
}

TEST(Config, RunConfigJsonRoundTrip) {
  RunConfig c = load_run_config(testing::scenario_path("vaccine_shipment.json"), nullptr);
  json j = to_json(c);
  EXPECT_EQ(to_json(run_config_from_json(j)), j);
  c.chain.gst_mode = GstMode::kBoundedRandom;
  c.chain.gst_bound_ms = 50;
  c.chain.gst_sampler = Sampler::uniform(40, 50);
  j = to_json(c);
  EXPECT_EQ(to_json(run_config_from_json(j)), j);
}

TEST(Config, VaccineScenarioTimingParams) {
  RunConfig c = load_run_config(testing::scenario_path("vaccine_shipment.json"), nullptr);
  TimingParams p = timing_params(c);
  EXPECT_EQ(p.eps1_max_ms, 118);
  EXPECT_EQ(p.eps2_max_ms, 80);
  EXPECT_EQ(p.eps_s_abs_ms, 0);
  EXPECT_EQ(p.delta_gst_max_ms, 36);
  EXPECT_EQ(p.L_ms, 36);
  EXPECT_EQ(p.delta_t_ms, 10000);
  EXPECT_EQ(p.max_fd, 5u);
  EXPECT_NEAR(p.processing_jitter_ms, 68 + 7.4, 1e-9);
  EXPECT_EQ(delta_bound(p), 270);
  EXPECT_EQ(c.scenario.duration, from_whole_ms(920000));
  EXPECT_EQ(c.channel.jam_windows.size(), 2u);
  EXPECT_EQ(c.device.pattern.checkpoints.size(), 5u);
}

TEST(Config, TimingParamsJsonRoundTrip) {
  TimingParams p{1, 2, 3, 4, 5, 6, 7, 8};
  TimingParams q = timing_params_from_json(to_json(p));
  EXPECT_EQ(to_json(q), to_json(p));
  json j = to_json(p);
  j.erase("processing_jitter_ms");
  EXPECT_EQ(timing_params_from_json(j).processing_jitter_ms, 0);
  j.erase("L_ms");
  EXPECT_THROW(timing_params_from_json(j), ConfigError);
}

TEST(Config, ConfigFileOverridesSectionBySection) {
  json over = {{"chain", {{"gst", {{"mode", "constant"}, {"interval_ms", 5000}}}, {"L_ms", 2000}, {"l1", 2000}}}};
  fs::path p = write_temp("trustsim_override.json", over);
  RunConfig c = load_run_config(testing::scenario_path("vaccine_shipment.json"), &p);
  EXPECT_EQ(c.chain.gst_interval_ms, 5000);
  EXPECT_EQ(c.chain.sync_period_ms, 2000);
  EXPECT_EQ(c.device.processing_delay.max_ms(), 118);
  EXPECT_EQ(c.channel.jam_windows.size(), 2u);
}

TEST(Config, MissingOrMalformedFiles) {
  EXPECT_THROW(load_run_config("/nonexistent/scenario.json", nullptr), ConfigError);
  fs::path bad = fs::temp_directory_path() / "trustsim_bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_THROW(load_run_config(bad, nullptr), ConfigError);
  fs::path no_device = write_temp("trustsim_nodevice.json", to_json(testing::quiet_config(1000).scenario));
  EXPECT_THROW(load_run_config(no_device, nullptr), ConfigError);
}

TEST(Config, AckMustBeAbleToBeatTheTimeout) {
  RunConfig c = testing::quiet_config(100000, 1000);
  c.device.processing_delay = Sampler::constant(500);
  c.channel.latency = Sampler::constant(250);
  EXPECT_THROW(c.validate(), ConfigError);
  c.channel.latency = Sampler::constant(249);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ScenarioErrorsSurfaceAsScenarioError) {
  json j = to_json(testing::quiet_config(1000).scenario);
  j.erase("route");
  EXPECT_THROW(scenario_from_json(j), ScenarioError);
}

}  // namespace
}  // namespace trustsim
