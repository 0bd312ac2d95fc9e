#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support.hpp"
#include "trustsim/encoding.hpp"
#include "trustsim/errors.hpp"
#include "trustsim/sim.hpp"
#include "trustsim/trace_io.hpp"
#include "trustsim/verifier.hpp"

namespace trustsim {
namespace {

std::string trace_text(const Trace& t) {
  std::ostringstream s;
  write_trace(s, t);
  return s.str();
}

RunConfig slow_chain_config(std::int64_t duration_ms) {
  RunConfig c = testing::quiet_config(duration_ms);
  c.chain.gst_interval_ms = 5000;
  c.chain.sync_period_ms = 2000;
  c.chain.commit_duration = Sampler::uniform(1000, 2000);
  return c;
}

TEST(Sim, SixtySecondsAtTenSecondIntervals) {
  Trace t = run(testing::quiet_config(60000), 1);
  EXPECT_EQ(t.summary.sensed, 6u);
  EXPECT_EQ(t.summary.committed, 6u);
  EXPECT_EQ(t.summary.recovered, 0u);
  EXPECT_EQ(t.summary.alarms, 0u);
  EXPECT_FALSE(t.status.failed());
  EXPECT_EQ(t.entity.size(), 6u);
}

TEST(Sim, SameSeedGivesIdenticalBytes) {
  RunConfig c = testing::quiet_config(120000);
  EXPECT_EQ(trace_text(run(c, 7)), trace_text(run(c, 7)));
  EXPECT_NE(trace_text(run(c, 7)), trace_text(run(c, 8)));
}

TEST(Sim, FirstGstIsOneIntervalAfterGenesis) {
  Trace t = run(slow_chain_config(60000), 3);
  ASSERT_TRUE(t.lifecycle[0].block_gst.has_value());
  EXPECT_EQ(*t.lifecycle[0].block_gst, from_whole_ms(5000));
  for (const auto& r : t.lifecycle) EXPECT_EQ(r.block_gst->count() % 5000000, 0);
}

TEST(Sim, CommitLatencySplitsIntoIdleTimeAndProductionTime) {
  RunConfig c = slow_chain_config(300000);
  c.device.first_tick_ms = 1234;
  Trace t = run(c, 4);
  for (const auto& r : t.lifecycle) {
    ASSERT_TRUE(r.committed());
    Micros phi = *r.block_gst - *r.arrived_at;
    Micros l1 = *r.committed_at - *r.block_gst;
    EXPECT_GT(phi, Micros{0});
    EXPECT_LE(phi, from_whole_ms(5000));
    EXPECT_GE(l1, from_whole_ms(1000));
    EXPECT_LE(l1, from_whole_ms(2000));
  }
}

TEST(Sim, RecordsAreSignedAndOnTheSensingGrid) {
  RunConfig c = testing::quiet_config(200000);
  c.device.first_tick_ms = 500;
  c.device.clock_skew_ms = 20;
  Trace t = run(c, 5);
  ASSERT_EQ(t.entity.size(), 20u);
  for (std::size_t i = 0; i < t.entity.size(); ++i) {
    const Record& r = t.entity.records()[i].record;
    EXPECT_EQ(r.timestamp_ms, 520 + 10000 * i);
    EXPECT_TRUE(verify_record(r, t.device_pk));
  }
}

TEST(Sim, InconsistentConfigFailsBeforeStart) {
  RunConfig c = testing::quiet_config(60000);
  c.chain.sync_period_ms = 100;
  c.chain.commit_duration = Sampler::constant(100);
  EXPECT_THROW(run(c, 1), ConfigError);
  c = testing::quiet_config(60000, 300);
  EXPECT_THROW(run(c, 1), ConfigError);
  c = testing::quiet_config(60000);
  c.scenario.route.clear();
  EXPECT_THROW(run(c, 1), ScenarioError);
}

TEST(Sim, DeviceFailsAfterMaxFdPlusOneLostUploads) {
  RunConfig c = testing::quiet_config(200000);
  c.channel.jam_windows = {{from_whole_ms(20000), from_whole_ms(200000)}};
  Trace t = run(c, 6);
  EXPECT_TRUE(t.status.failed());
  EXPECT_EQ(t.status.reason, "Exceed maximum recovery tolerance");
  EXPECT_EQ(t.lifecycle.size(), 9u);
  EXPECT_EQ(t.entity.size(), 2u);
  int failed_lines = 0;
  bool sensed_after = false;
  for (const auto& e : t.events) {
    if (e["type"] == "device_failed") ++failed_lines;
    if (failed_lines && e["type"] == "sense") sensed_after = true;
  }
  EXPECT_EQ(failed_lines, 1);
  EXPECT_FALSE(sensed_after);
}

TEST(Sim, AlarmsReachTheChain) {
  RunConfig c = testing::quiet_config(60000);
  c.scenario.open_intervals = {{from_whole_ms(30000), from_whole_ms(60000)}};
  Trace t = run(c, 2);
  EXPECT_EQ(t.summary.alarms, 3u);
  ASSERT_EQ(t.committed_alarms.size(), 3u);
  EXPECT_EQ(t.committed_alarms[0].alarm.timestamp_ms, 30000u);
  EXPECT_EQ(t.committed_alarms[0].alarm.messages, std::vector<std::string>{kBoxOpened});
}

TEST(Sim, MasterSecretNeverReachesTheTrace) {
  std::uint64_t seed = 11;
  Trace t = run(testing::quiet_config(60000), seed);
  Rng key_rng(derive_seed(seed, "keys"));
  Seed s{};
  key_rng.fill(s);
  DeviceKeys keys = keygen(s);
  ASSERT_EQ(keys.public_key, t.device_pk);
  std::string text = trace_text(t);
  EXPECT_EQ(text.find(to_hex(keys.master_secret)), std::string::npos);
  EXPECT_EQ(text.find(to_hex(std::span(keys.signing_secret.bytes).first(32))), std::string::npos);
}

TEST(Sim, ProcessingDelayMeanOverTenThousandRecords) {
  RunConfig c = testing::quiet_config(10000 * 1000, 1000);
  c.chain.gst_interval_ms = 500;
  c.chain.sync_period_ms = 400;
  c.chain.commit_duration = Sampler::constant(400);
  Trace t = run(c, 9);
  ASSERT_EQ(t.summary.committed, 10000u);
  LatencyStats s = latency_stats(t.lifecycle);
  EXPECT_EQ(s.eps1.count, 10000u);
  EXPECT_NEAR(s.eps1.mean, 104.0, 2.0);
  EXPECT_NEAR(s.eps2.mean, 65.0, 1.0);
}

TEST(Sim, ConstantLatencyHasZeroVariance) {
  RunConfig c = testing::quiet_config(100000);
  c.channel.latency = Sampler::constant(76.3);
  Trace t = run(c, 1);
  LatencyStats s = latency_stats(t.lifecycle);
  EXPECT_EQ(s.eps2.mean, 76.3);
  EXPECT_EQ(s.eps2.variance, 0.0);
}

TEST(Sim, LostAckIsRecoveredAndDeduplicated) {
  RunConfig c = testing::quiet_config(100000);
  c.device.processing_delay = Sampler::constant(100);
  c.channel.latency = Sampler::constant(50);
  // Opens after record 20000 is sent and before its ACK leaves the agent.
  c.channel.jam_windows = {{from_whole_ms(20120), from_whole_ms(20200)}};
  Trace t = run(c, 1);
  EXPECT_EQ(t.summary.acks_dropped, 1u);
  EXPECT_EQ(t.summary.committed, 10u);
  EXPECT_EQ(t.summary.recovered, 1u);
  EXPECT_TRUE(t.lifecycle[2].recovered);
  EXPECT_EQ(t.lifecycle[2].resend_count, 1u);
  bool saw_duplicate = false;
  for (const auto& e : t.events) {
    if (e["type"] == "deliver" && !e["duplicates"].empty()) saw_duplicate = e["duplicates"][0] == 20000;
  }
  EXPECT_TRUE(saw_duplicate);
}

TEST(Sim, EndsAfterDurationOnceQuiescent) {
  Trace t = run(testing::quiet_config(60000), 1);
  EXPECT_GE(t.end_time, from_whole_ms(60000));
  EXPECT_LE(t.end_time, from_whole_ms(60000 + 36));
  ASSERT_TRUE(t.entity.as_of().has_value());
  EXPECT_LE(*t.entity.as_of(), t.end_time);
}

}  // namespace
}  // namespace trustsim

namespace trustsim {
namespace {

// Fast first record, slow second: the gap beats dt + dGST + L by the spread
// of eps1 and stays within the jitter-extended bound.
TEST(Sim, CommitGapNeedsTheJitterTerm) {
  RunConfig c = testing::quiet_config(30000);
  c.device.first_tick_ms = 9975;
  c.device.processing_delay = Sampler::cycle({50, 158});
  c.channel.latency = Sampler::constant(80);
  c.chain.gst_interval_ms = 5053;
  c.chain.sync_period_ms = 2000;
  c.chain.commit_duration = Sampler::cycle({2000, 0.001, 2000, 2000, 2000});
  Trace t = run(c, 1);
  ASSERT_GE(t.lifecycle.size(), 2u);
  double gap = to_ms(*t.lifecycle[1].committed_at - *t.lifecycle[0].committed_at);
  EXPECT_NEAR(gap, 17158.999, 1e-9);

  TimingParams p = timing_params(c);
  EXPECT_DOUBLE_EQ(p.processing_jitter_ms, 108.0);
  EXPECT_GT(gap, 10000.0 + 5053.0 + 2000.0);
  EXPECT_LE(gap, delta_hat_bound(p));
  EXPECT_TRUE(audit(t.entity, t.device_pk, p).continuous.ok);
}

}  // namespace
}  // namespace trustsim
