#include <benchmark/benchmark.h>

#include "trustsim/config.hpp"
#include "trustsim/device.hpp"
#include "trustsim/encoding.hpp"
#include "trustsim/sim.hpp"
#include "trustsim/verifier.hpp"

namespace {

using namespace trustsim;

DeviceKeys bench_keys() {
  Seed s{};
  s.fill(3);
  return keygen(s);
}

Record sample_record(const DeviceKeys& keys) {
  return make_record(600000, {1, 24.0, 36.1, 120.44}, keys.signing_secret);
}

RunConfig shipment() {
  return load_run_config(std::string(TRUSTSIM_SCENARIO_DIR) + "/vaccine_shipment.json", nullptr);
}

void BM_EncodeRecord(benchmark::State& state) {
  Record r = sample_record(bench_keys());
  for (auto _ : state) benchmark::DoNotOptimize(encode(r));
}
BENCHMARK(BM_EncodeRecord);

void BM_DecodeRecord(benchmark::State& state) {
  Bytes b = encode(sample_record(bench_keys()));
  for (auto _ : state) benchmark::DoNotOptimize(decode<Record>(b));
}
BENCHMARK(BM_DecodeRecord);

void BM_SignRecord(benchmark::State& state) {
  DeviceKeys keys = bench_keys();
  SensorReading c{0, 14.0, 36.1, 120.4};
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_record(t += 10000, c, keys.signing_secret));
}
BENCHMARK(BM_SignRecord);

void BM_VerifyRecord(benchmark::State& state) {
  DeviceKeys keys = bench_keys();
  Record r = sample_record(keys);
  for (auto _ : state) benchmark::DoNotOptimize(verify_record(r, keys.public_key));
}
BENCHMARK(BM_VerifyRecord);

void BM_SealOpen(benchmark::State& state) {
  SessionKey key;
  key.bytes.fill(7);
  Bytes payload(static_cast<std::size_t>(state.range(0)), 0xab);
  auto context = as_bytes("vaccine-box-1");
  std::uint64_t counter = 0;
  for (auto _ : state) benchmark::DoNotOptimize(open(seal(payload, key, ++counter, context), key, context));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SealOpen)->Arg(100)->Arg(600);

void BM_ShipmentRun(benchmark::State& state) {
  RunConfig c = shipment();
  for (auto _ : state) benchmark::DoNotOptimize(run(c, 42));
}
BENCHMARK(BM_ShipmentRun)->Unit(benchmark::kMillisecond);

void BM_AuditShipment(benchmark::State& state) {
  RunConfig c = shipment();
  Trace t = run(c, 42);
  TimingParams p = timing_params(c);
  for (auto _ : state) benchmark::DoNotOptimize(audit(t.entity, t.device_pk, p));
}
BENCHMARK(BM_AuditShipment)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
