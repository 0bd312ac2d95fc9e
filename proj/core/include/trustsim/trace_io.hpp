#pragma once

// JSON Lines trace and ledger files. See docs/formats.md.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trustsim/config.hpp"
#include "trustsim/sim.hpp"

namespace trustsim {

inline constexpr const char* kTraceFormat = "trustsim-trace/1";

// header, events, one "record" line per sensed record, end.
void write_trace(std::ostream& out, const Trace& trace);
// The commit lines only.
void write_ledger(std::ostream& out, const Trace& trace);

// What an auditor can recover from a trace file.
struct LoadedTrace {
  std::uint64_t seed = 0;
  std::string device_id;
  PublicKey device_pk{};
  RunConfig config;
  DigitalEntity entity;
  std::vector<AlarmMessage> committed_alarms;
  std::vector<RecordLifecycle> lifecycle;
  std::string status;  // "running" or "failed"
  std::string reason;
};

// Throws TraceFormatError.
LoadedTrace read_trace(std::istream& in);

}  // namespace trustsim
