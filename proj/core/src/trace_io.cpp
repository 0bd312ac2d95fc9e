#include "trustsim/trace_io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "trustsim/encoding.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json lifecycle_line(const RecordLifecycle& r) {
  ordered_json j{{"type", "record"},     {"t", r.timestamp_ms},         {"L", r.reading.brightness},
                 {"K", r.reading.temperature_c}, {"x", r.reading.latitude}, {"y", r.reading.longitude},
                 {"sensed_us", r.sensed_at.count()}};
  auto put = [&j](const char* key, const std::optional<Micros>& t) {
    j[key] = t ? ordered_json(t->count()) : ordered_json(nullptr);
  };
  put("sent_us", r.sent_at);
  put("arrived_us", r.arrived_at);
  put("gst_us", r.block_gst);
  put("bct_us", r.committed_at);
  j["depth"] = r.depth;
  j["resends"] = r.resend_count;
  j["recovered"] = r.recovered;
  return j;
}

std::optional<Micros> us_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return Micros{v.get<std::int64_t>()};
}

SensorReading reading_from(const json& j) {
  SensorReading c;
  c.brightness = j.at("L").get<std::uint8_t>();
  c.temperature_c = j.at("K").get<double>();
  c.latitude = j.at("x").get<double>();
  c.longitude = j.at("y").get<double>();
  return c;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
  ordered_json header{{"type", "header"},
                      {"format", kTraceFormat},
                      {"seed", trace.seed},
                      {"device_id", trace.config.device.device_id},
                      {"tee_pk", to_hex(trace.device_pk)},
                      {"config", to_json(trace.config)}};
  out << header.dump() << '\n';
  for (const auto& e : trace.events) out << e.dump() << '\n';
  for (const auto& r : trace.lifecycle) out << lifecycle_line(r).dump() << '\n';
  ordered_json end{{"type", "end"},
                   {"status", trace.status.failed() ? "failed" : "running"},
                   {"reason", trace.status.reason},
                   {"end_us", trace.end_time.count()}};
  end["as_of_us"] = trace.entity.as_of() ? ordered_json(trace.entity.as_of()->count()) : ordered_json(nullptr);
  out << end.dump() << '\n';
}

void write_ledger(std::ostream& out, const Trace& trace) {
  for (const auto& e : trace.events) {
    if (e.at("type") == "commit") out << e.dump() << '\n';
  }
}

LoadedTrace read_trace(std::istream& in) {
  LoadedTrace t;
  bool have_header = false;
  bool have_end = false;
  std::vector<CommittedRecord> committed;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      const std::string type = j.at("type");
      if (!have_header) {
        if (type != "header") throw TraceFormatError("first line is not a header");
        if (j.at("format") != kTraceFormat) throw TraceFormatError("unsupported format");
        t.seed = j.at("seed");
        t.device_id = j.at("device_id");
        Bytes pk = from_hex(j.at("tee_pk").get<std::string>());
        if (pk.size() != t.device_pk.size()) throw TraceFormatError("bad public key length");
        std::copy(pk.begin(), pk.end(), t.device_pk.begin());
        t.config = run_config_from_json(j.at("config"));
        t.entity = DigitalEntity(t.device_id);
        have_header = true;
        continue;
      }
      if (have_end) throw TraceFormatError("content after the end line");
      if (type == "commit") {
        if (j.at("device") != t.device_id) continue;
        Micros bct{j.at("bct_us").get<std::int64_t>()};
        std::uint64_t depth = j.at("depth");
        if (j.at("kind") == "record") {
          Record r;
          r.timestamp_ms = j.at("t");
          r.reading = reading_from(j);
          r.signature = from_hex(j.at("pi").get<std::string>());
          committed.push_back({std::move(r), bct, depth});
        } else {
          AlarmMessage a;
          a.timestamp_ms = j.at("t");
          a.messages = j.at("messages").get<std::vector<std::string>>();
          a.signature = from_hex(j.at("pi").get<std::string>());
          t.committed_alarms.push_back(std::move(a));
        }
      } else if (type == "record") {
        RecordLifecycle r;
        r.timestamp_ms = j.at("t");
        r.reading = reading_from(j);
        r.sensed_at = Micros{j.at("sensed_us").get<std::int64_t>()};
        r.sent_at = us_field(j, "sent_us");
        r.arrived_at = us_field(j, "arrived_us");
        r.block_gst = us_field(j, "gst_us");
        r.committed_at = us_field(j, "bct_us");
        r.depth = j.at("depth");
        r.resend_count = j.at("resends");
        r.recovered = j.at("recovered");
        t.lifecycle.push_back(std::move(r));
      } else if (type == "end") {
        t.status = j.at("status");
        t.reason = j.at("reason");
        if (auto as_of = us_field(j, "as_of_us")) t.entity.set_as_of(*as_of);
        have_end = true;
      }
    } catch (const std::exception& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceFormatError("empty trace");
  if (!have_end) throw TraceFormatError("trace is truncated: no end line");
  std::stable_sort(committed.begin(), committed.end(), [](const CommittedRecord& a, const CommittedRecord& b) {
    return a.depth != b.depth ? a.depth < b.depth : a.record.timestamp_ms < b.record.timestamp_ms;
  });
  try {
    for (auto& r : committed) t.entity.append(std::move(r));
  } catch (const std::invalid_argument& e) {
    throw TraceFormatError(std::string("ledger: ") + e.what());
  }
  return t;
}

}  // namespace trustsim
