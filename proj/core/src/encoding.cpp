#include "trustsim/encoding.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

class Writer {
 public:
  explicit Writer(Tag tag) { out_.push_back(static_cast<std::uint8_t>(tag)); }

  void u8(std::uint8_t v) { out_.push_back(v); }

  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  void u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  void f64(double v, const char* field) {
    if (!std::isfinite(v)) throw EncodingError(std::string("non-finite value in field ") + field);
    u64(std::bit_cast<std::uint64_t>(v));
  }

  void bytes(std::span<const std::uint8_t> b) {
    if (b.size() > std::numeric_limits<std::uint32_t>::max()) throw EncodingError("byte string too long");
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }

  void str(const std::string& s) {
    bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }

  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, Tag expected) : in_(in) {
    if (in_.empty()) throw DecodeError("empty input");
    if (in_[0] != static_cast<std::uint8_t>(expected)) throw DecodeError("tag mismatch");
    pos_ = 1;
  }

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  double f64() {
    double v = std::bit_cast<double>(u64());
    if (!std::isfinite(v)) throw DecodeError("non-finite float");
    return v;
  }

  Bytes bytes() {
    std::uint32_t n = u32();
    need(n);
    Bytes b(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return b;
  }

  std::string str() {
    Bytes b = bytes();
    return {b.begin(), b.end()};
  }

  // Nested value: a complete tagged encoding of unknown length follows.
  std::span<const std::uint8_t> rest() const { return in_.subspan(pos_); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

  void finish() const {
    if (pos_ != in_.size()) throw DecodeError("trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("truncated input");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put_reading(Writer& w, const SensorReading& r) {
  if (r.brightness > 1) throw EncodingError("brightness flag must be 0 or 1");
  w.u8(r.brightness);
  w.f64(r.temperature_c, "temperature");
  w.f64(r.latitude, "latitude");
  w.f64(r.longitude, "longitude");
}

SensorReading get_reading(Reader& r) {
  SensorReading out;
  out.brightness = r.u8();
  out.temperature_c = r.f64();
  out.latitude = r.f64();
  out.longitude = r.f64();
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
  return out;
}

void put_messages(Writer& w, const std::vector<std::string>& messages) {
  w.u32(static_cast<std::uint32_t>(messages.size()));
  for (const auto& m : messages) w.str(m);
}

std::vector<std::string> get_messages(Reader& r) {
  std::uint32_t n = r.u32();
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(r.str());
  return out;
}

// Length of the complete Record encoding at the start of `bytes`.
std::size_t record_length(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kFixed = 1 + 8 + 1 + 3 * 8;
  if (bytes.size() < kFixed + 4) throw DecodeError("truncated input");
  std::size_t sig = (std::size_t{bytes[kFixed]} << 24) | (std::size_t{bytes[kFixed + 1]} << 16) |
                    (std::size_t{bytes[kFixed + 2]} << 8) | std::size_t{bytes[kFixed + 3]};
  std::size_t total = kFixed + 4 + sig;
  if (bytes.size() < total) throw DecodeError("truncated input");
  return total;
}

}  // namespace

Bytes encode(const SensorReading& value) {
  Writer w(Tag::kSensorReading);
  put_reading(w, value);
  return w.take();
}

Bytes encode(const RecordBody& value) {
  Writer w(Tag::kRecordBody);
  w.u64(value.timestamp_ms);
  put_reading(w, value.reading);
  return w.take();
}

Bytes encode(const Record& value) {
  Writer w(Tag::kRecord);
  w.u64(value.timestamp_ms);
  put_reading(w, value.reading);
  w.bytes(value.signature);
  return w.take();
}

Bytes encode(const AlarmBody& value) {
  Writer w(Tag::kAlarmBody);
  w.u64(value.timestamp_ms);
  put_messages(w, value.messages);
  return w.take();
}

Bytes encode(const AlarmMessage& value) {
  Writer w(Tag::kAlarmMessage);
  w.u64(value.timestamp_ms);
  put_messages(w, value.messages);
  w.bytes(value.signature);
  return w.take();
}

Bytes encode(const RecordBatch& value) {
  Writer w(Tag::kRecordBatch);
  w.u32(static_cast<std::uint32_t>(value.records.size()));
  for (const auto& rec : value.records) w.raw(encode(rec));
  return w.take();
}

template <>
SensorReading decode<SensorReading>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kSensorReading);
  SensorReading out = get_reading(r);
  r.finish();
  return out;
}

template <>
RecordBody decode<RecordBody>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kRecordBody);
  RecordBody out;
  out.timestamp_ms = r.u64();
  out.reading = get_reading(r);
  r.finish();
  return out;
}

template <>
Record decode<Record>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kRecord);
  Record out;
  out.timestamp_ms = r.u64();
  out.reading = get_reading(r);
  out.signature = r.bytes();
  r.finish();
  return out;
}

template <>
AlarmBody decode<AlarmBody>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kAlarmBody);
  AlarmBody out;
  out.timestamp_ms = r.u64();
  out.messages = get_messages(r);
  r.finish();
  return out;
}

template <>
AlarmMessage decode<AlarmMessage>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kAlarmMessage);
  AlarmMessage out;
  out.timestamp_ms = r.u64();
  out.messages = get_messages(r);
  out.signature = r.bytes();
  r.finish();
  return out;
}

template <>
RecordBatch decode<RecordBatch>(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Tag::kRecordBatch);
  std::uint32_t n = r.u32();
  RecordBatch out;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto rest = r.rest();
    std::size_t len = record_length(rest);
    out.records.push_back(decode<Record>(rest.first(len)));
    r.skip(len);
  }
  r.finish();
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw DecodeError("invalid hex digit");
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

}  // namespace trustsim
