#pragma once

// Canonical, bit-exact encoding used for signatures, sealing and hashing.
//
// Every value starts with a one-byte tag. Integers are big-endian, floats are
// IEEE-754 binary64 bit patterns stored big-endian, byte strings and UTF-8
// strings carry a u32 big-endian length prefix. See docs/formats.md.

#include <cstdint>
#include <span>

#include "trustsim/types.hpp"

namespace trustsim {

enum class Tag : std::uint8_t {
  kSensorReading = 0x01,
  kRecordBody = 0x02,
  kRecord = 0x03,
  kAlarmBody = 0x04,
  kAlarmMessage = 0x05,
  kRecordBatch = 0x06,
};

Bytes encode(const SensorReading& value);
Bytes encode(const RecordBody& value);
Bytes encode(const Record& value);
Bytes encode(const AlarmBody& value);
Bytes encode(const AlarmMessage& value);
Bytes encode(const RecordBatch& value);

// Throws DecodeError on truncation, trailing bytes, tag mismatch or an
// out-of-range field.
template <class T>
T decode(std::span<const std::uint8_t> bytes);

template <>
SensorReading decode<SensorReading>(std::span<const std::uint8_t> bytes);
template <>
RecordBody decode<RecordBody>(std::span<const std::uint8_t> bytes);
template <>
Record decode<Record>(std::span<const std::uint8_t> bytes);
template <>
AlarmBody decode<AlarmBody>(std::span<const std::uint8_t> bytes);
template <>
AlarmMessage decode<AlarmMessage>(std::span<const std::uint8_t> bytes);
template <>
RecordBatch decode<RecordBatch>(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);  // throws DecodeError

}  // namespace trustsim
