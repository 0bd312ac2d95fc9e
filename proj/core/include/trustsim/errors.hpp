#pragma once

#include <stdexcept>
#include <string>

namespace trustsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value cannot be put into canonical form (non-finite float, broken invariant).
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Byte sequence is truncated, carries the wrong tag, or holds an invalid value.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Authenticated decryption failed: wrong key or modified ciphertext.
class OpenError : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AuditError : public Error {
 public:
  using Error::Error;
};

class TraceFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace trustsim
