#pragma once

// Device key material, session-key derivation and distribution, record
// signatures and authenticated sealing of uploads.
//
// Primitives (libsodium): Ed25519 signatures, keyed BLAKE2b as the PRF behind
// the session-key derivation, X25519 + XSalsa20-Poly1305 for handing the
// session key to the agent, ChaCha20-Poly1305 (IETF) for sealing uploads.
// Every operation is deterministic given its inputs; entropy comes from the
// caller's seeded Rng.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "trustsim/sampling.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

using Seed = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;

struct SigningSecret {
  std::array<std::uint8_t, 64> bytes{};
};

// Never serialized: nothing in the library writes master_secret anywhere.
struct DeviceKeys {
  std::array<std::uint8_t, 32> master_secret{};
  SigningSecret signing_secret;
  PublicKey public_key{};
};

struct SessionKey {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> bytes{};

  bool operator==(const SessionKey&) const = default;
};

struct AgentIdentity {
  PublicKey public_key{};
  std::string address;
};

struct AgentKeys {
  AgentIdentity identity;
  std::array<std::uint8_t, 32> secret{};
};

// What the device sends to the agent once, at start-up.
struct SessionOffer {
  SessionKey key;  // kept by the device
  Bytes distribution;
  Bytes signature;
};

DeviceKeys keygen(const Seed& seed);
AgentKeys agent_keygen(const Seed& seed, std::string address);

Bytes sign(std::span<const std::uint8_t> data, const SigningSecret& secret);
// False for any malformed or non-matching signature; never throws.
bool verify(std::span<const std::uint8_t> data, std::span<const std::uint8_t> signature, const PublicKey& pk);

SessionOffer kdf(const DeviceKeys& keys, const AgentIdentity& agent, Rng& rng);

// Agent side: decrypt the distribution and check the device signature on it.
std::optional<SessionKey> accept_session(std::span<const std::uint8_t> distribution,
                                         std::span<const std::uint8_t> signature,
                                         const PublicKey& device_pk, const AgentKeys& agent);

// Per-key monotonic counter; each value is used for exactly one seal.
class NonceCounter {
 public:
  std::uint64_t next() { return next_++; }
  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_ = 1;
};

// Output layout: counter (u64 BE) || ciphertext || tag. The associated data
// is `context || counter`, binding the ciphertext to the sender and position.
Bytes seal(std::span<const std::uint8_t> plaintext, const SessionKey& key, std::uint64_t counter,
           std::span<const std::uint8_t> context);

// Throws OpenError if the ciphertext was modified, truncated, or sealed under
// a different key or context.
Bytes open(std::span<const std::uint8_t> sealed, const SessionKey& key, std::span<const std::uint8_t> context);

// Counter stored in a sealed message (0 if too short to hold one).
std::uint64_t sealed_counter(std::span<const std::uint8_t> sealed);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace trustsim
