#include "trustsim/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

std::array<std::uint8_t, 32> keyed_hash(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  std::array<std::uint8_t, 32> out{};
  crypto_generichash(out.data(), out.size(), message.data(), message.size(), key.data(), key.size());
  return out;
}

constexpr std::size_t kCounterBytes = 8;
constexpr std::size_t kTagBytes = crypto_aead_chacha20poly1305_ietf_ABYTES;

std::array<std::uint8_t, crypto_aead_chacha20poly1305_ietf_NPUBBYTES> nonce_for(std::uint64_t counter) {
  std::array<std::uint8_t, crypto_aead_chacha20poly1305_ietf_NPUBBYTES> nonce{};
  for (std::size_t i = 0; i < kCounterBytes; ++i) {
    nonce[nonce.size() - 1 - i] = static_cast<std::uint8_t>(counter >> (8 * i));
  }
  return nonce;
}

Bytes associated_data(std::span<const std::uint8_t> context, std::uint64_t counter) {
  Bytes ad(context.begin(), context.end());
  for (int shift = 56; shift >= 0; shift -= 8) ad.push_back(static_cast<std::uint8_t>(counter >> shift));
  return ad;
}

// Nonce for the distribution box: BLAKE2b(epk || recipient_pk), as in libsodium's sealed boxes.
std::array<std::uint8_t, crypto_box_NONCEBYTES> box_nonce(const PublicKey& ephemeral, const PublicKey& recipient) {
  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, ephemeral.data(), ephemeral.size());
  crypto_generichash_update(&st, recipient.data(), recipient.size());
  crypto_generichash_final(&st, nonce.data(), nonce.size());
  return nonce;
}

}  // namespace

DeviceKeys keygen(const Seed& seed) {
  ensure_sodium();
  DeviceKeys keys;
  keys.master_secret = keyed_hash(seed, as_bytes("trustsim/master-secret"));
  auto signing_seed = keyed_hash(seed, as_bytes("trustsim/signing-seed"));
  crypto_sign_seed_keypair(keys.public_key.data(), keys.signing_secret.bytes.data(), signing_seed.data());
  sodium_memzero(signing_seed.data(), signing_seed.size());
  return keys;
}

AgentKeys agent_keygen(const Seed& seed, std::string address) {
  ensure_sodium();
  AgentKeys keys;
  keys.identity.address = std::move(address);
  crypto_box_seed_keypair(keys.identity.public_key.data(), keys.secret.data(), seed.data());
  return keys;
}

Bytes sign(std::span<const std::uint8_t> data, const SigningSecret& secret) {
  ensure_sodium();
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, data.data(), data.size(), secret.bytes.data());
  return sig;
}

bool verify(std::span<const std::uint8_t> data, std::span<const std::uint8_t> signature, const PublicKey& pk) {
  ensure_sodium();
  if (signature.size() != crypto_sign_BYTES) return false;
  return crypto_sign_verify_detached(signature.data(), data.data(), data.size(), pk.data()) == 0;
}

SessionOffer kdf(const DeviceKeys& keys, const AgentIdentity& agent, Rng& rng) {
  ensure_sodium();
  SessionOffer offer;

  std::array<std::uint8_t, 32> fresh{};
  rng.fill(fresh);
  Bytes input(agent.public_key.begin(), agent.public_key.end());
  input.insert(input.end(), fresh.begin(), fresh.end());
  offer.key.bytes = keyed_hash(keys.master_secret, input);

  // Ephemeral X25519 pair from the seeded source; distribution = epk || box(sym_sk).
  Seed ephemeral_seed{};
  rng.fill(ephemeral_seed);
  PublicKey epk{};
  std::array<std::uint8_t, 32> esk{};
  crypto_box_seed_keypair(epk.data(), esk.data(), ephemeral_seed.data());
  auto nonce = box_nonce(epk, agent.public_key);

  offer.distribution.assign(epk.begin(), epk.end());
  offer.distribution.resize(epk.size() + crypto_box_MACBYTES + SessionKey::kSize);
  int rc = crypto_box_easy(offer.distribution.data() + epk.size(), offer.key.bytes.data(), SessionKey::kSize,
                           nonce.data(), agent.public_key.data(), esk.data());
  sodium_memzero(esk.data(), esk.size());
  if (rc != 0) throw std::invalid_argument("agent public key is not usable for key exchange");

  offer.signature = sign(offer.distribution, keys.signing_secret);
  return offer;
}

std::optional<SessionKey> accept_session(std::span<const std::uint8_t> distribution,
                                         std::span<const std::uint8_t> signature,
                                         const PublicKey& device_pk, const AgentKeys& agent) {
  ensure_sodium();
  if (!verify(distribution, signature, device_pk)) return std::nullopt;
  constexpr std::size_t kExpected = 32 + crypto_box_MACBYTES + SessionKey::kSize;
  if (distribution.size() != kExpected) return std::nullopt;
  PublicKey epk{};
  std::copy_n(distribution.begin(), epk.size(), epk.begin());
  auto nonce = box_nonce(epk, agent.identity.public_key);
  SessionKey key;
  auto box = distribution.subspan(epk.size());
  if (crypto_box_open_easy(key.bytes.data(), box.data(), box.size(), nonce.data(), epk.data(), agent.secret.data()) !=
      0) {
    return std::nullopt;
  }
  return key;
}

Bytes seal(std::span<const std::uint8_t> plaintext, const SessionKey& key, std::uint64_t counter,
           std::span<const std::uint8_t> context) {
  ensure_sodium();
  auto nonce = nonce_for(counter);
  auto ad = associated_data(context, counter);
  Bytes out(kCounterBytes + plaintext.size() + kTagBytes);
  for (std::size_t i = 0; i < kCounterBytes; ++i) out[i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
  unsigned long long written = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(out.data() + kCounterBytes, &written, plaintext.data(), plaintext.size(),
                                            ad.data(), ad.size(), nullptr, nonce.data(), key.bytes.data());
  out.resize(kCounterBytes + written);
  return out;
}

std::uint64_t sealed_counter(std::span<const std::uint8_t> sealed) {
  if (sealed.size() < kCounterBytes) return 0;
  std::uint64_t counter = 0;
  for (std::size_t i = 0; i < kCounterBytes; ++i) counter = (counter << 8) | sealed[i];
  return counter;
}

Bytes open(std::span<const std::uint8_t> sealed, const SessionKey& key, std::span<const std::uint8_t> context) {
  ensure_sodium();
  if (sealed.size() < kCounterBytes + kTagBytes) throw OpenError("sealed message too short");
  std::uint64_t counter = sealed_counter(sealed);
  auto nonce = nonce_for(counter);
  auto ad = associated_data(context, counter);
  auto body = sealed.subspan(kCounterBytes);
  Bytes out(body.size() - kTagBytes);
  unsigned long long written = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &written, nullptr, body.data(), body.size(), ad.data(),
                                                ad.size(), nonce.data(), key.bytes.data()) != 0) {
    throw OpenError("authentication failed");
  }
  out.resize(written);
  return out;
}

}  // namespace trustsim
