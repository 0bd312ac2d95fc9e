#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "trustsim/crypto.hpp"
#include "trustsim/encoding.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {
namespace {

using testing::test_keys;
using testing::test_session;

AgentKeys test_agent() {
  Seed s;
  s.fill(0x42);
  return agent_keygen(s, "agent-0");
}

// RFC 8032, section 7.1, test 1.
TEST(Crypto, Ed25519ReferenceVector) {
  Bytes sk = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  Bytes pk = from_hex("d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  SigningSecret secret;
  std::copy(sk.begin(), sk.end(), secret.bytes.begin());
  std::copy(pk.begin(), pk.end(), secret.bytes.begin() + 32);
  PublicKey public_key;
  std::copy(pk.begin(), pk.end(), public_key.begin());

  Bytes sig = sign({}, secret);
  EXPECT_EQ(to_hex(sig),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(verify({}, sig, public_key));
}

TEST(Crypto, KeygenIsDeterministic) {
  DeviceKeys a = test_keys(0), b = test_keys(0);
  EXPECT_EQ(a.public_key, b.public_key);
  EXPECT_EQ(a.master_secret, b.master_secret);
  EXPECT_NE(test_keys(0).public_key, test_keys(1).public_key);
}

TEST(Crypto, PublicKeyIsDerivedFromSigningSecret) {
  DeviceKeys k = test_keys(9);
  EXPECT_TRUE(std::equal(k.public_key.begin(), k.public_key.end(), k.signing_secret.bytes.begin() + 32));
  EXPECT_NE(k.master_secret, (std::array<std::uint8_t, 32>{}));
}

TEST(Crypto, SignVerifyRoundTripIncludingEmptyData) {
  DeviceKeys k = test_keys(3);
  Bytes data{1, 2, 3};
  EXPECT_TRUE(verify(data, sign(data, k.signing_secret), k.public_key));
  EXPECT_TRUE(verify({}, sign({}, k.signing_secret), k.public_key));
}

TEST(Crypto, TamperedDataOrForeignKeyFailsVerification) {
  DeviceKeys a = test_keys(3), b = test_keys(4);
  Bytes body = encode(RecordBody{10000, {0, 14.0, 36.1, 120.4}});
  Bytes sig = sign(body, a.signing_secret);
  Bytes tampered = body;
  tampered[5] ^= 0x01;
  EXPECT_FALSE(verify(tampered, sig, a.public_key));
  EXPECT_FALSE(verify(body, sig, b.public_key));
  Bytes short_sig(sig.begin(), sig.end() - 1);
  EXPECT_FALSE(verify(body, short_sig, a.public_key));
  EXPECT_FALSE(verify(body, {}, a.public_key));
}

TEST(Crypto, KdfIsDeterministicUnderAFixedSeed) {
  DeviceKeys k = test_keys(5);
  AgentKeys agent = test_agent();
  Rng r1(11), r2(11), r3(12);
  SessionOffer a = kdf(k, agent.identity, r1);
  SessionOffer b = kdf(k, agent.identity, r2);
  SessionOffer c = kdf(k, agent.identity, r3);
  EXPECT_EQ(a.key, b.key);
  EXPECT_EQ(a.distribution, b.distribution);
  EXPECT_NE(a.key, c.key);
}

TEST(Crypto, AgentRecoversTheSessionKey) {
  DeviceKeys k = test_keys(5);
  AgentKeys agent = test_agent();
  Rng rng(1);
  SessionOffer offer = kdf(k, agent.identity, rng);
  EXPECT_TRUE(verify(offer.distribution, offer.signature, k.public_key));
  auto key = accept_session(offer.distribution, offer.signature, k.public_key, agent);
  ASSERT_TRUE(key.has_value());
  EXPECT_EQ(*key, offer.key);
}

TEST(Crypto, TamperedDistributionIsRejected) {
  DeviceKeys k = test_keys(5);
  AgentKeys agent = test_agent();
  Rng rng(1);
  SessionOffer offer = kdf(k, agent.identity, rng);
  Bytes bad = offer.distribution;
  bad[40] ^= 0x80;
  EXPECT_FALSE(verify(bad, offer.signature, k.public_key));
  EXPECT_FALSE(accept_session(bad, offer.signature, k.public_key, agent).has_value());

  Seed other;
  other.fill(0x43);
  AgentKeys wrong_agent = agent_keygen(other, "agent-1");
  EXPECT_FALSE(accept_session(offer.distribution, offer.signature, k.public_key, wrong_agent).has_value());
}

TEST(Crypto, MasterSecretNeverAppearsInTheDistribution) {
  DeviceKeys k = test_keys(5);
  Rng rng(1);
  SessionOffer offer = kdf(k, test_agent().identity, rng);
  std::string hay = to_hex(offer.distribution) + to_hex(offer.signature);
  EXPECT_EQ(hay.find(to_hex(k.master_secret)), std::string::npos);
  EXPECT_EQ(to_hex(offer.distribution).find(to_hex(offer.key.bytes)), std::string::npos);
}

TEST(Crypto, ThousandDerivedKeysArePairwiseDistinct) {
  DeviceKeys k = test_keys(5);
  AgentKeys agent = test_agent();
  Rng rng(99);
  std::set<std::array<std::uint8_t, 32>> keys;
  for (int i = 0; i < 1000; ++i) keys.insert(kdf(k, agent.identity, rng).key.bytes);
  EXPECT_EQ(keys.size(), 1000u);
}

// Reference ciphertext from Python's cryptography ChaCha20Poly1305.
TEST(Crypto, SealMatchesReferenceCiphertext) {
  SessionKey key;
  for (std::size_t i = 0; i < key.bytes.size(); ++i) key.bytes[i] = static_cast<std::uint8_t>(i);
  Bytes sealed = seal(as_bytes("hello"), key, 7, as_bytes("vaccine-box-1"));
  EXPECT_EQ(to_hex(sealed), "00000000000000074023792f2114cd7e125aaaa0c1fa127572eeacd318");
  EXPECT_EQ(sealed_counter(sealed), 7u);
}

TEST(Crypto, SealOpenRoundTrip) {
  SessionKey key = test_session(1);
  Record r{10000, {0, 14.0, 36.1, 120.4}, Bytes(64, 1)};
  Bytes payload = encode(RecordBatch{{r}});
  Bytes sealed = seal(payload, key, 1, as_bytes("dev"));
  EXPECT_EQ(open(sealed, key, as_bytes("dev")), payload);
}

TEST(Crypto, OpenRejectsWrongKeyContextTruncationAndCounterSwap) {
  SessionKey key = test_session(1);
  Bytes sealed = seal(as_bytes("payload"), key, 3, as_bytes("dev"));
  EXPECT_THROW(open(sealed, test_session(2), as_bytes("dev")), OpenError);
  EXPECT_THROW(open(sealed, key, as_bytes("other")), OpenError);
  Bytes cut(sealed.begin(), sealed.end() - 1);
  EXPECT_THROW(open(cut, key, as_bytes("dev")), OpenError);
  Bytes swapped = sealed;
  swapped[7] = 4;
  EXPECT_THROW(open(swapped, key, as_bytes("dev")), OpenError);
  EXPECT_THROW(open(Bytes{1, 2, 3}, key, as_bytes("dev")), OpenError);
}

TEST(Crypto, NonceCounterStartsAtOneAndIncrements) {
  NonceCounter c;
  EXPECT_EQ(c.peek(), 1u);
  EXPECT_EQ(c.next(), 1u);
  EXPECT_EQ(c.next(), 2u);
  EXPECT_EQ(c.peek(), 3u);
}

}  // namespace
}  // namespace trustsim
