#pragma once

// Partially-synchronous blockchain model. A block production process starts
// at every GST, lasts l1 in (0, L], and at BCT = GST + l1 the block lands on
// every correct node at once. A transaction is included in the first block
// whose GST is strictly after its arrival in the pool.
//
// The agent front-end (agent_receive) opens uploads, verifies signatures,
// deduplicates by (device, timestamp) and pools fresh records.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "trustsim/crypto.hpp"
#include "trustsim/sampling.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

enum class GstMode { kConstant, kBoundedRandom };

struct ChainParams {
  std::size_t nodes = 6;
  std::size_t byzantine = 1;
  GstMode gst_mode = GstMode::kConstant;
  double gst_interval_ms = 36.0;                    // constant mode
  double gst_bound_ms = 0.0;                        // bounded-random mode
  Sampler gst_sampler = Sampler::constant(36.0);    // bounded-random mode
  double sync_period_ms = 36.0;                     // L
  Sampler commit_duration = Sampler::uniform(35.7, 36.0);  // l1

  double max_gst_interval_ms() const;
  double min_gst_interval_ms() const;
  // Throws ConfigError.
  void validate() const;
};

struct Transaction {
  std::string device_id;
  Micros arrival{0};
  std::variant<Record, AlarmMessage> payload;

  bool is_record() const { return std::holds_alternative<Record>(payload); }
  std::uint64_t timestamp_ms() const;
};

struct Block {
  std::uint64_t depth = 0;
  Micros gst{0};
  Micros bct{0};
  std::vector<Transaction> transactions;
};

using BlockPtr = std::shared_ptr<const Block>;

struct CommittedAlarm {
  AlarmMessage alarm;
  Micros commit_time{0};
  std::uint64_t depth = 0;
};

class Chain {
 public:
  explicit Chain(ChainParams params);

  const ChainParams& params() const { return params_; }

  // Pools the transaction unless (device, kind, timestamp) was pooled before.
  bool submit(Transaction tx);
  bool known(const std::string& device_id, bool is_record, std::uint64_t timestamp_ms) const;
  std::size_t pool_size() const { return pool_.size(); }

  // Advances the GST schedule: previous GST + a constant or sampled interval.
  Micros next_gst(Rng& rng);
  Micros previous_gst() const { return previous_gst_; }

  // Takes every pooled transaction that arrived strictly before `gst`.
  Block produce_block(Micros gst, Rng& rng);
  Block produce_block(Micros gst, Micros l1);

  // Appends to every node's ledger; call at block.bct.
  void commit(Block block);

  // Read from the correct nodes, which must agree.
  DigitalEntity query_entity(const std::string& device_id) const;
  std::vector<CommittedAlarm> query_alarms(const std::string& device_id) const;

  // Raw view of one node, byzantine nodes included.
  DigitalEntity node_entity(std::size_t node, const std::string& device_id) const;
  std::span<const BlockPtr> node_view(std::size_t node) const;
  bool is_correct(std::size_t node) const { return node < params_.nodes - params_.byzantine; }

  std::optional<Micros> last_commit() const { return last_commit_; }
  std::uint64_t height() const { return next_depth_ - 1; }

 private:
  DigitalEntity entity_from(std::span<const BlockPtr> blocks, const std::string& device_id) const;

  ChainParams params_;
  std::vector<Transaction> pool_;
  std::set<std::tuple<std::string, bool, std::uint64_t>> seen_;
  std::vector<std::vector<BlockPtr>> ledgers_;
  Micros previous_gst_{0};
  std::uint64_t next_depth_ = 1;
  std::optional<Micros> last_commit_;
};

struct Ack {
  std::uint64_t message_id = 0;
  std::vector<std::uint64_t> fresh;
  std::vector<std::uint64_t> duplicates;
};

struct Reject {
  std::uint64_t message_id = 0;
  std::string reason;
};

using AgentReply = std::variant<Ack, Reject>;

// All-or-nothing per message: any open or signature failure pools nothing.
AgentReply agent_receive(Chain& chain, const UploadMessage& upload, Micros arrival, const SessionKey& session,
                         const PublicKey& device_pk);

// Alarms travel signed but unsealed. Returns true if pooled.
bool agent_receive_alarm(Chain& chain, const std::string& device_id, const AlarmMessage& alarm, Micros arrival,
                         const PublicKey& device_pk);

}  // namespace trustsim
