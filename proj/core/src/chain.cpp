#include "trustsim/chain.hpp"

#include <algorithm>
#include <stdexcept>

#include "trustsim/device.hpp"
#include "trustsim/encoding.hpp"
#include "trustsim/errors.hpp"

namespace trustsim {

double ChainParams::max_gst_interval_ms() const {
  return gst_mode == GstMode::kConstant ? gst_interval_ms : gst_bound_ms;
}

double ChainParams::min_gst_interval_ms() const {
  return gst_mode == GstMode::kConstant ? gst_interval_ms : gst_sampler.min_ms();
}

void ChainParams::validate() const {
  if (nodes == 0) throw ConfigError("chain needs at least one node");
  if (3 * byzantine >= nodes) throw ConfigError("byzantine count must satisfy f < n/3");
  if (gst_mode == GstMode::kConstant) {
    if (!(gst_interval_ms > 0.0)) throw ConfigError("GST interval must be positive");
  } else {
    if (!(gst_bound_ms > 0.0)) throw ConfigError("GST bound must be positive");
    if (!(gst_sampler.min_ms() > 0.0)) throw ConfigError("sampled GST interval must be positive");
    if (gst_sampler.max_ms() > gst_bound_ms) throw ConfigError("GST sampler exceeds its bound");
  }
  if (!(sync_period_ms > 0.0)) throw ConfigError("synchronized period L must be positive");
  if (!(commit_duration.min_ms() > 0.0) || commit_duration.max_ms() > sync_period_ms) {
    throw ConfigError("block production time l1 must lie in (0, L]");
  }
  if (sync_period_ms > min_gst_interval_ms()) {
    throw ConfigError("L exceeds the shortest GST interval: block production would overlap");
  }
}

std::uint64_t Transaction::timestamp_ms() const {
  return std::visit([](const auto& p) { return p.timestamp_ms; }, payload);
}

Chain::Chain(ChainParams params) : params_(std::move(params)) {
  params_.validate();
  ledgers_.resize(params_.nodes);
}

bool Chain::known(const std::string& device_id, bool is_record, std::uint64_t timestamp_ms) const {
  return seen_.contains({device_id, is_record, timestamp_ms});
}

bool Chain::submit(Transaction tx) {
  auto key = std::make_tuple(tx.device_id, tx.is_record(), tx.timestamp_ms());
  if (!seen_.insert(key).second) return false;
  pool_.push_back(std::move(tx));
  return true;
}

Micros Chain::next_gst(Rng& rng) {
  Micros interval = params_.gst_mode == GstMode::kConstant ? from_ms(params_.gst_interval_ms)
                                                           : params_.gst_sampler.sample(rng);
  if (interval <= Micros{0}) interval = Micros{1};
  previous_gst_ += interval;
  return previous_gst_;
}

Block Chain::produce_block(Micros gst, Rng& rng) {
  Micros l1 = params_.commit_duration.sample(rng);
  return produce_block(gst, std::clamp(l1, Micros{1}, from_ms(params_.sync_period_ms)));
}

Block Chain::produce_block(Micros gst, Micros l1) {
  Block block;
  block.depth = next_depth_++;
  block.gst = gst;
  block.bct = gst + l1;
  auto split = std::stable_partition(pool_.begin(), pool_.end(), [gst](const Transaction& tx) { return tx.arrival < gst; });
  block.transactions.assign(std::make_move_iterator(pool_.begin()), std::make_move_iterator(split));
  pool_.erase(pool_.begin(), split);
  return block;
}

void Chain::commit(Block block) {
  auto shared = std::make_shared<const Block>(std::move(block));
  // Byzantine nodes censor: they keep the block header but drop its contents.
  auto censored = std::make_shared<Block>(*shared);
  censored->transactions.clear();
  for (std::size_t node = 0; node < params_.nodes; ++node) {
    ledgers_[node].push_back(is_correct(node) ? shared : BlockPtr(censored));
  }
  last_commit_ = shared->bct;
}

DigitalEntity Chain::entity_from(std::span<const BlockPtr> blocks, const std::string& device_id) const {
  DigitalEntity entity(device_id);
  for (const auto& block : blocks) {
    std::vector<const Record*> mine;
    for (const auto& tx : block->transactions) {
      if (tx.device_id == device_id && tx.is_record()) mine.push_back(&std::get<Record>(tx.payload));
    }
    std::sort(mine.begin(), mine.end(), [](const Record* a, const Record* b) { return a->timestamp_ms < b->timestamp_ms; });
    for (const Record* r : mine) entity.append({*r, block->bct, block->depth});
  }
  if (last_commit_) entity.set_as_of(*last_commit_);
  return entity;
}

DigitalEntity Chain::query_entity(const std::string& device_id) const {
  std::size_t correct = params_.nodes - params_.byzantine;
  DigitalEntity entity = entity_from(ledgers_[0], device_id);
  for (std::size_t node = 1; node < correct; ++node) {
    if (entity_from(ledgers_[node], device_id) != entity) throw std::logic_error("correct nodes disagree");
  }
  return entity;
}

std::vector<CommittedAlarm> Chain::query_alarms(const std::string& device_id) const {
  std::vector<CommittedAlarm> out;
  for (const auto& block : ledgers_[0]) {
    for (const auto& tx : block->transactions) {
      if (tx.device_id == device_id && !tx.is_record()) {
        out.push_back({std::get<AlarmMessage>(tx.payload), block->bct, block->depth});
      }
    }
  }
  return out;
}

DigitalEntity Chain::node_entity(std::size_t node, const std::string& device_id) const {
  return entity_from(node_view(node), device_id);
}

std::span<const BlockPtr> Chain::node_view(std::size_t node) const {
  if (node >= ledgers_.size()) throw std::out_of_range("no such node");
  return ledgers_[node];
}

AgentReply agent_receive(Chain& chain, const UploadMessage& upload, Micros arrival, const SessionKey& session,
                         const PublicKey& device_pk) {
  RecordBatch batch;
  try {
    batch = decode<RecordBatch>(open(upload.ciphertext, session, as_bytes(upload.device_id)));
  } catch (const OpenError& e) {
    return Reject{upload.message_id, std::string("open failed: ") + e.what()};
  } catch (const DecodeError& e) {
    return Reject{upload.message_id, std::string("malformed payload: ") + e.what()};
  }
  if (batch.records.empty()) return Reject{upload.message_id, "empty upload"};
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    if (i > 0 && batch.records[i].timestamp_ms <= batch.records[i - 1].timestamp_ms) {
      return Reject{upload.message_id, "records out of order"};
    }
    if (!verify_record(batch.records[i], device_pk)) {
      return Reject{upload.message_id, "bad signature at position " + std::to_string(i)};
    }
  }

  Ack ack{upload.message_id, {}, {}};
  for (auto& record : batch.records) {
    std::uint64_t t = record.timestamp_ms;
    if (chain.submit({upload.device_id, arrival, std::move(record)})) {
      ack.fresh.push_back(t);
    } else {
      ack.duplicates.push_back(t);
    }
  }
  return ack;
}

bool agent_receive_alarm(Chain& chain, const std::string& device_id, const AlarmMessage& alarm, Micros arrival,
                         const PublicKey& device_pk) {
  if (!verify_alarm(alarm, device_pk)) return false;
  return chain.submit({device_id, arrival, alarm});
}

}  // namespace trustsim
