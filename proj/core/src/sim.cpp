#include "trustsim/sim.hpp"

#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "trustsim/encoding.hpp"

namespace trustsim {
namespace {

using nlohmann::ordered_json;

struct Delivery {
  UploadMessage upload;
  Micros sent_at;
};

struct AlarmDelivery {
  AlarmMessage alarm;
};

struct AckDelivery {
  std::uint64_t message_id;
};

struct Event {
  Micros at;
  EventKind kind;
  std::uint64_t seq;
  std::variant<std::monostate, Block, Delivery, AlarmDelivery, AckDelivery> payload;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

ordered_json reading_fields(ordered_json j, const SensorReading& c) {
  j["L"] = c.brightness;
  j["K"] = c.temperature_c;
  j["x"] = c.latitude;
  j["y"] = c.longitude;
  return j;
}

const char* drop_name(DropCause c) { return c == DropCause::kJammed ? "jammed" : "lost"; }

class Engine {
 public:
  Engine(const RunConfig& config, std::uint64_t seed)
      : config_(config),
        device_rng_(derive_seed(seed, "device")),
        channel_rng_(derive_seed(seed, "channel")),
        chain_rng_(derive_seed(seed, "chain")),
        channel_(config.channel),
        chain_(config.chain),
        device_(make_device(seed)) {
    trace_.seed = seed;
    trace_.config = config;
    trace_.device_pk = device_.public_key();
  }

  Trace run() {
    const Micros duration = config_.scenario.duration;
    const Micros first_tick = from_whole_ms(config_.device.first_tick_ms);
    push(chain_.next_gst(chain_rng_), EventKind::kGst, std::monostate{});
    if (first_tick < duration) {
      push(first_tick, EventKind::kSenseTick, std::monostate{});
      ticks_pending_ = true;
    }

    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.at;
      switch (ev.kind) {
        case EventKind::kGst:
          if (quiescent() && now_ >= duration) {
            queue_ = {};
            continue;
          }
          on_gst();
          break;
        case EventKind::kBct:
          on_bct(std::get<Block>(std::move(ev.payload)));
          break;
        case EventKind::kDelivery:
          --in_flight_;
          on_delivery(std::get<Delivery>(ev.payload));
          break;
        case EventKind::kAlarmDelivery:
          --in_flight_;
          on_alarm_delivery(std::get<AlarmDelivery>(ev.payload));
          break;
        case EventKind::kAckDelivery:
          --in_flight_;
          trace_.events.push_back({{"type", "ack"}, {"at_us", now_.count()}, {"message_id", std::get<AckDelivery>(ev.payload).message_id}});
          device_.handle_ack(std::get<AckDelivery>(ev.payload).message_id);
          break;
        case EventKind::kSenseTick:
          on_tick();
          break;
      }
    }
    return finish();
  }

 private:
  Device make_device(std::uint64_t seed) {
    Rng key_rng(derive_seed(seed, "keys"));
    Seed device_seed{};
    Seed agent_seed{};
    key_rng.fill(device_seed);
    key_rng.fill(agent_seed);
    DeviceKeys keys = keygen(device_seed);
    agent_ = agent_keygen(agent_seed, "agent-0");
    Rng kdf_rng(derive_seed(seed, "kdf"));
    SessionOffer offer = kdf(keys, agent_.identity, kdf_rng);
    auto accepted = accept_session(offer.distribution, offer.signature, keys.public_key, agent_);
    if (!accepted || !(*accepted == offer.key)) throw std::logic_error("session establishment failed");
    agent_session_ = *accepted;
    return Device(config_.device, keys, offer.key);
  }

  template <class P>
  void push(Micros at, EventKind kind, P payload) {
    queue_.push({at, kind, seq_++, std::move(payload)});
  }

  bool quiescent() const { return !ticks_pending_ && in_flight_ == 0 && chain_.pool_size() == 0 && pending_bct_ == 0; }

  RecordLifecycle& lifecycle(std::uint64_t t) { return trace_.lifecycle.at(by_timestamp_.at(t)); }

  void on_gst() {
    Block block = chain_.produce_block(now_, chain_rng_);
    if (!block.transactions.empty()) {
      trace_.events.push_back({{"type", "gst"},
                               {"at_us", now_.count()},
                               {"depth", block.depth},
                               {"transactions", block.transactions.size()},
                               {"bct_us", block.bct.count()}});
    }
    Micros bct = block.bct;
    ++pending_bct_;
    push(bct, EventKind::kBct, std::move(block));
    push(chain_.next_gst(chain_rng_), EventKind::kGst, std::monostate{});
  }

  void on_bct(Block block) {
    --pending_bct_;
    if (!block.transactions.empty()) {
      trace_.events.push_back({{"type", "bct"}, {"at_us", now_.count()}, {"depth", block.depth}});
    }
    for (const auto& tx : block.transactions) {
      ordered_json line{{"type", "commit"},
                        {"depth", block.depth},
                        {"gst_us", block.gst.count()},
                        {"bct_us", block.bct.count()},
                        {"device", tx.device_id}};
      if (const auto* r = std::get_if<Record>(&tx.payload)) {
        line["kind"] = "record";
        line["t"] = r->timestamp_ms;
        line = reading_fields(std::move(line), r->reading);
        line["pi"] = to_hex(r->signature);
        auto& lc = lifecycle(r->timestamp_ms);
        lc.block_gst = block.gst;
        lc.committed_at = block.bct;
        lc.depth = block.depth;
      } else {
        const auto& a = std::get<AlarmMessage>(tx.payload);
        line["kind"] = "alarm";
        line["t"] = a.timestamp_ms;
        line["messages"] = a.messages;
        line["pi"] = to_hex(a.signature);
      }
      trace_.events.push_back(std::move(line));
    }
    chain_.commit(std::move(block));
  }

  void on_delivery(const Delivery& d) {
    AgentReply reply = agent_receive(chain_, d.upload, now_, agent_session_, device_.public_key());
    ordered_json line{{"type", "deliver"}, {"at_us", now_.count()}, {"message_id", d.upload.message_id}};
    if (const auto* rej = std::get_if<Reject>(&reply)) {
      ++trace_.summary.rejected;
      line["result"] = "reject";
      line["reason"] = rej->reason;
      trace_.events.push_back(std::move(line));
      return;
    }
    const auto& ack = std::get<Ack>(reply);
    for (auto t : ack.fresh) {
      auto& lc = lifecycle(t);
      lc.sent_at = d.sent_at;
      lc.arrived_at = now_;
    }
    line["result"] = "ack";
    line["fresh"] = ack.fresh;
    line["duplicates"] = ack.duplicates;
    auto outcome = transmit(channel_, now_, channel_rng_);
    if (const auto* ok = std::get_if<Delivered>(&outcome)) {
      line["ack"] = "delivered";
      line["ack_arrival_us"] = ok->arrival.count();
      ++in_flight_;
      push(ok->arrival, EventKind::kAckDelivery, AckDelivery{ack.message_id});
    } else {
      ++trace_.summary.acks_dropped;
      line["ack"] = drop_name(std::get<Dropped>(outcome).cause);
    }
    trace_.events.push_back(std::move(line));
  }

  void on_alarm_delivery(const AlarmDelivery& d) {
    bool pooled = agent_receive_alarm(chain_, config_.device.device_id, d.alarm, now_, device_.public_key());
    trace_.events.push_back(
        {{"type", "alarm_deliver"}, {"at_us", now_.count()}, {"t", d.alarm.timestamp_ms}, {"pooled", pooled}});
  }

  void on_tick() {
    for (auto id : device_.expire_outstanding()) {
      trace_.events.push_back({{"type", "timeout"}, {"at_us", now_.count()}, {"message_id", id}});
    }

    SenseOutput out = device_.sense_cycle(now_, config_.scenario, device_rng_);
    const Record& rec = out.record;
    by_timestamp_.emplace(rec.timestamp_ms, trace_.lifecycle.size());
    RecordLifecycle lc;
    lc.timestamp_ms = rec.timestamp_ms;
    lc.reading = rec.reading;
    lc.sensed_at = now_;
    trace_.lifecycle.push_back(lc);

    ordered_json sense{{"type", "sense"}, {"at_us", now_.count()}, {"t", rec.timestamp_ms}};
    sense = reading_fields(std::move(sense), rec.reading);
    ordered_json violations = ordered_json::array();
    for (const auto& v : out.violations) violations.push_back(alarm_text(v.kind));
    sense["violations"] = violations;
    trace_.events.push_back(std::move(sense));

    if (out.alarm) {
      trace_.alarms.push_back(*out.alarm);
      trace_.events.push_back(
          {{"type", "alarm"}, {"at_us", now_.count()}, {"t", out.alarm->timestamp_ms}, {"messages", out.alarm->messages}});
      auto outcome = transmit(channel_, out.send_at, channel_rng_);
      ordered_json line{{"type", "send"}, {"at_us", out.send_at.count()}, {"alarm_t", out.alarm->timestamp_ms}};
      if (const auto* ok = std::get_if<Delivered>(&outcome)) {
        line["outcome"] = "delivered";
        line["arrival_us"] = ok->arrival.count();
        ++in_flight_;
        push(ok->arrival, EventKind::kAlarmDelivery, AlarmDelivery{*out.alarm});
      } else {
        line["outcome"] = drop_name(std::get<Dropped>(outcome).cause);
      }
      trace_.events.push_back(std::move(line));
    }

    if (out.upload) {
      const UploadMessage& up = *out.upload;
      if (!nonces_.insert(up.message_id).second) throw std::logic_error("nonce reused");
      for (std::size_t i = 0; i + 1 < out.carried.size(); ++i) ++lifecycle(out.carried[i]).resend_count;
      ++trace_.summary.uploads;
      auto outcome = transmit(channel_, out.send_at, channel_rng_);
      ordered_json line{{"type", "send"}, {"at_us", out.send_at.count()}, {"message_id", up.message_id}, {"carried", out.carried}};
      if (const auto* ok = std::get_if<Delivered>(&outcome)) {
        line["outcome"] = "delivered";
        line["arrival_us"] = ok->arrival.count();
        ++in_flight_;
        push(ok->arrival, EventKind::kDelivery, Delivery{up, out.send_at});
      } else {
        ++trace_.summary.uploads_dropped;
        line["outcome"] = drop_name(std::get<Dropped>(outcome).cause);
      }
      trace_.events.push_back(std::move(line));
    }

    if (device_.status().failed()) {
      trace_.events.push_back({{"type", "device_failed"}, {"at_us", now_.count()}, {"reason", device_.status().reason}});
      ticks_pending_ = false;
      return;
    }
    Micros next = now_ + from_whole_ms(config_.device.delta_t_ms);
    if (next < config_.scenario.duration) {
      push(next, EventKind::kSenseTick, std::monostate{});
    } else {
      ticks_pending_ = false;
    }
  }

  Trace finish() {
    for (auto& lc : trace_.lifecycle) lc.recovered = lc.committed() && lc.resend_count > 0;
    trace_.status = device_.status();
    trace_.entity = chain_.query_entity(config_.device.device_id);
    trace_.committed_alarms = chain_.query_alarms(config_.device.device_id);
    trace_.end_time = now_;

    auto& s = trace_.summary;
    s.sensed = trace_.lifecycle.size();
    for (const auto& lc : trace_.lifecycle) {
      s.committed += lc.committed();
      s.recovered += lc.recovered;
    }
    s.alarms = trace_.alarms.size();
    s.alarms_committed = trace_.committed_alarms.size();
    return std::move(trace_);
  }

  const RunConfig& config_;
  Rng device_rng_;
  Rng channel_rng_;
  Rng chain_rng_;
  Channel channel_;
  Chain chain_;
  AgentKeys agent_;
  SessionKey agent_session_;
  Device device_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  Micros now_{0};
  bool ticks_pending_ = false;
  std::size_t in_flight_ = 0;
  std::size_t pending_bct_ = 0;
  std::set<std::uint64_t> nonces_;
  std::map<std::uint64_t, std::size_t> by_timestamp_;
  Trace trace_;
};

}  // namespace

Trace run(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  return Engine(config, seed).run();
}

}  // namespace trustsim
