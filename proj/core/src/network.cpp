#include "trustsim/network.hpp"

#include <algorithm>

#include "trustsim/errors.hpp"

namespace trustsim {

bool Channel::jammed(Micros at) const {
  auto it = std::upper_bound(jam_windows.begin(), jam_windows.end(), at,
                             [](Micros t, const Interval& w) { return t < w.begin; });
  return it != jam_windows.begin() && std::prev(it)->contains(at);
}

void Channel::validate() const {
  if (latency.min_ms() < 0.0) throw ConfigError("channel latency must be non-negative");
  if (!(loss_rate >= 0.0 && loss_rate <= 1.0)) throw ConfigError("loss rate must lie in [0, 1]");
  for (std::size_t i = 0; i < jam_windows.size(); ++i) {
    if (jam_windows[i].end <= jam_windows[i].begin) throw ConfigError("empty jam window");
    if (i > 0 && jam_windows[i].begin < jam_windows[i - 1].end) {
      throw ConfigError("jam windows overlap or are unsorted");
    }
  }
}

TransmitOutcome transmit(Channel& channel, Micros send_time, Rng& rng) {
  if (channel.jammed(send_time)) return Dropped{DropCause::kJammed};
  if (channel.loss_rate > 0.0 && rng.uniform01() < channel.loss_rate) return Dropped{DropCause::kRandomLoss};
  return Delivered{send_time + channel.latency.sample(rng)};
}

}  // namespace trustsim
