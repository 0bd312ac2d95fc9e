#pragma once

// Device <-> agent channel: sampled latency, jamming windows that drop all
// traffic in both directions, optional random loss.

#include <variant>
#include <vector>

#include "trustsim/environment.hpp"
#include "trustsim/sampling.hpp"
#include "trustsim/types.hpp"

namespace trustsim {

struct Channel {
  Sampler latency = Sampler::uniform(50.0, 80.0);  // epsilon_2
  std::vector<Interval> jam_windows;
  double loss_rate = 0.0;

  bool jammed(Micros at) const;
  // Throws ConfigError.
  void validate() const;
};

struct Delivered {
  Micros arrival{0};
};

enum class DropCause { kJammed, kRandomLoss };

struct Dropped {
  DropCause cause;
};

using TransmitOutcome = std::variant<Delivered, Dropped>;

// Messages are independent: no FIFO guarantee across sends.
TransmitOutcome transmit(Channel& channel, Micros send_time, Rng& rng);

}  // namespace trustsim
