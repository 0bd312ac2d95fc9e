#pragma once

// Seeded randomness and the latency samplers used by device, channel and
// chain. Everything here is bit-reproducible across runs and platforms: the
// engine is mt19937_64 and real-valued draws are built from its raw output
// instead of the implementation-defined <random> distributions.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "trustsim/types.hpp"

namespace trustsim {

// Independent 64-bit seed for a named substream of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  void fill(std::span<std::uint8_t> out);

 private:
  std::mt19937_64 engine_;
};

// A delay distribution in milliseconds with known support.
class Sampler {
 public:
  struct Constant {
    double value_ms;
  };
  struct Uniform {
    double min_ms;
    double max_ms;
  };
  // Deterministic schedule, repeated; used to drive adversarial timings.
  struct Cycle {
    std::vector<double> values_ms;
  };

  static Sampler constant(double ms);
  static Sampler uniform(double min_ms, double max_ms);
  static Sampler cycle(std::vector<double> values_ms);

  double sample_ms(Rng& rng);
  Micros sample(Rng& rng) { return from_ms(sample_ms(rng)); }

  double min_ms() const;
  double max_ms() const;
  double mean_ms() const;

  const std::variant<Constant, Uniform, Cycle>& kind() const { return kind_; }

 private:
  explicit Sampler(std::variant<Constant, Uniform, Cycle> kind) : kind_(std::move(kind)) {}

  std::variant<Constant, Uniform, Cycle> kind_;
  std::size_t cursor_ = 0;
};

}  // namespace trustsim
