#include "trustsim/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace trustsim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t v = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(v >> (8 * b));
    }
  }
}

Sampler Sampler::constant(double ms) { return Sampler(Constant{ms}); }

Sampler Sampler::uniform(double min_ms, double max_ms) {
  if (!(min_ms <= max_ms)) throw std::invalid_argument("uniform sampler needs min <= max");
  return Sampler(Uniform{min_ms, max_ms});
}

Sampler Sampler::cycle(std::vector<double> values_ms) {
  if (values_ms.empty()) throw std::invalid_argument("cycle sampler needs at least one value");
  return Sampler(Cycle{std::move(values_ms)});
}

double Sampler::sample_ms(Rng& rng) {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value_ms; },
                        [&rng](const Uniform& u) { return rng.uniform(u.min_ms, u.max_ms); },
                        [this](const Cycle& c) { return c.values_ms[cursor_++ % c.values_ms.size()]; },
                    },
                    kind_);
}

double Sampler::min_ms() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value_ms; },
                        [](const Uniform& u) { return u.min_ms; },
                        [](const Cycle& c) { return *std::min_element(c.values_ms.begin(), c.values_ms.end()); },
                    },
                    kind_);
}

double Sampler::max_ms() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value_ms; },
                        [](const Uniform& u) { return u.max_ms; },
                        [](const Cycle& c) { return *std::max_element(c.values_ms.begin(), c.values_ms.end()); },
                    },
                    kind_);
}

double Sampler::mean_ms() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value_ms; },
                        [](const Uniform& u) { return 0.5 * (u.min_ms + u.max_ms); },
                        [](const Cycle& c) {
                          return std::accumulate(c.values_ms.begin(), c.values_ms.end(), 0.0) /
                                 static_cast<double>(c.values_ms.size());
                        },
                    },
                    kind_);
}

}  // namespace trustsim
