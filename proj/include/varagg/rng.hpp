#pragma once

#include <array>
#include <cstdint>

namespace varagg {

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (seed, stream, index, slot), so index ranges can be split across workers and
// the concatenation equals serial output.
class CounterRng {
 public:
  using Block = std::array<std::uint32_t, 4>;

  CounterRng(std::uint64_t seed, std::uint32_t stream = 0) : seed_(seed), stream_(stream) {}

  static Block philox(Block counter, std::array<std::uint32_t, 2> key);

  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform(std::uint64_t index, std::uint32_t slot) const;

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

}  // namespace varagg
