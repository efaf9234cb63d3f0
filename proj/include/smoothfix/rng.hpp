#pragma once

#include <array>
#include <cstdint>

namespace smoothfix {

// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC'11).
// Stateless: maps (counter, key) to 128 random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

// Tags keeping the substreams of different consumers disjoint.
enum class StreamDomain : std::uint8_t {
  popdyn = 1,
  branching = 2,
  moments = 3,
  residual = 4,
  support = 5,
  generic = 6,
};

// Identifies one substream under a seed. Three 32-bit words; the top byte
// of `c` is reserved for the domain tag.
struct StreamId {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;

  static StreamId make(StreamDomain domain, std::uint32_t a, std::uint32_t b = 0,
                       std::uint32_t c = 0) noexcept {
    return {a, b, (static_cast<std::uint32_t>(domain) << 24) | (c & 0x00ffffffu)};
  }
};

// Sequential view over one Philox substream. Cheap to construct, so hot
// loops build one per work item (sample index, tree node, draw index) and
// results never depend on how the work is split across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId id) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open() noexcept;

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  bool coin() noexcept { return (next_u32() & 1u) != 0; }

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  unsigned used_ = 4;
};

}  // namespace smoothfix
