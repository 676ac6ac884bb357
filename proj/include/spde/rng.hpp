#pragma once

#include <array>
#include <cstdint>

namespace spde {

/// Philox4x32-10 counter-based generator.
///
/// Every random number is a pure function of (key, counter), so streams can be
/// addressed directly by (seed, replica, step, site block) without any shared
/// state between workers.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed);

  static Counter block(Counter counter, Key key);

  const Key& key() const { return key_; }
  Counter operator()(const Counter& counter) const { return block(counter, key_); }

  /// Uniform double in (0, 1) built from 52 bits of two 32-bit words.
  static double to_unit(std::uint32_t hi, std::uint32_t lo);

  /// Two independent standard normals from one Philox block (Box-Muller).
  std::array<double, 2> normal_pair(const Counter& counter) const;

 private:
  Key key_;
};

/// Stream tags that separate independent uses of one (replica, step) pair.
enum class StreamTag : std::uint32_t { noise = 0, bootstrap = 1, lipschitz = 2, test = 3 };

/// Counter layout: (site block, step, replica, tag).
inline Philox::Counter make_counter(std::uint64_t site_block, std::uint64_t step, std::uint64_t replica,
                                    StreamTag tag) {
  return {static_cast<std::uint32_t>(site_block), static_cast<std::uint32_t>(step),
          static_cast<std::uint32_t>(replica),
          static_cast<std::uint32_t>(tag) ^ (static_cast<std::uint32_t>(site_block >> 32) << 8)};
}

}  // namespace spde
