// Seeded, label-addressed random streams. Every consumer derives its own
// stream from the scenario seed so that results never depend on the order in
// which modules draw numbers.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace uavcache {

namespace detail {
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}
}  // namespace detail

class RandomSource {
 public:
  using Engine = std::mt19937_64;

  explicit RandomSource(std::uint64_t seed) : seed_(seed), key_(detail::splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key() const noexcept { return key_; }

  /// Independent child stream; the same (seed, label path) always yields the
  /// same stream.
  RandomSource derive(std::string_view label) const {
    RandomSource child(*this);
    child.key_ = detail::splitmix64(key_ ^ detail::splitmix64(detail::fnv1a(label)));
    return child;
  }

  RandomSource derive(std::string_view label, std::uint64_t index) const {
    RandomSource child = derive(label);
    child.key_ = detail::splitmix64(child.key_ + detail::splitmix64(index + 1));
    return child;
  }

  /// Counter-based draw: the value at `index` does not depend on any other draw.
  std::uint64_t bits(std::uint64_t index) const noexcept {
    return detail::splitmix64(key_ ^ detail::splitmix64(index ^ 0xD1B54A32D192ED03ULL));
  }

  /// Uniform on [0, 1) at `index`.
  double uniform(std::uint64_t index) const noexcept {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  /// Fresh engine positioned at the start of this stream.
  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32),
                      static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    return Engine(seq);
  }

  friend bool operator==(const RandomSource&, const RandomSource&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
};

inline RandomSource derive_stream(const RandomSource& rs, std::string_view label) {
  if (label.empty()) throw std::invalid_argument("derive_stream: empty label");
  return rs.derive(label);
}

}  // namespace uavcache
