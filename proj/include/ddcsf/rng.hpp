#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ddcsf {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/**
 * Seeds are derived from a master seed and a stream name such as
 * "sleep/cycle=3", so adding or reordering unrelated draws elsewhere
 * never shifts the numbers a given component sees.
 */
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t derive(std::string_view name) const { return mix64(master_ ^ mix64(fnv1a(name))); }

  std::uint64_t derive(std::string_view name, std::uint64_t index) const {
    return mix64(derive(name) + mix64(index + 1));
  }

  Rng stream(std::string_view name) const { return Rng(derive(name)); }
  Rng stream(std::string_view name, std::uint64_t index) const { return Rng(derive(name, index)); }

  SeedSequence child(std::string_view name) const { return SeedSequence(derive(name)); }

 private:
  std::uint64_t master_;
};

}  // namespace ddcsf
