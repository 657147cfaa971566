#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace ccs::rng {

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Stable child-seed derivation used by every seeded stage:
///   seed = splitmix64(splitmix64(master) ^ fnv1a64(stage) ^ splitmix64(index + 1)).
/// Distinct stage names give independent streams for one (master, index) pair,
/// so adding stages or running channels concurrently never perturbs others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view stage);

/// Standard-normal sampler with a pinned algorithm (Box-Muller over
/// mt19937_64): equal seeds give bit-identical streams on every platform,
/// which std::normal_distribution does not guarantee.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}

  double operator()();
  void fill(std::span<double> out);
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ccs::rng
