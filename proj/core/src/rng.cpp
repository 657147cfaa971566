#include "ccs/rng.hpp"

#include <cmath>
#include <numbers>

namespace ccs::rng {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view stage) {
  return splitmix64(splitmix64(master) ^ fnv1a64(stage) ^ splitmix64(index + 1));
}

namespace {

// (0, 1): never 0, so log() below stays finite.
inline double uniform01(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

double NormalSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01(eng_);
  const double u2 = uniform01(eng_);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void NormalSampler::fill(std::span<double> out) {
  for (auto& v : out) v = (*this)();
}

}  // namespace ccs::rng
