#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ccs::qam {

/// Square QAM with independent per-axis Gray coding and unit average symbol
/// energy. An axis bit pattern p selects level index invgray(p) in the
/// ascending level list, e.g. for 64-QAM the patterns
/// [000,001,011,010,110,111,101,100] map to [-7,-5,-3,-1,+1,+3,+5,+7]/sqrt(42).
/// A symbol's bits are the I-axis pattern (MSB first) followed by the Q-axis
/// pattern.
struct Constellation {
  int m = 0;
  int bits_per_axis = 0;
  double scale = 0.0;                        ///< half the level spacing
  std::vector<double> levels;                ///< ascending
  std::vector<std::complex<double>> points;  ///< index = (pI << bits_per_axis) | pQ

  /// m must be one of 4, 16, 64, 256.
  static Constellation square(int m);

  int bits_per_symbol() const { return 2 * bits_per_axis; }
  double min_distance() const { return 2.0 * scale; }

  /// Nearest point in Euclidean distance; midpoint ties resolve toward the
  /// lower level index (the smaller Gray index).
  std::complex<double> nearest(std::complex<double> y) const;
};

std::vector<std::complex<double>> map_qam(std::span<const std::uint8_t> bits, int m);
std::vector<std::uint8_t> demap_qam(std::span<const std::complex<double>> symbols, int m);

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed);

}  // namespace ccs::qam
