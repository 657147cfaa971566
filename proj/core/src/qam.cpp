#include "ccs/qam.hpp"

#include <cmath>
#include <random>

#include "ccs/errors.hpp"

namespace ccs::qam {

namespace {

constexpr unsigned gray(unsigned i) { return i ^ (i >> 1); }

unsigned inv_gray(unsigned g) {
  unsigned i = g;
  while (g >>= 1) i ^= g;
  return i;
}

int axis_index_from_value(double v, double scale, int n_levels) {
  // level index of the nearest of {-(L-1), ..., +(L-1)} * scale;
  // exact midpoints resolve to the lower index
  const double u = (v / scale + static_cast<double>(n_levels - 1)) / 2.0;
  auto i = static_cast<long>(std::ceil(u - 0.5));
  if (i < 0) i = 0;
  if (i >= n_levels) i = n_levels - 1;
  return static_cast<int>(i);
}

}  // namespace

Constellation Constellation::square(int m) {
  if (m != 4 && m != 16 && m != 64 && m != 256)
    throw InvalidParameter("Constellation: m must be a perfect even-power square (4, 16, 64, 256)");
  Constellation c;
  c.m = m;
  const int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  int bits = 0;
  while ((1 << bits) < L) ++bits;
  c.bits_per_axis = bits;
  c.scale = std::sqrt(3.0 / (2.0 * (m - 1)));  // unit average symbol energy
  c.levels.resize(L);
  for (int i = 0; i < L; ++i) c.levels[i] = (2.0 * i - (L - 1)) * c.scale;
  c.points.resize(static_cast<std::size_t>(m));
  for (unsigned pi = 0; pi < static_cast<unsigned>(L); ++pi)
    for (unsigned pq = 0; pq < static_cast<unsigned>(L); ++pq)
      c.points[(pi << bits) | pq] = {c.levels[inv_gray(pi)], c.levels[inv_gray(pq)]};
  return c;
}

std::complex<double> Constellation::nearest(std::complex<double> y) const {
  const int L = static_cast<int>(levels.size());
  return {levels[axis_index_from_value(y.real(), scale, L)],
          levels[axis_index_from_value(y.imag(), scale, L)]};
}

std::vector<std::complex<double>> map_qam(std::span<const std::uint8_t> bits, int m) {
  const auto c = Constellation::square(m);
  const int bps = c.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw InvalidParameter("map_qam: bit count not divisible by log2(m)");
  const std::size_t n = bits.size() / static_cast<std::size_t>(bps);
  std::vector<std::complex<double>> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    unsigned pi = 0, pq = 0;
    for (int b = 0; b < c.bits_per_axis; ++b) {
      pi = (pi << 1) | bits[s * bps + b];
      pq = (pq << 1) | bits[s * bps + c.bits_per_axis + b];
    }
    out[s] = {c.levels[inv_gray(pi)], c.levels[inv_gray(pq)]};
  }
  return out;
}

std::vector<std::uint8_t> demap_qam(std::span<const std::complex<double>> symbols, int m) {
  const auto c = Constellation::square(m);
  const int L = static_cast<int>(c.levels.size());
  std::vector<std::uint8_t> out(symbols.size() * static_cast<std::size_t>(c.bits_per_symbol()));
  std::size_t pos = 0;
  for (const auto& y : symbols) {
    const unsigned pi = gray(static_cast<unsigned>(axis_index_from_value(y.real(), c.scale, L)));
    const unsigned pq = gray(static_cast<unsigned>(axis_index_from_value(y.imag(), c.scale, L)));
    for (int b = c.bits_per_axis - 1; b >= 0; --b) out[pos++] = (pi >> b) & 1u;
    for (int b = c.bits_per_axis - 1; b >= 0; --b) out[pos++] = (pq >> b) & 1u;
  }
  return out;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint8_t> out(n);
  std::mt19937_64 eng(seed);
  std::uint64_t word = 0;
  int left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (left == 0) {
      word = eng();
      left = 64;
    }
    out[i] = static_cast<std::uint8_t>(word & 1u);
    word >>= 1;
    --left;
  }
  return out;
}

}  // namespace ccs::qam
