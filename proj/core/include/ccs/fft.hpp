#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ccs::fft {

/// Unnormalized forward DFT, in place. Thread safe; plans are cached per size
/// and chosen deterministically so results are identical run to run.
void forward_inplace(std::span<std::complex<double>> x);

/// Inverse DFT scaled by 1/N, in place.
void inverse_inplace(std::span<std::complex<double>> x);

std::vector<std::complex<double>> forward(std::vector<std::complex<double>> x);
std::vector<std::complex<double>> inverse(std::vector<std::complex<double>> x);

/// Signed bin frequency for bin k of an n-point DFT at sample rate fs.
double bin_frequency_hz(std::size_t k, std::size_t n, double fs_hz);

}  // namespace ccs::fft
