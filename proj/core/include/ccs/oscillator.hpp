#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccs/field.hpp"

namespace ccs::osc {

/// Phase-noise parameterization of one laser or RF source.
///
/// One-sided FM-noise PSD convention throughout:
///   S_nu(f) = h0 + h_flicker / f   [Hz^2/Hz],
/// under which a white floor h0 yields a Lorentzian line of FWHM pi*h0.
struct OscillatorSpec {
  double h0_hz2_per_hz = 0.0;
  double h_flicker_hz2 = 0.0;
  double power_mw = 1.0;
  double freq_offset_hz = 0.0;  ///< offset from the simulation center frequency

  void validate() const;
};

struct PhaseTrajectory {
  std::vector<double> samples_rad;
  double fs_hz = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples_rad.size(); }
};

/// One realization of instantaneous-frequency noise, Hz per sample.
/// White part: i.i.d. Gaussian with per-sample variance h0*fs/2, i.e. a flat
/// one-sided PSD at h0. Flicker part: Gaussian spectrum shaped to h_flicker/f
/// by FFT, exact at the grid frequencies k*fs/n down to fs/n.
/// Deterministic for fixed (spec, n, fs, seed).
std::vector<double> synth_freq_noise(const OscillatorSpec& spec, std::size_t n,
                                     double fs_hz, std::uint64_t seed);

/// phi[0] = 0; phi[k] = phi[k-1] + 2 pi nu[k-1] / fs.
PhaseTrajectory integrate_phase(std::span<const double> freq_noise_hz, double fs_hz,
                                std::uint64_t seed = 0);

PhaseTrajectory synth_phase(const OscillatorSpec& spec, std::size_t n, double fs_hz,
                            std::uint64_t seed);

/// iq[k] = sqrt(power_mw) * exp(i(2 pi freq_offset k / fs + phi[k])).
/// The offset tone lives in the samples; center_offset_hz of the result is 0.
SampledField cw_field(const OscillatorSpec& spec, const PhaseTrajectory& phase);

/// FWHM of the Lorentzian line corresponding to a white FM floor: pi * h0.
double lorentzian_linewidth_hz(double h0_hz2_per_hz);

}  // namespace ccs::osc
