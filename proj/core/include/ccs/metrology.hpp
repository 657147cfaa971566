#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccs/field.hpp"
#include "ccs/oscillator.hpp"

namespace ccs::metrology {

struct WelchParams {
  std::size_t segment_length = 0;  ///< 0: n/16 rounded down to a power of two
  double overlap = 0.5;            ///< fraction of segment_length
};

/// One-sided FM-noise PSD estimate [Hz^2/Hz] on an ascending frequency grid.
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> psd;
  int segment_count = 0;
  std::string window_name = "hann";
};

/// Instantaneous frequency nu[k] = (phi[k+1]-phi[k]) * fs / 2pi from the
/// unwrapped field phase, Welch-averaged into a one-sided PSD. Per-segment
/// mean removal, so a constant carrier offset does not leak into the estimate.
/// Requires at least 8 segments.
PsdEstimate fm_noise_psd(const SampledField& field, WelchParams params = {});
PsdEstimate fm_noise_psd(const osc::PhaseTrajectory& phase, WelchParams params = {});

struct DshConfig {
  double delay_s = 10e-6;      ///< interferometer delay
  double shift_hz = 80e6;      ///< acousto-optic shift
  double rx_noise_psd = 0.0;   ///< detection noise, beat-power units per Hz
  std::uint64_t noise_seed = 0;

  void validate() const;
};

/// Delayed self-heterodyne emulation: beat the field with a delayed,
/// frequency-shifted copy of itself, convert the beat phase to FM noise, and
/// divide out the delay-line transfer |2 sin(pi f tau)|^2. Bins closer than
/// 10% of the null spacing 1/tau to a transfer null are dropped.
PsdEstimate dsh_emulate(const SampledField& field, const DshConfig& cfg,
                        WelchParams params = {});

struct Spectrum {
  std::vector<double> freqs_hz;    ///< absolute: record frequency + center offset
  std::vector<double> power_dbm;   ///< integrated per rbw bin
  double rbw_hz = 0.0;
};

/// Welch power spectrum integrated into rbw-wide bins on an absolute dBm
/// scale: summing all bins recovers the field's mean power.
Spectrum optical_spectrum(const SampledField& field, double rbw_hz);

/// Median PSD over [f_lo, f_hi] taken as the white floor h0; returns pi*h0.
double estimate_linewidth_hz(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz);

/// Lorentzian FWHM of the field's lineshape: weighted reciprocal-domain fit
/// (1/S linear in (f-f0)^2) around the Welch spectral peak.
double fit_lorentzian_fwhm_hz(const SampledField& field, WelchParams params = {});

void write_csv(const PsdEstimate& psd, const std::filesystem::path& path,
               const std::string& unit = "Hz^2/Hz");
void write_csv(const Spectrum& spec, const std::filesystem::path& path);

/// Welch PSD of a real sequence, one-sided (bins 0..L/2).
std::pair<std::vector<double>, std::vector<double>> welch_psd_real(
    std::span<const double> x, double fs_hz, WelchParams params,
    int min_segments = 1, bool detrend = true);

/// Welch PSD of a complex sequence, two-sided on an ascending centered grid.
std::pair<std::vector<double>, std::vector<double>> welch_psd_complex(
    std::span<const std::complex<double>> x, double fs_hz, WelchParams params);

}  // namespace ccs::metrology
