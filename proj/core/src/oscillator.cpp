#include "ccs/oscillator.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/fft.hpp"
#include "ccs/rng.hpp"

namespace ccs::osc {

void OscillatorSpec::validate() const {
  if (!(h0_hz2_per_hz >= 0.0))
    throw InvalidParameter("OscillatorSpec: h0_hz2_per_hz must be >= 0");
  if (!(h_flicker_hz2 >= 0.0))
    throw InvalidParameter("OscillatorSpec: h_flicker_hz2 must be >= 0");
  if (!(power_mw > 0.0)) throw InvalidParameter("OscillatorSpec: power_mw must be > 0");
  if (!std::isfinite(freq_offset_hz))
    throw InvalidParameter("OscillatorSpec: freq_offset_hz must be finite");
}

std::vector<double> synth_freq_noise(const OscillatorSpec& spec, std::size_t n,
                                     double fs_hz, std::uint64_t seed) {
  spec.validate();
  if (n < 2) throw InvalidParameter("synth_freq_noise: n must be >= 2");
  if (!(fs_hz > 0.0)) throw InvalidParameter("synth_freq_noise: fs_hz must be > 0");

  std::vector<double> out(n, 0.0);
  rng::NormalSampler gauss(seed);

  if (spec.h0_hz2_per_hz > 0.0) {
    const double sigma = std::sqrt(spec.h0_hz2_per_hz * fs_hz / 2.0);
    for (auto& v : out) v = sigma * gauss();
  }

  if (spec.h_flicker_hz2 > 0.0) {
    // Hermitian spectrum with E|X[k]|^2 = S2(f_k) fs n, S2 = h_flicker/(2f);
    // the inverse DFT is then a real sequence whose two-sided PSD is S2.
    std::vector<std::complex<double>> bins(n, {0.0, 0.0});
    const std::size_t top = (n - 1) / 2;  // DC and (even-n) Nyquist stay zero
    for (std::size_t k = 1; k <= top; ++k) {
      const double f = static_cast<double>(k) * fs_hz / static_cast<double>(n);
      const double s2 = spec.h_flicker_hz2 / (2.0 * f);
      const double amp = std::sqrt(s2 * fs_hz * static_cast<double>(n) / 2.0);
      bins[k] = std::complex<double>(amp * gauss(), amp * gauss());
      bins[n - k] = std::conj(bins[k]);
    }
    fft::inverse_inplace(bins);
    for (std::size_t i = 0; i < n; ++i) out[i] += bins[i].real();
  }

  return out;
}

PhaseTrajectory integrate_phase(std::span<const double> freq_noise_hz, double fs_hz,
                                std::uint64_t seed) {
  if (freq_noise_hz.empty()) throw InvalidParameter("integrate_phase: empty input");
  if (!(fs_hz > 0.0)) throw InvalidParameter("integrate_phase: fs_hz must be > 0");
  PhaseTrajectory out;
  out.fs_hz = fs_hz;
  out.seed = seed;
  out.samples_rad.resize(freq_noise_hz.size());
  const double k = 2.0 * std::numbers::pi / fs_hz;
  double phi = 0.0;
  out.samples_rad[0] = 0.0;
  for (std::size_t i = 1; i < freq_noise_hz.size(); ++i) {
    phi += k * freq_noise_hz[i - 1];
    out.samples_rad[i] = phi;
  }
  return out;
}

PhaseTrajectory synth_phase(const OscillatorSpec& spec, std::size_t n, double fs_hz,
                            std::uint64_t seed) {
  return integrate_phase(synth_freq_noise(spec, n, fs_hz, seed), fs_hz, seed);
}

SampledField cw_field(const OscillatorSpec& spec, const PhaseTrajectory& phase) {
  spec.validate();
  if (phase.samples_rad.empty()) throw InvalidParameter("cw_field: empty phase trajectory");
  SampledField f;
  f.fs_hz = phase.fs_hz;
  f.center_offset_hz = 0.0;
  f.iq.resize(phase.size());
  const double amp = std::sqrt(spec.power_mw);
  const double cycles_per_sample = spec.freq_offset_hz / phase.fs_hz;
  for (std::size_t k = 0; k < phase.size(); ++k) {
    const double turns = std::fmod(cycles_per_sample * static_cast<double>(k), 1.0);
    f.iq[k] = std::polar(amp, 2.0 * std::numbers::pi * turns + phase.samples_rad[k]);
  }
  return f;
}

double lorentzian_linewidth_hz(double h0_hz2_per_hz) {
  if (!(h0_hz2_per_hz >= 0.0))
    throw InvalidParameter("lorentzian_linewidth_hz: h0 must be >= 0");
  return std::numbers::pi * h0_hz2_per_hz;
}

}  // namespace ccs::osc
