#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "ccs/comb.hpp"
#include "ccs/field.hpp"

namespace ccs::txrx {

struct ModemConfig {
  int m = 64;
  double baud_hz = 5e9;
  int sps = 4;
  double rolloff = 0.1;
  int rrc_span_symbols = 32;
  int preamble_symbols = 256;

  void validate() const;
  double fs_hz() const { return baud_hz * sps; }
  /// Group delay of one RRC filter, in samples.
  int rrc_delay_samples() const { return rrc_span_symbols * sps / 2; }
};

/// Unit-energy root-raised-cosine taps, length span*sps + 1.
std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols);

/// Upsample by sps and shape. Output length n_sym*sps + span*sps at
/// fs = sps*baud; the first symbol center sits at rrc_delay_samples().
SampledField rrc_shape(std::span<const std::complex<double>> symbols,
                       const ModemConfig& cfg);

struct FiberConfig {
  double length_km = 25.0;
  double dispersion_ps_nm_km = 17.0;
  double attenuation_db_km = 0.2;
  double wavelength_nm = 1550.0;

  void validate() const;
};

/// Linear fiber: scalar attenuation 10^(-alpha L / 20) on the amplitude plus
/// chromatic dispersion as the all-pass exp(-i pi lambda^2 D L f^2 / c)
/// applied to the baseband spectrum. rxdsp::cd_compensate applies the
/// conjugate phase, so the cascade is attenuation-only.
SampledField propagate_fiber(const SampledField& field, const FiberConfig& cfg);

struct NoiseConfig {
  double target_snr_db = std::numeric_limits<double>::infinity();  ///< +inf: no noise
  std::uint64_t seed = 0;
};

/// Complex AWGN sized for a post-matched-filter symbol SNR of target_snr_db.
/// With unit-energy RRC taps the mean sample power P of a shaped stream is
/// Es/sps, and the matched filter passes per-sample noise variance unchanged,
/// so sigma^2 = P * sps / 10^(SNR/10). P is measured away from filter edges.
SampledField load_awgn(const SampledField& field, const NoiseConfig& cfg,
                       const ModemConfig& modem);

/// Pointwise product of carrier field and baseband envelope; carrier phase
/// noise and residual demux lines ride through onto the signal.
SampledField modulate(const SampledField& carrier, const SampledField& baseband);
SampledField modulate(const comb::DemuxedCarrier& carrier, const SampledField& baseband);

/// Ideal coherent front end: field * conj(lo) / rms(lo). LO phase noise
/// subtracts into the signal phase; an LO frequency offset of +df shifts the
/// output spectrum by -df.
SampledField coherent_rx(const SampledField& field, const SampledField& lo);

/// Binary waveform dump: 16-byte header (magic "CCS1", u32 sample rate in
/// kHz, u32 sample count, 4 reserved zero bytes), then interleaved
/// little-endian 32-bit floats I,Q.
void write_waveform(const SampledField& field, const std::filesystem::path& path);
SampledField read_waveform(const std::filesystem::path& path);

}  // namespace ccs::txrx
