#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ccs/field.hpp"
#include "ccs/qam.hpp"
#include "ccs/transceiver.hpp"

namespace ccs::rxdsp {

/// Conjugate of the fiber's dispersion phase, exp(+i pi lambda^2 D L f^2 / c);
/// amplitude untouched.
SampledField cd_compensate(const SampledField& field, const txrx::FiberConfig& cfg);

struct FreqOffsetEstimate {
  double offset_hz = 0.0;
  double peak_to_median_db = 0.0;
};

/// Coarse carrier-offset estimate from the periodogram peak of symbols^4
/// (the residual 4th-order cyclostationarity of square QAM). Needs at least
/// 2^14 symbols; range +-baud/8 with offsets beyond it aliasing back in;
/// throws NoSpectralPeak under 6 dB peak-to-median.
FreqOffsetEstimate estimate_freq_offset(std::span<const std::complex<double>> symbols,
                                        double baud_hz);

/// Multiplies symbol k by exp(-i 2 pi offset k / baud).
std::vector<std::complex<double>> derotate(std::span<const std::complex<double>> symbols,
                                           double offset_hz, double baud_hz);

/// RRC matched filter evaluated at symbol centers only. The first center sits
/// at timing_offset_samples (two RRC filters: rrc_span_symbols * sps); there
/// is no blind timing recovery.
std::vector<std::complex<double>> matched_filter_downsample(
    const SampledField& field, const txrx::ModemConfig& modem,
    std::size_t timing_offset_samples, std::size_t n_symbols);

struct PllConfig {
  double mu1 = 0.05;    ///< proportional gain, 0 < mu1 < 1
  double mu2 = 2.5e-4;  ///< integral gain, 0 <= mu2 < mu1
  enum class DecisionMode { Decided, DataAided };
  DecisionMode decision_mode = DecisionMode::Decided;

  void validate() const;
};

struct PllResult {
  std::vector<std::complex<double>> corrected;
  std::vector<double> phase_rad;     ///< phi_hat trajectory
  double error_variance_rad2 = 0.0;  ///< loop-error variance after acquisition
};

/// Decision-directed PLL:
///   y_k = r_k exp(-i phi_k); e_k = arg(y_k conj(d_k));
///   phi_{k+1} = phi_k + mu1 e_k + mu2 sum_{j<=k} e_j.
/// Decided mode uses the known symbols (>= 64 required) for acquisition and
/// decisions afterwards; DataAided uses known symbols throughout, so `known`
/// must cover the whole record. Divergence shows up as BER, never as a throw.
PllResult dd_pll(std::span<const std::complex<double>> symbols, const PllConfig& cfg,
                 const qam::Constellation& constellation,
                 std::span<const std::complex<double>> known);

/// Detects the quadrant rotation q in {0,1,2,3} with corrected ~ known *
/// exp(+i q pi/2); undo by multiplying with exp(-i q pi/2). Throws
/// AmbiguousRotation when the top two scores are within min_margin_db.
int resolve_rotation(std::span<const std::complex<double>> corrected_preamble,
                     std::span<const std::complex<double>> known_preamble,
                     double min_margin_db = 3.0);

struct BitErrorCount {
  std::uint64_t bits_compared = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
};

/// Exact Hamming count; inputs must have equal nonzero length.
BitErrorCount count_ber(std::span<const std::uint8_t> tx_bits,
                        std::span<const std::uint8_t> rx_bits);

struct FecPolicy {
  double ber_7pct = 3.8e-3;
  double ber_20pct = 2.4e-2;

  void validate() const;
};

enum class FecClass { Pass7Pct, Pass20Pct, Fail };
const char* to_string(FecClass c);

FecClass classify_fec(double ber, const FecPolicy& policy);

struct BerRecord {
  int channel_index = 0;
  std::uint64_t bits_compared = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  FecClass fec_class = FecClass::Fail;
  double mean_pll_phase_variance = 0.0;  ///< rad^2
};

}  // namespace ccs::rxdsp
