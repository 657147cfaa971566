#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccs/config.hpp"
#include "ccs/metrology.hpp"
#include "ccs/qam.hpp"
#include "ccs/rxdsp.hpp"

namespace ccs::harness {

/// Usable superchannel span of n carriers on an fsr grid: fsr * (n - 1).
double usable_span_hz(double fsr_hz, int n_channels);

/// Exact BER of Gray-coded square m-QAM over AWGN at symbol SNR Es/N0,
/// by enumeration of the per-axis PAM decision regions and their Gray bit
/// distances. Serves as the independent reference for simulated curves.
double analytic_qam_ber(int m, double esn0_db);

enum class CarrierMode { CombReferenced, FreeRunning };

struct ChannelOutput {
  rxdsp::BerRecord record;
  std::vector<std::complex<double>> payload_symbols;  ///< post-DSP, pre-demap
  double freq_offset_est_hz = 0.0;
};

/// One end-to-end channel: demultiplexed (or free-running) carrier, 64-QAM
/// shaping, fiber, noise loading, coherent detection and the full receive
/// chain. All randomness derives from (master_seed, channel, stage), so a
/// channel's result never depends on which other channels run.
ChannelOutput run_single_channel(const ExperimentConfig& cfg, int channel,
                                 CarrierMode mode);

struct ChannelResult {
  int channel = 0;
  std::optional<rxdsp::BerRecord> record;
  std::string error;  ///< empty on success
  double wall_ms = 0.0;
};

struct SweepReport {
  std::vector<ChannelResult> rows;  ///< ordered by channel index
};

/// Per-channel errors are recorded in the report, not thrown.
/// threads <= 0 selects hardware concurrency; thread count never changes
/// the results.
SweepReport run_channel_sweep(const ExperimentConfig& cfg, int threads = 1);

/// CSV with header channel,ber,bits,errors,fec_class,pll_phase_var.
/// Failed channels carry an empty ber/pll field and fec_class ERROR.
std::string sweep_csv(const SweepReport& report);

struct ConstellationCompare {
  ChannelOutput with_ref;
  ChannelOutput without_ref;
  int clusters_with = 0;
  int clusters_without = 0;
};

/// Identical pipeline, bits and noise twice: once with the comb-referenced
/// carrier and LO, once with the free-running DFB pair. Differences are
/// attributable to phase noise alone.
ConstellationCompare run_constellation_compare(const ExperimentConfig& cfg);

std::string symbols_csv(std::span<const std::complex<double>> symbols);
std::string compare_csv(const ConstellationCompare& cmp);

struct NamedPsd {
  std::string name;
  metrology::PsdEstimate psd;
};

/// FM-noise PSDs of the master laser, the selected demultiplexed comb lines,
/// and the free-running DFB reference.
std::vector<NamedPsd> run_fm_noise_report(const ExperimentConfig& cfg);

struct CalibrationPoint {
  double snr_db = 0.0;
  double ber_sim = 0.0;
  double ber_analytic = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
};

/// Back-to-back modem chain (map, shape, AWGN, matched filter, demap) against
/// the analytic curve, one point per SNR.
std::vector<CalibrationPoint> run_awgn_calibration(const ExperimentConfig& cfg,
                                                   std::span<const double> snrs_db,
                                                   std::size_t n_symbols);

std::string calibration_csv(std::span<const CalibrationPoint> points);

/// Number of constellation sites owning a local maximum of the smoothed 2-D
/// symbol histogram within 0.3 of the minimum point distance. A resolvable
/// m-QAM cloud scores m; a phase-smeared cloud scores well below.
int count_resolved_clusters(std::span<const std::complex<double>> symbols,
                            const qam::Constellation& constellation);

}  // namespace ccs::harness
