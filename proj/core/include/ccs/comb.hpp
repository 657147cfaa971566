#pragma once

#include <cstdint>
#include <vector>

#include "ccs/field.hpp"
#include "ccs/oscillator.hpp"

namespace ccs::comb {

/// Gain-switched, externally injected comb. The master-laser phase is common
/// to every line; the RF-drive phase enters line k as (k - center) * phi_rf,
/// the standard gain-switched phase model. Line k sits at
/// (k - center_line_index) * fsr relative to the simulation center; the
/// master's freq_offset_hz is not consulted (the line grid is the reference).
struct CombSpec {
  double fsr_hz = 10e9;
  int n_lines = 17;
  int center_line_index = 8;
  std::vector<double> line_powers_mw;  ///< length n_lines
  osc::OscillatorSpec master;
  osc::OscillatorSpec rf_drive;

  void validate() const;
  double line_frequency_hz(int k) const;
  static std::vector<double> flat_powers(int n_lines, double power_mw);
};

/// One drawn realization; all lines share the two stored phase trajectories.
struct CombRealization {
  CombSpec spec;
  double fs_hz = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> master_phase_rad;
  std::vector<double> rf_phase_rad;

  int n_lines() const { return spec.n_lines; }
  double line_frequency_hz(int k) const { return spec.line_frequency_hz(k); }

  /// Envelope of line k about its own carrier:
  /// sqrt(P_k) exp(i(phi_m + (k-c) phi_rf)), center_offset = line frequency.
  SampledField line_field(int k) const;

  /// All lines summed at their offsets about the simulation center.
  /// Requires every line strictly inside +-fs/2.
  SampledField composite_field() const;
};

CombRealization generate_comb(const CombSpec& spec, std::size_t n, double fs_hz,
                              std::uint64_t seed);

struct DemuxConfig {
  double dfb_freq_hz = 0.0;  ///< free-running DFB frequency relative to center
  double locking_half_range_hz = 2.5e9;
  double suppression_db = 40.0;
  double output_power_mw = 10.0;

  void validate() const;
};

struct DemuxedCarrier {
  SampledField field;  ///< locked line at DC, residual lines as in-band tones
  int locked_line_index = 0;
  double detuning_hz = 0.0;
  double achieved_suppression_db = 0.0;
};

/// Injection-locking demultiplexer: locks to the spectrally closest comb line
/// (ties break to the lower index) and copies its phase trajectory unchanged.
/// Every other line is kept at its power relative to the locked line minus
/// suppression_db; the total is scaled to output_power_mw. Residual lines
/// outside +-fs/2 cannot be represented at the realization's sample rate and
/// are omitted (a receiver of bandwidth fs/2 never sees them). Throws
/// NoLineInLockingRange when the nearest line exceeds locking_half_range_hz.
DemuxedCarrier demux_line(const CombRealization& comb, const DemuxConfig& cfg);

}  // namespace ccs::comb
