#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccs/comb.hpp"
#include "ccs/oscillator.hpp"
#include "ccs/rxdsp.hpp"
#include "ccs/transceiver.hpp"

namespace ccs::harness {

struct MetrologyConfig {
  double fs_hz = 1e9;
  std::size_t n_samples = 1ull << 22;
  std::vector<int> lines = {0, 8, 16};  ///< comb lines in the FM-noise report
};

/// Everything one experiment needs. Defaults reproduce the headline setup:
/// 10 GHz FSR, 17 lines, 5 GBaud 64-QAM over 25 km at 28 dB symbol SNR,
/// sub-Hz master laser vs a free-running MHz-class DFB reference.
struct ExperimentConfig {
  comb::CombSpec comb_spec;
  double demux_detuning_hz = 0.0;  ///< DFB offset from the target line
  comb::DemuxConfig demux;         ///< dfb_freq_hz is set per channel
  txrx::ModemConfig modem;
  txrx::FiberConfig fiber;
  txrx::NoiseConfig noise;
  rxdsp::PllConfig pll;
  rxdsp::FecPolicy fec;
  osc::OscillatorSpec free_dfb;  ///< unreferenced carrier/LO model
  double lo_offset_hz = 50e6;    ///< intradyne offset applied to the LO
  std::vector<int> channels;     ///< empty: all lines
  std::size_t n_symbols = 100000;
  std::uint64_t master_seed = 1;
  MetrologyConfig metrology;

  static ExperimentConfig defaults();
  std::vector<int> channel_list() const;
  void validate() const;
};

/// Parses the dotted key = value format (see emit_config for the reference).
/// Unknown keys and malformed lines raise ConfigError with the line number;
/// constraint violations raise InvalidParameter naming the invariant.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Serializes a config in the same format parse_config reads; emitting the
/// defaults produces the reference documentation of every key.
std::string emit_config(const ExperimentConfig& cfg);

}  // namespace ccs::harness
