#include "ccs/comb.hpp"

#include <cmath>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/rng.hpp"

namespace ccs::comb {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void CombSpec::validate() const {
  if (!(fsr_hz > 0.0)) throw InvalidParameter("CombSpec: fsr_hz must be > 0");
  if (n_lines < 1) throw InvalidParameter("CombSpec: n_lines must be >= 1");
  if (center_line_index < 0 || center_line_index >= n_lines)
    throw InvalidParameter("CombSpec: center_line_index must lie in [0, n_lines)");
  if (line_powers_mw.size() != static_cast<std::size_t>(n_lines))
    throw InvalidParameter("CombSpec: line_powers_mw must have n_lines entries");
  for (double p : line_powers_mw)
    if (!(p > 0.0)) throw InvalidParameter("CombSpec: all line powers must be > 0");
  master.validate();
  rf_drive.validate();
}

double CombSpec::line_frequency_hz(int k) const {
  if (k < 0 || k >= n_lines)
    throw InvalidParameter("line_frequency_hz: line index out of range");
  return (static_cast<double>(k) - static_cast<double>(center_line_index)) * fsr_hz;
}

std::vector<double> CombSpec::flat_powers(int n_lines, double power_mw) {
  return std::vector<double>(static_cast<std::size_t>(n_lines), power_mw);
}

SampledField CombRealization::line_field(int k) const {
  const double fk = line_frequency_hz(k);  // validates k
  SampledField f;
  f.fs_hz = fs_hz;
  f.center_offset_hz = fk;
  f.iq.resize(n);
  const double amp = std::sqrt(spec.line_powers_mw[static_cast<std::size_t>(k)]);
  const double order = static_cast<double>(k - spec.center_line_index);
  for (std::size_t t = 0; t < n; ++t)
    f.iq[t] = std::polar(amp, master_phase_rad[t] + order * rf_phase_rad[t]);
  return f;
}

SampledField CombRealization::composite_field() const {
  for (int k = 0; k < spec.n_lines; ++k)
    if (std::abs(line_frequency_hz(k)) >= fs_hz / 2.0)
      throw InvalidParameter("composite_field: a comb line falls outside +-fs/2");
  SampledField f;
  f.fs_hz = fs_hz;
  f.center_offset_hz = 0.0;
  f.iq.assign(n, {0.0, 0.0});
  for (int k = 0; k < spec.n_lines; ++k) {
    const double amp = std::sqrt(spec.line_powers_mw[static_cast<std::size_t>(k)]);
    const double order = static_cast<double>(k - spec.center_line_index);
    const double cyc = line_frequency_hz(k) / fs_hz;
    for (std::size_t t = 0; t < n; ++t) {
      const double turns = std::fmod(cyc * static_cast<double>(t), 1.0);
      f.iq[t] += std::polar(amp, kTwoPi * turns + master_phase_rad[t] +
                                     order * rf_phase_rad[t]);
    }
  }
  return f;
}

CombRealization generate_comb(const CombSpec& spec, std::size_t n, double fs_hz,
                              std::uint64_t seed) {
  spec.validate();
  if (n < 2) throw InvalidParameter("generate_comb: n must be >= 2");
  if (!(fs_hz > 0.0)) throw InvalidParameter("generate_comb: fs_hz must be > 0");
  CombRealization out;
  out.spec = spec;
  out.fs_hz = fs_hz;
  out.n = n;
  out.seed = seed;
  out.master_phase_rad =
      osc::synth_phase(spec.master, n, fs_hz, rng::derive_seed(seed, 0, "comb.master"))
          .samples_rad;
  out.rf_phase_rad =
      osc::synth_phase(spec.rf_drive, n, fs_hz, rng::derive_seed(seed, 1, "comb.rf"))
          .samples_rad;
  return out;
}

void DemuxConfig::validate() const {
  if (!(locking_half_range_hz > 0.0))
    throw InvalidParameter("DemuxConfig: locking_half_range_hz must be > 0");
  if (!(suppression_db >= 0.0))
    throw InvalidParameter("DemuxConfig: suppression_db must be >= 0");
  if (!(output_power_mw > 0.0))
    throw InvalidParameter("DemuxConfig: output_power_mw must be > 0");
}

DemuxedCarrier demux_line(const CombRealization& comb, const DemuxConfig& cfg) {
  cfg.validate();
  if (comb.n == 0 || comb.spec.n_lines < 1)
    throw InvalidParameter("demux_line: empty comb realization");

  // spectrally closest line wins; exact ties go to the lower index
  int best = 0;
  double best_det = std::abs(cfg.dfb_freq_hz - comb.line_frequency_hz(0));
  for (int k = 1; k < comb.spec.n_lines; ++k) {
    const double det = std::abs(cfg.dfb_freq_hz - comb.line_frequency_hz(k));
    if (det < best_det) {
      best = k;
      best_det = det;
    }
  }
  const double detuning = cfg.dfb_freq_hz - comb.line_frequency_hz(best);
  if (std::abs(detuning) > cfg.locking_half_range_hz)
    throw NoLineInLockingRange(detuning, cfg.locking_half_range_hz);

  const double p_locked = comb.spec.line_powers_mw[static_cast<std::size_t>(best)];
  const double supp = std::pow(10.0, -cfg.suppression_db / 10.0);
  const double f_locked = comb.line_frequency_hz(best);

  // relative powers of the components that fit in the sampled band
  struct Residual {
    int index;
    double rel_power;
    double offset_hz;
  };
  std::vector<Residual> residuals;
  double total_rel = 1.0;
  for (int k = 0; k < comb.spec.n_lines; ++k) {
    if (k == best) continue;
    const double off = comb.line_frequency_hz(k) - f_locked;
    if (std::abs(off) >= comb.fs_hz / 2.0) continue;
    const double rel =
        comb.spec.line_powers_mw[static_cast<std::size_t>(k)] / p_locked * supp;
    residuals.push_back({k, rel, off});
    total_rel += rel;
  }

  DemuxedCarrier out;
  out.locked_line_index = best;
  out.detuning_hz = detuning;
  out.achieved_suppression_db = cfg.suppression_db;
  out.field.fs_hz = comb.fs_hz;
  out.field.center_offset_hz = f_locked;
  out.field.iq.resize(comb.n);

  // scale so the emitted total power is exactly output_power_mw
  const double amp0 = std::sqrt(cfg.output_power_mw / total_rel);
  const int c = comb.spec.center_line_index;
  const double order0 = static_cast<double>(best - c);
  for (std::size_t t = 0; t < comb.n; ++t)
    out.field.iq[t] = std::polar(
        amp0, comb.master_phase_rad[t] + order0 * comb.rf_phase_rad[t]);
  for (const auto& r : residuals) {
    const double amp = amp0 * std::sqrt(r.rel_power);
    const double order = static_cast<double>(r.index - c);
    const double cyc = r.offset_hz / comb.fs_hz;
    for (std::size_t t = 0; t < comb.n; ++t) {
      const double turns = std::fmod(cyc * static_cast<double>(t), 1.0);
      out.field.iq[t] += std::polar(amp, kTwoPi * turns + comb.master_phase_rad[t] +
                                             order * comb.rf_phase_rad[t]);
    }
  }
  return out;
}

}  // namespace ccs::comb
