// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria pin the headline behaviors: analytic AWGN calibration,
// the 17-channel FEC classification, the referenced/free-running contrast,
// comb linewidth transfer, demux suppression, dispersion inversion, span
// arithmetic, byte-level determinism, and FM-noise estimator cross-validation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "ccs/comb.hpp"
#include "ccs/harness.hpp"
#include "ccs/metrology.hpp"
#include "ccs/oscillator.hpp"
#include "ccs/qam.hpp"
#include "ccs/rng.hpp"
#include "ccs/rxdsp.hpp"
#include "ccs/transceiver.hpp"

using namespace ccs;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double band_median(const metrology::PsdEstimate& psd, double f_lo, double f_hi) {
  std::vector<double> v;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k)
    if (psd.freqs_hz[k] >= f_lo && psd.freqs_hz[k] <= f_hi) v.push_back(psd.psd[k]);
  auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double max_subband_dev_db(const metrology::PsdEstimate& psd, double f_lo, double f_hi,
                          int n_sub, double target) {
  double worst = 0.0;
  const double ratio = std::pow(f_hi / f_lo, 1.0 / n_sub);
  for (int s = 0; s < n_sub; ++s) {
    const double a = f_lo * std::pow(ratio, s);
    const double med = band_median(psd, a, a * ratio);
    worst = std::max(worst, std::abs(10.0 * std::log10(med / target)));
  }
  return worst;
}

// 1. simulated 64-QAM BER within +-0.5 dB of the analytic Gray-coded curve
//    over BER in [1e-4, 1e-2], 1e6 symbols per point, under 60 s
void criterion_awgn_calibration() {
  const auto t0 = Clock::now();
  const auto cfg = harness::ExperimentConfig::defaults();
  const std::vector<double> snrs{20.0, 21.0, 22.0, 23.0, 24.0, 24.4};
  const auto pts = harness::run_awgn_calibration(cfg, snrs, 1000000);
  bool pass = true;
  double worst_db = 0.0;
  for (const auto& p : pts) {
    const double hi = harness::analytic_qam_ber(64, p.snr_db - 0.5);
    const double lo = harness::analytic_qam_ber(64, p.snr_db + 0.5);
    if (!(p.ber_sim <= hi && p.ber_sim >= lo)) pass = false;
    // equivalent SNR distance for the detail line
    double lo_db = p.snr_db - 0.6, hi_db = p.snr_db + 0.6;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo_db + hi_db);
      if (harness::analytic_qam_ber(64, mid) > p.ber_sim) lo_db = mid;
      else hi_db = mid;
    }
    worst_db = std::max(worst_db, std::abs(0.5 * (lo_db + hi_db) - p.snr_db));
  }
  const double wall = seconds_since(t0);
  if (wall >= 60.0) pass = false;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "worst offset %.3f dB over %zu points, %.1f s",
                worst_db, pts.size(), wall);
  report(1, "AWGN calibration within 0.5 dB of the analytic curve", pass, detail);
}

// 2. default 17-channel sweep: all under 2.4e-2, at least 15 under 3.8e-3,
//    well inside five minutes
void criterion_channel_sweep() {
  const auto t0 = Clock::now();
  auto cfg = harness::ExperimentConfig::defaults();  // 28 dB, 25 km, 1e5 symbols
  const auto report_rows = harness::run_channel_sweep(cfg, 0);
  const double wall = seconds_since(t0);
  int n_ok = 0, under20 = 0, under7 = 0;
  for (const auto& row : report_rows.rows) {
    if (!row.record) continue;
    ++n_ok;
    if (row.record->ber < 2.4e-2) ++under20;
    if (row.record->ber < 3.8e-3) ++under7;
  }
  const bool pass = n_ok == 17 && under20 == 17 && under7 >= 15 && wall < 300.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d channels, %d under 2.4e-2, %d under 3.8e-3, %.1f s", n_ok, under20,
                under7, wall);
  report(2, "17-channel sweep meets the FEC classification", pass, detail);
}

// 3. identical bits and noise: referenced carrier recovers, free-running fails
void criterion_constellation_contrast() {
  auto cfg = harness::ExperimentConfig::defaults();
  const auto cmp = harness::run_constellation_compare(cfg);
  const bool pass = cmp.with_ref.record.ber < 3.8e-3 && cmp.without_ref.record.ber > 1e-1 &&
                    cmp.clusters_without < 64;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "with: ber %.2e clusters %d; without: ber %.2e clusters %d",
                cmp.with_ref.record.ber, cmp.clusters_with, cmp.without_ref.record.ber,
                cmp.clusters_without);
  report(3, "comb referencing separates recoverable from unrecoverable", pass, detail);
}

// 4. every demultiplexed line's FM-noise floor equals the master h0 within
//    1 dB over at least two decades
void criterion_linewidth_transfer() {
  auto cfg = harness::ExperimentConfig::defaults();
  const double fs = 1e9;
  const std::size_t n = 1 << 21;
  const auto comb_real = comb::generate_comb(cfg.comb_spec, n, fs,
                                             rng::derive_seed(1, 0, "acceptance.comb"));
  double worst = 0.0;
  for (int line = 0; line < cfg.comb_spec.n_lines; ++line) {
    comb::DemuxConfig d = cfg.demux;
    d.dfb_freq_hz = cfg.comb_spec.line_frequency_hz(line);
    const auto carrier = comb::demux_line(comb_real, d);
    const auto psd = metrology::fm_noise_psd(carrier.field);
    worst = std::max(worst, max_subband_dev_db(psd, 4e6, 4e8, 8,
                                               cfg.comb_spec.master.h0_hz2_per_hz));
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "worst sub-band deviation %.2f dB across 17 lines",
                worst);
  report(4, "master linewidth transfers to every demultiplexed line", worst < 1.0, detail);
}

// 5. residual lines sit at the configured suppression within 0.5 dB
void criterion_suppression() {
  auto cfg = harness::ExperimentConfig::defaults();
  const auto comb_real = comb::generate_comb(cfg.comb_spec, 1 << 17, 420e9,
                                             rng::derive_seed(2, 0, "acceptance.comb"));
  double worst = 0.0;
  for (int line : {0, 8, 16}) {
    comb::DemuxConfig d = cfg.demux;
    d.dfb_freq_hz = cfg.comb_spec.line_frequency_hz(line);
    const auto out = comb::demux_line(comb_real, d);
    const auto spec = metrology::optical_spectrum(out.field, 5e8);
    double carrier_mw = 0.0;
    std::vector<double> line_mw(static_cast<std::size_t>(cfg.comb_spec.n_lines), 0.0);
    for (std::size_t b = 0; b < spec.freqs_hz.size(); ++b) {
      const double p = std::pow(10.0, spec.power_dbm[b] / 10.0);
      for (int k = 0; k < cfg.comb_spec.n_lines; ++k)
        if (std::abs(spec.freqs_hz[b] - cfg.comb_spec.line_frequency_hz(k)) < 2e9)
          line_mw[static_cast<std::size_t>(k)] += p;
    }
    carrier_mw = line_mw[static_cast<std::size_t>(line)];
    for (int k = 0; k < cfg.comb_spec.n_lines; ++k) {
      if (k == line) continue;
      const double rel_db = 10.0 * std::log10(carrier_mw / line_mw[static_cast<std::size_t>(k)]);
      worst = std::max(worst, std::abs(rel_db - cfg.demux.suppression_db));
      if (rel_db < 40.0 - 0.5) worst = std::max(worst, 1e9);
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "worst deviation from 40 dB: %.2f dB", worst);
  report(5, "residual-line suppression matches the configured 40 dB", worst <= 0.5, detail);
}

// 6. cd_compensate inverts 25 km of dispersion to 1e-6 RMS
void criterion_cd_inverse() {
  txrx::ModemConfig modem;
  txrx::FiberConfig fiber;
  const auto bits = qam::random_bits(6 * 16384, 3);
  const auto shaped = txrx::rrc_shape(qam::map_qam(bits, 64), modem);
  auto out = rxdsp::cd_compensate(txrx::propagate_fiber(shaped, fiber), fiber);
  const double undo = std::pow(10.0, fiber.attenuation_db_km * fiber.length_km / 20.0);
  for (auto& v : out.iq) v *= undo;
  const std::size_t guard = 1024;
  double acc = 0.0, ref = 0.0;
  for (std::size_t k = guard; k < shaped.size() - guard; ++k) {
    acc += std::norm(out.iq[k] - shaped.iq[k]);
    ref += std::norm(shaped.iq[k]);
  }
  const double rms = std::sqrt(acc / ref);
  char detail[64];
  std::snprintf(detail, sizeof(detail), "relative RMS %.2e", rms);
  report(6, "dispersion compensation restores back-to-back", rms < 1e-6, detail);
}

// 7. usable_span(10 GHz, 17) = 160 GHz exactly
void criterion_span() {
  const double span = harness::usable_span_hz(10e9, 17);
  char detail[64];
  std::snprintf(detail, sizeof(detail), "%.9g Hz", span);
  report(7, "span planner gives 160 GHz exactly", span == 160e9, detail);
}

// 8. byte-identical CSV payloads across repeated runs and thread counts
void criterion_determinism() {
  auto cfg = harness::ExperimentConfig::defaults();
  cfg.n_symbols = 20000;
  cfg.channels = {0, 4, 8, 12, 16};
  const auto a = harness::sweep_csv(harness::run_channel_sweep(cfg, 1));
  const auto b = harness::sweep_csv(harness::run_channel_sweep(cfg, 4));
  const auto c = harness::sweep_csv(harness::run_channel_sweep(cfg, 2));
  bool pass = (a == b) && (a == c);

  cfg.metrology.n_samples = 1 << 20;
  cfg.metrology.lines = {0, 16};
  const auto ra = harness::run_fm_noise_report(cfg);
  const auto rb = harness::run_fm_noise_report(cfg);
  for (std::size_t i = 0; i < ra.size() && pass; ++i)
    pass = ra[i].psd.psd == rb[i].psd.psd && ra[i].psd.freqs_hz == rb[i].psd.freqs_hz;

  const double snrs[] = {22.0};
  const auto ca = harness::calibration_csv(harness::run_awgn_calibration(cfg, snrs, 50000));
  const auto cb = harness::calibration_csv(harness::run_awgn_calibration(cfg, snrs, 50000));
  pass = pass && (ca == cb);
  report(8, "fixed seeds give byte-identical outputs at any thread count", pass,
         pass ? "sweep, fmnoise, calibration all stable" : "outputs differ");
}

// 9. DSH emulation agrees with direct FM PSD within 2 dB and reproduces the
//    f^2 detection-noise floor
void criterion_estimator_crossval() {
  bool pass = true;
  double worst = 0.0;
  for (double h0 : {1.0, 1e4}) {
    osc::OscillatorSpec spec{h0, 0.0, 1.0, 0.0};
    const auto field = osc::cw_field(
        spec, osc::synth_phase(spec, 1 << 21, 1e9, rng::derive_seed(4, 0, "acceptance.dsh")));
    const auto direct = metrology::fm_noise_psd(field);
    const auto dsh = metrology::dsh_emulate(field, metrology::DshConfig{});
    // compare sub-band medians of the two estimators over two decades
    const double ratio = std::pow(1e2, 1.0 / 6.0);
    for (int s = 0; s < 6; ++s) {
      const double a = 2e6 * std::pow(ratio, s);
      const double dev = std::abs(10.0 * std::log10(band_median(dsh, a, a * ratio) /
                                                    band_median(direct, a, a * ratio)));
      worst = std::max(worst, dev);
      if (dev >= 2.0) pass = false;
    }
  }

  osc::OscillatorSpec spec{1.0, 0.0, 1.0, 0.0};
  const auto field = osc::cw_field(
      spec, osc::synth_phase(spec, 1 << 21, 1e9, rng::derive_seed(4, 1, "acceptance.dsh")));
  metrology::DshConfig noisy;
  noisy.rx_noise_psd = 1e-14;
  noisy.noise_seed = 9;
  const auto floor_psd = metrology::dsh_emulate(field, noisy);
  const double slope_db = 10.0 * std::log10(band_median(floor_psd, 3e8, 4.4e8) /
                                            band_median(floor_psd, 3e7, 4.4e7));
  if (!(slope_db > 14.0 && slope_db < 26.0)) pass = false;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "worst estimator gap %.2f dB; floor slope %.1f dB/decade", worst, slope_db);
  report(9, "DSH emulation cross-validates against direct FM PSD", pass, detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_awgn_calibration();
  criterion_channel_sweep();
  criterion_constellation_contrast();
  criterion_linewidth_transfer();
  criterion_suppression();
  criterion_cd_inverse();
  criterion_span();
  criterion_determinism();
  criterion_estimator_crossval();
  std::printf("%d of 9 criteria passed in %.1f s\n", 9 - g_failures, seconds_since(t0));
  return g_failures ? 1 : 0;
}
