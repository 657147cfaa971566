#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ccs/comb.hpp"
#include "ccs/errors.hpp"
#include "ccs/metrology.hpp"
#include "ccs/oscillator.hpp"
#include "support/checks.hpp"

using namespace ccs;
using test_support::band_median;
using test_support::max_subband_dev_db;

namespace {

SampledField white_fm_field(double h0, double fs, std::size_t n, std::uint64_t seed) {
  osc::OscillatorSpec spec{h0, 0.0, 1.0, 0.0};
  return osc::cw_field(spec, osc::synth_phase(spec, n, fs, seed));
}

}  // namespace

TEST_SUITE_BEGIN("metrology");

TEST_CASE("pure tone measures a numerically empty FM-noise PSD") {
  osc::OscillatorSpec spec{0.0, 0.0, 1.0, 12.5e6};
  const auto field = osc::cw_field(spec, osc::synth_phase(spec, 1 << 16, 1e9, 0));
  const auto psd = metrology::fm_noise_psd(field);
  for (double v : psd.psd) CHECK(v < 1e-6);
}

TEST_CASE("white FM field reads back flat at h0") {
  const auto field = white_fm_field(10.0, 1e9, 1 << 20, 23);
  const auto psd = metrology::fm_noise_psd(field);
  CHECK(max_subband_dev_db(psd, 3e5, 3e7, 8, 10.0) < 1.0);
  CHECK(psd.window_name == "hann");
  CHECK(psd.segment_count >= 8);
}

TEST_CASE("sinusoidal FM integrates to deviation^2 / 2 at the mod frequency") {
  const double fs = 1e6, dev = 1e3, fm = 5e3;
  const std::size_t n = 1 << 20;
  osc::PhaseTrajectory phase;
  phase.fs_hz = fs;
  phase.samples_rad.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    phase.samples_rad[k] = (dev / fm) * std::sin(2.0 * std::numbers::pi * fm * k / fs);
  const auto psd = metrology::fm_noise_psd(phase);
  // integrate across the spectral line
  const double df = psd.freqs_hz[1] - psd.freqs_hz[0];
  double power = 0.0;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k)
    if (std::abs(psd.freqs_hz[k] - fm) <= 8.0 * df) power += psd.psd[k] * df;
  CHECK(power == doctest::Approx(dev * dev / 2.0).epsilon(0.05));
}

TEST_CASE("fm_noise_psd rejects short records") {
  const auto field = white_fm_field(1.0, 1e9, 256, 0);
  metrology::WelchParams wp{128, 0.5};
  CHECK_THROWS_AS(metrology::fm_noise_psd(field, wp), InvalidParameter);
}

TEST_CASE("DSH of a noiseless tone is numerically empty") {
  osc::OscillatorSpec spec{0.0, 0.0, 1.0, 3e6};
  const auto field = osc::cw_field(spec, osc::synth_phase(spec, 1 << 18, 1e9, 0));
  metrology::DshConfig cfg;  // 10 us delay, 80 MHz shift, no detection noise
  const auto psd = metrology::dsh_emulate(field, cfg);
  for (double v : psd.psd) CHECK(v < 1e-6);
}

TEST_CASE("DSH and direct FM PSD agree on white-FM fields") {
  for (double h0 : {1.0, 1e4}) {
    const auto field = white_fm_field(h0, 1e9, 1 << 21, 31);
    const auto direct = metrology::fm_noise_psd(field);
    const auto dsh = metrology::dsh_emulate(field, metrology::DshConfig{});
    // both flat at h0; compare sub-band medians over two decades
    CHECK(max_subband_dev_db(direct, 2e6, 2e8, 6, h0) < 1.0);
    CHECK(max_subband_dev_db(dsh, 2e6, 2e8, 6, h0) < 2.0);
  }
}

TEST_CASE("DSH transfer nulls are masked") {
  const auto field = white_fm_field(10.0, 1e9, 1 << 19, 7);
  metrology::DshConfig cfg;
  const auto psd = metrology::dsh_emulate(field, cfg);
  const double tau = 10e-6;
  for (double f : psd.freqs_hz) {
    const double ft = f * tau;
    CHECK(std::abs(ft - std::round(ft)) >= 0.1);
  }
}

TEST_CASE("detection noise produces an f^2 measurement floor") {
  const auto field = white_fm_field(1.0, 1e9, 1 << 21, 3);
  metrology::DshConfig cfg;
  cfg.rx_noise_psd = 1e-14;  // floor dominates h0 = 1 above ~10 MHz
  cfg.noise_seed = 5;
  const auto psd = metrology::dsh_emulate(field, cfg);
  // floor dominates above ~1e8 Hz; a decade step should gain ~20 dB
  const double lo = band_median(psd, 3e7, 4.4e7);
  const double hi = band_median(psd, 3e8, 4.4e8);
  const double slope_db = 10.0 * std::log10(hi / lo);
  CHECK(slope_db > 14.0);
  CHECK(slope_db < 26.0);
}

TEST_CASE("the DSH floor hides the true PSD once it dominates") {
  metrology::DshConfig cfg;
  cfg.rx_noise_psd = 1e-13;
  cfg.noise_seed = 9;
  const auto a = metrology::dsh_emulate(white_fm_field(1.0, 1e9, 1 << 20, 1), cfg);
  const auto b = metrology::dsh_emulate(white_fm_field(100.0, 1e9, 1 << 20, 2), cfg);
  const double fa = band_median(a, 2e8, 4.5e8);
  const double fb = band_median(b, 2e8, 4.5e8);
  CHECK(std::abs(10.0 * std::log10(fa / fb)) < 1.0);
}

TEST_CASE("DSH rejects a delay longer than the record") {
  const auto field = white_fm_field(1.0, 1e9, 4096, 0);
  metrology::DshConfig cfg;
  cfg.delay_s = 1.0;
  CHECK_THROWS_AS(metrology::dsh_emulate(field, cfg), InvalidParameter);
}

TEST_CASE("optical spectrum puts a 10 mW tone at 10 dBm") {
  osc::OscillatorSpec spec{0.0, 0.0, 10.0, 0.0};
  const auto field = osc::cw_field(spec, osc::synth_phase(spec, 1 << 16, 1e9, 0));
  const auto spec_out = metrology::optical_spectrum(field, 1e6);
  double peak = -300.0;
  for (double p : spec_out.power_dbm) peak = std::max(peak, p);
  CHECK(peak == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("optical spectrum integrates to the field power") {
  // modulated-looking field: tone plus phase noise plus a second line
  osc::OscillatorSpec spec{1e3, 0.0, 7.5, 2e8};
  auto field = osc::cw_field(spec, osc::synth_phase(spec, 1 << 18, 2e9, 21));
  const auto spec_out = metrology::optical_spectrum(field, 5e5);
  double total = 0.0;
  for (double p : spec_out.power_dbm) total += std::pow(10.0, p / 10.0);
  CHECK(total == doctest::Approx(mean_power_mw(field)).epsilon(0.005));
}

TEST_CASE("optical spectrum rejects rbw below the record resolution") {
  const auto field = white_fm_field(1.0, 1e9, 4096, 0);
  CHECK_THROWS_AS(metrology::optical_spectrum(field, 1e3), InvalidParameter);
}

TEST_CASE("a flat 17-line comb shows 17 peaks spaced by the FSR") {
  comb::CombSpec spec;
  spec.line_powers_mw = comb::CombSpec::flat_powers(17, 10.0);
  spec.master = {0.3, 0.0, 10.0, 0.0};
  spec.rf_drive = {1e-4, 0.0, 1.0, 0.0};
  const auto real = comb::generate_comb(spec, 1 << 16, 200e9, 5);
  const auto wide = real.composite_field();
  const auto spec_out = metrology::optical_spectrum(wide, 2e8);
  // collect bins within 20 dB of the peak, group into lines
  double peak = -300.0;
  for (double p : spec_out.power_dbm) peak = std::max(peak, p);
  std::vector<double> line_freqs;
  bool in_line = false;
  for (std::size_t k = 0; k < spec_out.freqs_hz.size(); ++k) {
    if (spec_out.power_dbm[k] > peak - 20.0) {
      if (!in_line) line_freqs.push_back(spec_out.freqs_hz[k]);
      in_line = true;
    } else {
      in_line = false;
    }
  }
  REQUIRE(line_freqs.size() == 17);
  for (std::size_t i = 1; i < line_freqs.size(); ++i)
    CHECK(line_freqs[i] - line_freqs[i - 1] == doctest::Approx(10e9).epsilon(0.05));
}

TEST_CASE("estimate_linewidth returns pi times the band median") {
  metrology::PsdEstimate psd;
  for (int k = 1; k <= 100; ++k) {
    psd.freqs_hz.push_back(1e3 * k);
    psd.psd.push_back(10.0);
  }
  CHECK(metrology::estimate_linewidth_hz(psd, 1e3, 1e5) ==
        doctest::Approx(31.41592653589793).epsilon(1e-12));
  for (auto& v : psd.psd) v = 1.0 / std::numbers::pi;
  CHECK(metrology::estimate_linewidth_hz(psd, 1e3, 1e5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(metrology::estimate_linewidth_hz(psd, 1e9, 2e9), InvalidParameter);
}

TEST_CASE("default master spec measures a sub-Hz linewidth") {
  osc::OscillatorSpec master{0.3, 1e5, 10.0, 0.0};
  const auto phase = osc::synth_phase(master, 1 << 21, 1e9, 77);
  const auto psd = metrology::fm_noise_psd(phase);
  const double lw = metrology::estimate_linewidth_hz(psd, 1e7, 4e8);
  CHECK(lw < 1.0);
  CHECK(lw > 0.5);  // pi * 0.3 = 0.94
}

TEST_SUITE_END();
