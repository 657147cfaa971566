#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/harness.hpp"
#include "ccs/qam.hpp"
#include "ccs/rng.hpp"
#include "ccs/rxdsp.hpp"
#include "ccs/transceiver.hpp"
#include "support/checks.hpp"

using namespace ccs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::complex<double>> qam_symbols(std::size_t n, std::uint64_t seed) {
  return qam::map_qam(qam::random_bits(6 * n, seed), 64);
}

void add_awgn(std::vector<std::complex<double>>& sym, double snr_db, std::uint64_t seed) {
  const double sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
  rng::NormalSampler g(seed);
  for (auto& v : sym) v += std::complex<double>(sigma * g(), sigma * g());
}

// symbol-spaced chain: Wiener carrier phase + AWGN -> FOE -> PLL -> BER
double chain_ber(double combined_linewidth_hz, double snr_db, std::size_t n_sym,
                 std::uint64_t seed, rxdsp::PllConfig::DecisionMode mode) {
  const auto con = qam::Constellation::square(64);
  const std::size_t n_pre = 256;
  const auto pre = qam_symbols(n_pre, rng::derive_seed(seed, 0, "pre"));
  const auto bits = qam::random_bits(6 * n_sym, rng::derive_seed(seed, 1, "bits"));
  auto tx = pre;
  {
    const auto payload = qam::map_qam(bits, 64);
    tx.insert(tx.end(), payload.begin(), payload.end());
  }
  auto rx = tx;
  const double baud = 5e9;
  if (combined_linewidth_hz > 0.0) {
    rng::NormalSampler g(rng::derive_seed(seed, 2, "phase"));
    const double sp = std::sqrt(kTwoPi * combined_linewidth_hz / baud);
    double phi = 0.0;
    for (auto& v : rx) {
      phi += sp * g();
      v *= std::polar(1.0, phi);
    }
  }
  add_awgn(rx, snr_db, rng::derive_seed(seed, 3, "awgn"));

  rxdsp::PllConfig pll;
  pll.decision_mode = mode;
  const auto known = (mode == rxdsp::PllConfig::DecisionMode::DataAided)
                         ? std::span<const std::complex<double>>(tx)
                         : std::span<const std::complex<double>>(tx).first(n_pre);
  const auto res = rxdsp::dd_pll(rx, pll, con, known);
  int q = rxdsp::resolve_rotation(std::span(res.corrected).first(n_pre),
                                  std::span(tx).first(n_pre), 0.0);
  auto corrected = res.corrected;
  const auto rot = std::polar(1.0, -std::numbers::pi / 2.0 * q);
  for (auto& v : corrected) v *= rot;
  const auto rx_bits = qam::demap_qam(
      std::span(corrected).subspan(n_pre, n_sym), 64);
  return rxdsp::count_ber(bits, rx_bits).ber;
}

}  // namespace

TEST_SUITE_BEGIN("rxdsp");

TEST_CASE("frequency-offset estimator nulls out a clean carrier") {
  auto sym = qam_symbols(1 << 14, 3);
  const auto est = rxdsp::estimate_freq_offset(sym, 5e9);
  CHECK(std::abs(est.offset_hz) < 2.0 * 5e9 / (1 << 14));
  CHECK(est.peak_to_median_db > 6.0);
}

TEST_CASE("a 100 MHz offset is recovered within 1 MHz") {
  auto sym = qam_symbols(1 << 14, 5);
  add_awgn(sym, 28.0, 6);
  for (std::size_t k = 0; k < sym.size(); ++k)
    sym[k] *= std::polar(1.0, kTwoPi * 100e6 * static_cast<double>(k) / 5e9);
  const auto est = rxdsp::estimate_freq_offset(sym, 5e9);
  CHECK(est.offset_hz == doctest::Approx(100e6).epsilon(0.01));
}

TEST_CASE("offsets beyond baud/8 alias back into range") {
  auto sym = qam_symbols(1 << 14, 7);
  for (std::size_t k = 0; k < sym.size(); ++k)
    sym[k] *= std::polar(1.0, kTwoPi * 800e6 * static_cast<double>(k) / 5e9);
  const auto est = rxdsp::estimate_freq_offset(sym, 5e9);
  CHECK(std::abs(est.offset_hz) <= 5e9 / 8.0 + 1e6);
  CHECK(std::abs(est.offset_hz - 800e6) > 100e6);  // wrapped, not recovered
}

TEST_CASE("a flat fourth-power spectrum raises NoSpectralPeak") {
  // constant-rate quadratic chirp: s^4 sweeps the whole band uniformly
  std::vector<std::complex<double>> sym(1 << 14);
  for (std::size_t k = 0; k < sym.size(); ++k) {
    const double x = static_cast<double>(k) / sym.size();
    sym[k] = std::polar(1.0, std::numbers::pi * 0.24 * x * x * sym.size());
  }
  CHECK_THROWS_AS(rxdsp::estimate_freq_offset(sym, 5e9), NoSpectralPeak);
}

TEST_CASE("estimator enforces its record-length precondition") {
  const auto sym = qam_symbols(1000, 9);
  CHECK_THROWS_AS(rxdsp::estimate_freq_offset(sym, 5e9), InvalidParameter);
}

TEST_CASE("matched-filter delay bookkeeping is exact") {
  txrx::ModemConfig cfg;
  const auto sym = qam_symbols(512, 11);
  const auto shaped = txrx::rrc_shape(sym, cfg);
  // total delay of two cascaded RRC filters
  CHECK(cfg.rrc_delay_samples() == 64);
  const std::size_t delay = 2 * static_cast<std::size_t>(cfg.rrc_delay_samples());
  CHECK(delay == static_cast<std::size_t>(cfg.rrc_span_symbols * cfg.sps));
  const auto rec = rxdsp::matched_filter_downsample(shaped, cfg, delay, sym.size());
  CHECK(test_support::rms_error(rec, sym) < 8.5e-3);
}

TEST_CASE("sampling half a symbol off-center destroys the eye") {
  txrx::ModemConfig cfg;
  const auto sym = qam_symbols(2048, 13);
  const auto shaped = txrx::rrc_shape(sym, cfg);
  const std::size_t delay = static_cast<std::size_t>(cfg.rrc_span_symbols * cfg.sps);
  const auto good = rxdsp::matched_filter_downsample(shaped, cfg, delay, sym.size() - 1);
  const auto bad = rxdsp::matched_filter_downsample(shaped, cfg, delay + 2, sym.size() - 1);
  const double evm_good = test_support::rms_error(good, std::span(sym).first(sym.size() - 1));
  const double evm_bad = test_support::rms_error(bad, std::span(sym).first(sym.size() - 1));
  CHECK(20.0 * std::log10(evm_bad / evm_good) > 10.0);
}

TEST_CASE("matched filter rejects an out-of-range timing offset") {
  txrx::ModemConfig cfg;
  const auto sym = qam_symbols(64, 15);
  const auto shaped = txrx::rrc_shape(sym, cfg);
  CHECK_THROWS_AS(
      rxdsp::matched_filter_downsample(shaped, cfg, shaped.size(), 1), InvalidParameter);
  CHECK_THROWS_AS(
      rxdsp::matched_filter_downsample(shaped, cfg, 0, 1 << 20), InvalidParameter);
}

TEST_CASE("quiescent loop stays put and makes no errors") {
  const double ber = chain_ber(0.0, 1e9, 20000, 1, rxdsp::PllConfig::DecisionMode::Decided);
  CHECK(ber == 0.0);
  // phase track itself
  const auto con = qam::Constellation::square(64);
  const auto tx = qam_symbols(4096, 2);
  const auto res = rxdsp::dd_pll(tx, rxdsp::PllConfig{}, con,
                                 std::span(tx).first(std::size_t{256}));
  for (double p : res.phase_rad) CHECK(std::abs(p) < 1e-3);
}

TEST_CASE("loop gains are validated") {
  rxdsp::PllConfig bad;
  bad.mu1 = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad.mu1 = 0.05;
  bad.mu2 = 0.06;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("a static offset converges to steady state within 5 mrad") {
  const auto con = qam::Constellation::square(64);
  auto tx = qam_symbols(4096, 3);
  auto rx = tx;
  const double theta = 0.06;
  for (auto& v : rx) v *= std::polar(1.0, theta);
  const auto res = rxdsp::dd_pll(rx, rxdsp::PllConfig{}, con,
                                 std::span(tx).first(std::size_t{256}));
  for (std::size_t k = 2000; k < res.phase_rad.size(); ++k)
    CHECK(std::abs(res.phase_rad[k] - theta) < 0.005);
}

TEST_CASE("error magnitude decays monotonically after acquisition") {
  const auto con = qam::Constellation::square(64);
  auto tx = qam_symbols(2048, 4);
  auto rx = tx;
  for (auto& v : rx) v *= std::polar(1.0, 0.06);
  const auto res = rxdsp::dd_pll(rx, rxdsp::PllConfig{}, con,
                                 std::span(tx).first(std::size_t{256}));
  const std::size_t start = 200;  // 10/mu1
  for (std::size_t k = start + 1; k < res.phase_rad.size(); ++k) {
    const double prev = std::abs(res.phase_rad[k - 1] - 0.06);
    const double cur = std::abs(res.phase_rad[k] - 0.06);
    CHECK(cur <= prev * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("the integral branch tracks a residual frequency ramp") {
  const auto con = qam::Constellation::square(64);
  auto tx = qam_symbols(20000, 5);
  auto rx = tx;
  const double baud = 5e9, offset = 100e3;
  for (std::size_t k = 0; k < rx.size(); ++k)
    rx[k] *= std::polar(1.0, kTwoPi * offset * static_cast<double>(k) / baud);
  const auto res = rxdsp::dd_pll(rx, rxdsp::PllConfig{}, con,
                                 std::span(tx).first(std::size_t{256}));
  // steady-state slope of the phase track, rad per symbol
  const std::size_t a = res.phase_rad.size() / 2, b = res.phase_rad.size() - 1;
  const double slope = (res.phase_rad[b] - res.phase_rad[a]) / static_cast<double>(b - a);
  CHECK(slope == doctest::Approx(kTwoPi * offset / baud).epsilon(0.02));
}

TEST_CASE("data-aided BER bounds decided BER from below, run by run") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const double da = chain_ber(4e5, 28.0, 20000, seed, rxdsp::PllConfig::DecisionMode::DataAided);
    const double dd = chain_ber(4e5, 28.0, 20000, seed, rxdsp::PllConfig::DecisionMode::Decided);
    CHECK(da <= dd);
  }
}

TEST_CASE("rising carrier linewidth strictly degrades the median BER") {
  const double grid[] = {5e4, 2e5, 6e5, 2e6};
  std::vector<double> medians;
  for (double lw : grid) {
    std::vector<double> bers;
    for (std::uint64_t seed = 0; seed < 9; ++seed)
      bers.push_back(chain_ber(lw, 28.0, 10000, 100 + seed,
                               rxdsp::PllConfig::DecisionMode::Decided));
    medians.push_back(test_support::median(bers));
  }
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] > medians[i - 1]);
  CHECK(medians.back() > 1e-1);
  CHECK(medians.front() < 3.8e-3);
}

TEST_CASE("rotation of a clean preamble is detected exactly") {
  const auto pre = qam_symbols(256, 21);
  for (int q = 0; q < 4; ++q) {
    auto rot = pre;
    for (auto& v : rot) v *= std::polar(1.0, std::numbers::pi / 2.0 * q);
    CHECK(rxdsp::resolve_rotation(rot, pre) == q);
  }
}

TEST_CASE("rotation succeeds at 15 dB SNR with a 256-symbol preamble") {
  const auto pre = qam_symbols(256, 23);
  int correct = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto rot = pre;
    const int q = t % 4;
    for (auto& v : rot) v *= std::polar(1.0, std::numbers::pi / 2.0 * q);
    add_awgn(rot, 15.0, 1000 + static_cast<std::uint64_t>(t));
    if (rxdsp::resolve_rotation(rot, pre, 0.0) == q) ++correct;
  }
  CHECK(correct >= 995);
}

TEST_CASE("a 45-degree rotation is ambiguous") {
  const auto pre = qam_symbols(256, 25);
  auto rot = pre;
  for (auto& v : rot) v *= std::polar(1.0, std::numbers::pi / 4.0);
  CHECK_THROWS_AS(rxdsp::resolve_rotation(rot, pre), AmbiguousRotation);
}

TEST_CASE("count_ber counts exactly") {
  std::vector<std::uint8_t> a{1, 0, 1, 1, 0, 0, 1, 0};
  auto b = a;
  CHECK(rxdsp::count_ber(a, b).ber == 0.0);
  for (auto& v : b) v ^= 1;
  CHECK(rxdsp::count_ber(a, b).ber == 1.0);
  std::vector<std::uint8_t> x(1000, 0), y(1000, 0);
  y[123] = 1;
  const auto c = rxdsp::count_ber(x, y);
  CHECK(c.bit_errors == 1);
  CHECK(c.ber == doctest::Approx(1e-3));
  y.pop_back();
  CHECK_THROWS_AS(rxdsp::count_ber(x, y), InvalidParameter);
}

TEST_CASE("FEC classification thresholds and monotonicity") {
  rxdsp::FecPolicy policy;
  CHECK(rxdsp::classify_fec(1e-4, policy) == rxdsp::FecClass::Pass7Pct);
  CHECK(rxdsp::classify_fec(1e-2, policy) == rxdsp::FecClass::Pass20Pct);
  CHECK(rxdsp::classify_fec(5e-2, policy) == rxdsp::FecClass::Fail);
  // classes only degrade as BER rises
  auto rank = [&](double ber) {
    switch (rxdsp::classify_fec(ber, policy)) {
      case rxdsp::FecClass::Pass7Pct: return 2;
      case rxdsp::FecClass::Pass20Pct: return 1;
      case rxdsp::FecClass::Fail: return 0;
    }
    return 0;
  };
  double prev = rank(0.0);
  for (double ber : {1e-5, 3.8e-3, 5e-3, 2.4e-2, 0.1, 1.0}) {
    CHECK(rank(ber) <= prev);
    prev = rank(ber);
  }
  rxdsp::FecPolicy bad;
  bad.ber_20pct = 1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  CHECK_THROWS_AS(rxdsp::classify_fec(1.5, policy), InvalidParameter);
}

TEST_SUITE_END();
