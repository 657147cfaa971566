#include "ccs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "ccs/errors.hpp"
#include "ccs/metrology.hpp"
#include "ccs/rng.hpp"

namespace ccs::harness {

namespace {
constexpr double kPi = std::numbers::pi;

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

int popcount_xor(unsigned a, unsigned b) {
  unsigned x = a ^ b;
  int n = 0;
  while (x) {
    n += static_cast<int>(x & 1u);
    x >>= 1;
  }
  return n;
}
}  // namespace

double usable_span_hz(double fsr_hz, int n_channels) {
  if (n_channels < 1) throw InvalidParameter("usable_span_hz: n_channels must be >= 1");
  if (!(fsr_hz > 0.0)) throw InvalidParameter("usable_span_hz: fsr_hz must be > 0");
  return fsr_hz * static_cast<double>(n_channels - 1);
}

double analytic_qam_ber(int m, double esn0_db) {
  const auto c = qam::Constellation::square(m);
  const int L = static_cast<int>(c.levels.size());
  const int nb = c.bits_per_axis;
  const double gamma = std::pow(10.0, esn0_db / 10.0);
  // half the level spacing over per-axis noise sigma
  const double dos = std::sqrt(3.0 * gamma / (m - 1));

  // enumerate P(decide region j | sent level i) over one PAM axis; levels sit
  // at odd integers, boundaries at even integers (units of the half spacing)
  double total = 0.0;
  for (int i = 0; i < L; ++i) {
    const double li = 2.0 * i - (L - 1);
    for (int j = 0; j < L; ++j) {
      const double lo = (j == 0) ? -std::numeric_limits<double>::infinity()
                                 : (2.0 * j - L);
      const double hi = (j == L - 1) ? std::numeric_limits<double>::infinity()
                                     : (2.0 * (j + 1) - L);
      const double p = qfunc((lo - li) * dos) - qfunc((hi - li) * dos);
      const auto gi = static_cast<unsigned>(i ^ (i >> 1));
      const auto gj = static_cast<unsigned>(j ^ (j >> 1));
      total += p * popcount_xor(gi, gj);
    }
  }
  return total / (L * nb);
}

namespace {

struct ChannelSetup {
  std::vector<std::uint8_t> payload_bits;
  std::vector<std::complex<double>> preamble;
  std::vector<std::complex<double>> symbols;  // preamble + payload
};

ChannelSetup make_symbols(const ExperimentConfig& cfg, int channel) {
  ChannelSetup s;
  const int bps = qam::Constellation::square(cfg.modem.m).bits_per_symbol();
  const auto pre_bits =
      qam::random_bits(static_cast<std::size_t>(cfg.modem.preamble_symbols) *
                           static_cast<std::size_t>(bps),
                       rng::derive_seed(cfg.master_seed, 0, "preamble"));
  s.preamble = qam::map_qam(pre_bits, cfg.modem.m);
  s.payload_bits = qam::random_bits(
      cfg.n_symbols * static_cast<std::size_t>(bps),
      rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(channel), "bits"));
  const auto payload = qam::map_qam(s.payload_bits, cfg.modem.m);
  s.symbols = s.preamble;
  s.symbols.insert(s.symbols.end(), payload.begin(), payload.end());
  return s;
}

SampledField make_carrier(const ExperimentConfig& cfg, int channel, CarrierMode mode,
                          std::size_t n, double fs, const char* stage) {
  const std::uint64_t seed =
      rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(channel), stage);
  if (mode == CarrierMode::CombReferenced) {
    const auto comb_real = comb::generate_comb(cfg.comb_spec, n, fs, seed);
    comb::DemuxConfig d = cfg.demux;
    d.dfb_freq_hz = cfg.comb_spec.line_frequency_hz(channel) + cfg.demux_detuning_hz;
    return comb::demux_line(comb_real, d).field;
  }
  // free-running DFB at the channel frequency, emitting the demux output power
  osc::OscillatorSpec dfb = cfg.free_dfb;
  dfb.power_mw = cfg.demux.output_power_mw;
  dfb.freq_offset_hz = 0.0;
  auto field = osc::cw_field(dfb, osc::synth_phase(dfb, n, fs, seed));
  field.center_offset_hz = cfg.comb_spec.line_frequency_hz(channel);
  return field;
}

}  // namespace

ChannelOutput run_single_channel(const ExperimentConfig& cfg, int channel,
                                 CarrierMode mode) {
  if (channel < 0 || channel >= cfg.comb_spec.n_lines)
    throw InvalidParameter("run_single_channel: channel out of range");
  const auto con = qam::Constellation::square(cfg.modem.m);
  const auto setup = make_symbols(cfg, channel);
  const auto baseband = txrx::rrc_shape(setup.symbols, cfg.modem);
  const std::size_t n = baseband.size();
  const double fs = cfg.modem.fs_hz();

  const auto carrier = make_carrier(cfg, channel, mode, n, fs, "carrier");
  auto lo = make_carrier(cfg, channel, mode, n, fs, "lo");
  if (cfg.lo_offset_hz != 0.0) lo = frequency_shift(std::move(lo), cfg.lo_offset_hz);

  auto wave = txrx::modulate(carrier, baseband);
  wave = txrx::propagate_fiber(wave, cfg.fiber);
  txrx::NoiseConfig noise = cfg.noise;
  noise.seed = rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(channel), "awgn");
  wave = txrx::load_awgn(wave, noise, cfg.modem);
  wave = txrx::coherent_rx(wave, lo);
  wave = rxdsp::cd_compensate(wave, cfg.fiber);

  const std::size_t n_total = setup.symbols.size();
  auto sym = rxdsp::matched_filter_downsample(
      wave, cfg.modem,
      static_cast<std::size_t>(cfg.modem.rrc_span_symbols) *
          static_cast<std::size_t>(cfg.modem.sps),
      n_total);

  // receiver AGC: unit mean symbol power
  double p = 0.0;
  for (const auto& v : sym) p += std::norm(v);
  p /= static_cast<double>(sym.size());
  if (p > 0.0) {
    const double g = 1.0 / std::sqrt(p);
    for (auto& v : sym) v *= g;
  }

  ChannelOutput out;
  // coarse offset; records shorter than the estimator minimum are zero-padded
  // (the periodogram ignores the padding), and an undetectable line falls
  // back to 0 with the damage showing up in the BER
  double foe = 0.0;
  try {
    if (sym.size() >= (1u << 14)) {
      foe = rxdsp::estimate_freq_offset(sym, cfg.modem.baud_hz).offset_hz;
    } else {
      auto padded = sym;
      padded.resize(1u << 14, {0.0, 0.0});
      foe = rxdsp::estimate_freq_offset(padded, cfg.modem.baud_hz).offset_hz;
    }
  } catch (const NoSpectralPeak&) {
    foe = 0.0;
  }
  out.freq_offset_est_hz = foe;
  const auto derot = rxdsp::derotate(sym, foe, cfg.modem.baud_hz);

  const auto pll = rxdsp::dd_pll(derot, cfg.pll, con, setup.preamble);

  int q = 0;
  try {
    q = rxdsp::resolve_rotation(
        std::span(pll.corrected).first(setup.preamble.size()), setup.preamble);
  } catch (const AmbiguousRotation&) {
    q = rxdsp::resolve_rotation(
        std::span(pll.corrected).first(setup.preamble.size()), setup.preamble, 0.0);
  }
  const auto rot = std::polar(1.0, -kPi / 2.0 * q);

  out.payload_symbols.resize(cfg.n_symbols);
  for (std::size_t k = 0; k < cfg.n_symbols; ++k)
    out.payload_symbols[k] = pll.corrected[setup.preamble.size() + k] * rot;

  const auto rx_bits = qam::demap_qam(out.payload_symbols, cfg.modem.m);
  const auto count = rxdsp::count_ber(setup.payload_bits, rx_bits);

  out.record.channel_index = channel;
  out.record.bits_compared = count.bits_compared;
  out.record.bit_errors = count.bit_errors;
  out.record.ber = count.ber;
  out.record.fec_class = rxdsp::classify_fec(count.ber, cfg.fec);
  out.record.mean_pll_phase_variance = pll.error_variance_rad2;
  return out;
}

SweepReport run_channel_sweep(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const auto channels = cfg.channel_list();
  SweepReport report;
  report.rows.resize(channels.size());

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t n_workers = std::min<std::size_t>(
      channels.size(), threads <= 0 ? hw : static_cast<std::size_t>(threads));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= channels.size()) return;
      ChannelResult& row = report.rows[i];
      row.channel = channels[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        row.record = run_single_channel(cfg, channels[i], CarrierMode::CombReferenced).record;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
  };

  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "channel,ber,bits,errors,fec_class,pll_phase_var\n";
  char buf[160];
  for (const auto& row : report.rows) {
    if (row.record) {
      const auto& r = *row.record;
      std::snprintf(buf, sizeof(buf), "%d,%.10g,%llu,%llu,%s,%.10g\n", row.channel, r.ber,
                    static_cast<unsigned long long>(r.bits_compared),
                    static_cast<unsigned long long>(r.bit_errors),
                    rxdsp::to_string(r.fec_class), r.mean_pll_phase_variance);
    } else {
      std::snprintf(buf, sizeof(buf), "%d,,0,0,ERROR,\n", row.channel);
    }
    out += buf;
  }
  return out;
}

ConstellationCompare run_constellation_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const int channel = cfg.channels.empty() ? cfg.comb_spec.center_line_index
                                           : cfg.channels.front();
  ConstellationCompare cmp;
  cmp.with_ref = run_single_channel(cfg, channel, CarrierMode::CombReferenced);
  cmp.without_ref = run_single_channel(cfg, channel, CarrierMode::FreeRunning);
  const auto con = qam::Constellation::square(cfg.modem.m);
  cmp.clusters_with = count_resolved_clusters(cmp.with_ref.payload_symbols, con);
  cmp.clusters_without = count_resolved_clusters(cmp.without_ref.payload_symbols, con);
  return cmp;
}

std::string symbols_csv(std::span<const std::complex<double>> symbols) {
  std::string out = "re,im\n";
  char buf[64];
  for (const auto& s : symbols) {
    std::snprintf(buf, sizeof(buf), "%.8g,%.8g\n", s.real(), s.imag());
    out += buf;
  }
  return out;
}

std::string compare_csv(const ConstellationCompare& cmp) {
  std::string out = "case,ber,bits,errors,fec_class,clusters\n";
  char buf[160];
  const auto row = [&](const char* name, const rxdsp::BerRecord& r, int clusters) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%llu,%llu,%s,%d\n", name, r.ber,
                  static_cast<unsigned long long>(r.bits_compared),
                  static_cast<unsigned long long>(r.bit_errors),
                  rxdsp::to_string(r.fec_class), clusters);
    out += buf;
  };
  row("comb_referenced", cmp.with_ref.record, cmp.clusters_with);
  row("free_running", cmp.without_ref.record, cmp.clusters_without);
  return out;
}

std::vector<NamedPsd> run_fm_noise_report(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<NamedPsd> out;
  const double fs = cfg.metrology.fs_hz;
  const std::size_t n = cfg.metrology.n_samples;

  const auto master_phase = osc::synth_phase(
      cfg.comb_spec.master, n, fs, rng::derive_seed(cfg.master_seed, 0, "fm.master"));
  out.push_back({"master", metrology::fm_noise_psd(master_phase)});

  const auto comb_real = comb::generate_comb(
      cfg.comb_spec, n, fs, rng::derive_seed(cfg.master_seed, 0, "fm.comb"));
  for (int line : cfg.metrology.lines) {
    comb::DemuxConfig d = cfg.demux;
    d.dfb_freq_hz = cfg.comb_spec.line_frequency_hz(line);
    const auto carrier = comb::demux_line(comb_real, d);
    char name[32];
    std::snprintf(name, sizeof(name), "comb_line_%02d", line);
    out.push_back({name, metrology::fm_noise_psd(carrier.field)});
  }

  const auto dfb_phase = osc::synth_phase(
      cfg.free_dfb, n, fs, rng::derive_seed(cfg.master_seed, 0, "fm.dfb"));
  out.push_back({"dfb_reference", metrology::fm_noise_psd(dfb_phase)});
  return out;
}

std::vector<CalibrationPoint> run_awgn_calibration(const ExperimentConfig& cfg,
                                                   std::span<const double> snrs_db,
                                                   std::size_t n_symbols) {
  cfg.modem.validate();
  const int bps = qam::Constellation::square(cfg.modem.m).bits_per_symbol();
  std::vector<CalibrationPoint> out;
  out.reserve(snrs_db.size());
  for (std::size_t i = 0; i < snrs_db.size(); ++i) {
    const auto bits = qam::random_bits(
        n_symbols * static_cast<std::size_t>(bps),
        rng::derive_seed(cfg.master_seed, i, "cal.bits"));
    const auto symbols = qam::map_qam(bits, cfg.modem.m);
    const auto shaped = txrx::rrc_shape(symbols, cfg.modem);
    txrx::NoiseConfig noise{snrs_db[i],
                            rng::derive_seed(cfg.master_seed, i, "cal.awgn")};
    const auto noisy = txrx::load_awgn(shaped, noise, cfg.modem);
    const auto rx = rxdsp::matched_filter_downsample(
        noisy, cfg.modem,
        static_cast<std::size_t>(cfg.modem.rrc_span_symbols) *
            static_cast<std::size_t>(cfg.modem.sps),
        n_symbols);
    const auto rx_bits = qam::demap_qam(rx, cfg.modem.m);
    const auto count = rxdsp::count_ber(bits, rx_bits);
    out.push_back({snrs_db[i], count.ber, analytic_qam_ber(cfg.modem.m, snrs_db[i]),
                   count.bits_compared, count.bit_errors});
  }
  return out;
}

std::string calibration_csv(std::span<const CalibrationPoint> points) {
  std::string out = "snr_db,ber_sim,ber_analytic,bits,errors\n";
  char buf[120];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.10g,%.10g,%llu,%llu\n", p.snr_db, p.ber_sim,
                  p.ber_analytic, static_cast<unsigned long long>(p.bits),
                  static_cast<unsigned long long>(p.errors));
    out += buf;
  }
  return out;
}

int count_resolved_clusters(std::span<const std::complex<double>> symbols,
                            const qam::Constellation& constellation) {
  if (symbols.empty()) return 0;
  constexpr int kBins = 96;
  constexpr double kLim = 1.6;
  constexpr double kCell = 2.0 * kLim / kBins;

  std::vector<double> hist(kBins * kBins, 0.0);
  for (const auto& s : symbols) {
    const int i = static_cast<int>(std::floor((s.real() + kLim) / kCell));
    const int j = static_cast<int>(std::floor((s.imag() + kLim) / kCell));
    if (i < 0 || i >= kBins || j < 0 || j >= kBins) continue;
    hist[static_cast<std::size_t>(i) * kBins + j] += 1.0;
  }

  // 3x3 box smoothing
  std::vector<double> smooth(kBins * kBins, 0.0);
  for (int i = 1; i < kBins - 1; ++i)
    for (int j = 1; j < kBins - 1; ++j) {
      double acc = 0.0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          acc += hist[static_cast<std::size_t>(i + di) * kBins + (j + dj)];
      smooth[static_cast<std::size_t>(i) * kBins + j] = acc / 9.0;
    }

  const auto density_at = [&](std::complex<double> z) {
    int i = static_cast<int>(std::floor((z.real() + kLim) / kCell));
    int j = static_cast<int>(std::floor((z.imag() + kLim) / kCell));
    i = std::clamp(i, 0, kBins - 1);
    j = std::clamp(j, 0, kBins - 1);
    return smooth[static_cast<std::size_t>(i) * kBins + j];
  };

  // a site is resolved when its density clearly tops the valleys toward its
  // lattice neighbors; an azimuthally smeared cloud is flat along the ring
  // through the site and fails the ratio
  const double dmin = constellation.min_distance();
  const double expect = static_cast<double>(symbols.size()) /
                        static_cast<double>(constellation.points.size());
  int resolved = 0;
  for (const auto& p : constellation.points) {
    const double here = density_at(p);
    if (here <= 0.0 || here * (kCell * kCell) < 1e-3 * expect * kCell * kCell) continue;
    double valley = 0.0;
    int neighbors = 0;
    const std::complex<double> steps[4] = {{dmin, 0}, {-dmin, 0}, {0, dmin}, {0, -dmin}};
    for (const auto& d : steps) {
      const std::complex<double> q = p + d;
      const double lim = constellation.levels.back() + 0.5 * dmin;
      if (std::abs(q.real()) > lim || std::abs(q.imag()) > lim) continue;
      valley = std::max(valley, density_at(p + d * 0.5));
      ++neighbors;
    }
    if (neighbors == 0) continue;
    if (here > 2.0 * valley) ++resolved;
  }
  return resolved;
}

}  // namespace ccs::harness
