#include "ccs/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/fft.hpp"
#include "ccs/rng.hpp"

namespace ccs::metrology {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t pow2_floor(std::size_t n) {
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

std::vector<double> hann_window(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t i = 0; i < len; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                 static_cast<double>(len - 1)));
  return w;
}

struct SegmentPlan {
  std::size_t len = 0;
  std::size_t step = 0;
  std::size_t count = 0;
};

SegmentPlan plan_segments(std::size_t n, WelchParams params, const char* what) {
  SegmentPlan plan;
  plan.len = params.segment_length ? params.segment_length
                                   : std::max<std::size_t>(16, pow2_floor(n / 16));
  if (plan.len < 8 || plan.len > n)
    throw InvalidParameter(std::string(what) + ": record too short for segment length");
  if (!(params.overlap >= 0.0 && params.overlap < 1.0))
    throw InvalidParameter(std::string(what) + ": overlap must be in [0, 1)");
  plan.step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(plan.len * (1.0 - params.overlap))));
  plan.count = (n - plan.len) / plan.step + 1;
  return plan;
}

// Phase increments of a sampled field; arg of the one-lag product is
// self-unwrapping as long as per-sample steps stay below pi.
std::vector<double> instantaneous_frequency_hz(const SampledField& field) {
  std::vector<double> nu(field.size() - 1);
  const double scale = field.fs_hz / (2.0 * kPi);
  for (std::size_t k = 0; k + 1 < field.size(); ++k)
    nu[k] = std::arg(field.iq[k + 1] * std::conj(field.iq[k])) * scale;
  return nu;
}

PsdEstimate psd_from_freq_noise(std::span<const double> nu, double fs_hz,
                                WelchParams params, const char* what) {
  auto plan = plan_segments(nu.size(), params, what);
  if (plan.count < 8)
    throw InvalidParameter(std::string(what) + ": record shorter than 8 Welch segments");
  auto [freqs, psd] = welch_psd_real(nu, fs_hz, params, 8, true);
  PsdEstimate est;
  est.segment_count = static_cast<int>(plan.count);
  // drop the DC bin; it carries no information after per-segment detrending
  est.freqs_hz.assign(freqs.begin() + 1, freqs.end());
  est.psd.assign(psd.begin() + 1, psd.end());
  return est;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> welch_psd_real(
    std::span<const double> x, double fs_hz, WelchParams params, int min_segments,
    bool detrend) {
  if (!(fs_hz > 0.0)) throw InvalidParameter("welch_psd_real: fs_hz must be > 0");
  auto plan = plan_segments(x.size(), params, "welch_psd_real");
  if (plan.count < static_cast<std::size_t>(min_segments))
    throw InvalidParameter("welch_psd_real: record too short for requested segments");

  const auto win = hann_window(plan.len);
  double u = 0.0;
  for (double w : win) u += w * w;

  const std::size_t nbins = plan.len / 2 + 1;
  std::vector<double> acc(nbins, 0.0);
  std::vector<std::complex<double>> buf(plan.len);
  for (std::size_t s = 0; s < plan.count; ++s) {
    const double* seg = x.data() + s * plan.step;
    double mean = 0.0;
    if (detrend) {
      for (std::size_t i = 0; i < plan.len; ++i) mean += seg[i];
      mean /= static_cast<double>(plan.len);
    }
    for (std::size_t i = 0; i < plan.len; ++i)
      buf[i] = std::complex<double>((seg[i] - mean) * win[i], 0.0);
    fft::forward_inplace(buf);
    for (std::size_t k = 0; k < nbins; ++k) acc[k] += std::norm(buf[k]);
  }

  const double norm = 1.0 / (static_cast<double>(plan.count) * u * fs_hz);
  std::vector<double> freqs(nbins), psd(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    freqs[k] = static_cast<double>(k) * fs_hz / static_cast<double>(plan.len);
    const bool edge = (k == 0) || (plan.len % 2 == 0 && k == plan.len / 2);
    psd[k] = acc[k] * norm * (edge ? 1.0 : 2.0);
  }
  return {std::move(freqs), std::move(psd)};
}

std::pair<std::vector<double>, std::vector<double>> welch_psd_complex(
    std::span<const std::complex<double>> x, double fs_hz, WelchParams params) {
  if (!(fs_hz > 0.0)) throw InvalidParameter("welch_psd_complex: fs_hz must be > 0");
  auto plan = plan_segments(x.size(), params, "welch_psd_complex");

  const auto win = hann_window(plan.len);
  double u = 0.0;
  for (double w : win) u += w * w;

  std::vector<double> acc(plan.len, 0.0);
  std::vector<std::complex<double>> buf(plan.len);
  for (std::size_t s = 0; s < plan.count; ++s) {
    const std::complex<double>* seg = x.data() + s * plan.step;
    for (std::size_t i = 0; i < plan.len; ++i) buf[i] = seg[i] * win[i];
    fft::forward_inplace(buf);
    for (std::size_t k = 0; k < plan.len; ++k) acc[k] += std::norm(buf[k]);
  }

  const double norm = 1.0 / (static_cast<double>(plan.count) * u * fs_hz);
  std::vector<double> freqs(plan.len), psd(plan.len);
  // re-order to an ascending grid, -fs/2 .. fs/2
  const std::size_t half = plan.len / 2;
  for (std::size_t i = 0; i < plan.len; ++i) {
    const std::size_t k = (i + half) % plan.len;  // source bin
    freqs[i] = fft::bin_frequency_hz(k, plan.len, fs_hz);
    psd[i] = acc[k] * norm;
  }
  return {std::move(freqs), std::move(psd)};
}

PsdEstimate fm_noise_psd(const SampledField& field, WelchParams params) {
  check_field(field, "fm_noise_psd");
  if (field.size() < 2) throw InvalidParameter("fm_noise_psd: record too short");
  const auto nu = instantaneous_frequency_hz(field);
  return psd_from_freq_noise(nu, field.fs_hz, params, "fm_noise_psd");
}

PsdEstimate fm_noise_psd(const osc::PhaseTrajectory& phase, WelchParams params) {
  if (phase.size() < 2) throw InvalidParameter("fm_noise_psd: record too short");
  std::vector<double> nu(phase.size() - 1);
  const double scale = phase.fs_hz / (2.0 * kPi);
  for (std::size_t k = 0; k + 1 < phase.size(); ++k)
    nu[k] = (phase.samples_rad[k + 1] - phase.samples_rad[k]) * scale;
  return psd_from_freq_noise(nu, phase.fs_hz, params, "fm_noise_psd");
}

void DshConfig::validate() const {
  if (!(delay_s > 0.0)) throw InvalidParameter("DshConfig: delay_s must be > 0");
  if (!(shift_hz > 0.0)) throw InvalidParameter("DshConfig: shift_hz must be > 0");
  if (!(rx_noise_psd >= 0.0)) throw InvalidParameter("DshConfig: rx_noise_psd must be >= 0");
}

PsdEstimate dsh_emulate(const SampledField& field, const DshConfig& cfg,
                        WelchParams params) {
  check_field(field, "dsh_emulate");
  cfg.validate();
  const auto d = static_cast<std::size_t>(std::llround(cfg.delay_s * field.fs_hz));
  if (d < 1 || d >= field.size())
    throw InvalidParameter("dsh_emulate: delay exceeds record length");
  const double tau = static_cast<double>(d) / field.fs_hz;

  SampledField beat;
  beat.fs_hz = field.fs_hz;
  beat.iq.resize(field.size() - d);
  const double cyc = cfg.shift_hz / field.fs_hz;
  for (std::size_t k = 0; k < beat.iq.size(); ++k) {
    const double turns = std::fmod(cyc * static_cast<double>(k), 1.0);
    beat.iq[k] = field.iq[k + d] * std::conj(field.iq[k]) *
                 std::polar(1.0, 2.0 * kPi * turns);
  }
  if (cfg.rx_noise_psd > 0.0) {
    rng::NormalSampler gauss(cfg.noise_seed);
    const double sigma = std::sqrt(cfg.rx_noise_psd * field.fs_hz / 2.0);
    for (auto& v : beat.iq) {
      const double re = sigma * gauss();
      const double im = sigma * gauss();
      v += std::complex<double>(re, im);
    }
  }

  const auto nu = instantaneous_frequency_hz(beat);
  const auto plan = plan_segments(nu.size(), params, "dsh_emulate");
  auto [freqs, psd] = welch_psd_real(nu, field.fs_hz, params, 1, true);

  PsdEstimate est;
  est.segment_count = static_cast<int>(plan.count);
  est.freqs_hz.reserve(freqs.size());
  est.psd.reserve(freqs.size());
  for (std::size_t k = 1; k < freqs.size(); ++k) {
    const double ft = freqs[k] * tau;
    if (std::abs(ft - std::round(ft)) < 0.1) continue;  // transfer-function null
    const double s = 2.0 * std::sin(kPi * ft);
    est.freqs_hz.push_back(freqs[k]);
    est.psd.push_back(psd[k] / (s * s));
  }
  return est;
}

Spectrum optical_spectrum(const SampledField& field, double rbw_hz) {
  check_field(field, "optical_spectrum");
  const double resolution = field.fs_hz / static_cast<double>(field.size());
  if (!(rbw_hz >= resolution))
    throw InvalidParameter("optical_spectrum: rbw_hz below the record resolution fs/n");

  WelchParams params;
  // keep PSD bins much finer than rbw so window leakage stays inside one bin
  std::size_t want = static_cast<std::size_t>(std::ceil(8.0 * field.fs_hz / rbw_hz));
  std::size_t len = 16;
  while (len < want) len *= 2;
  params.segment_length = std::min(len, pow2_floor(field.size()));
  auto [freqs, psd] = welch_psd_complex(field.iq, field.fs_hz, params);

  // rbw bins centered on integer multiples of rbw, DC in the middle of a bin
  const auto half_bins = static_cast<long>(std::floor(field.fs_hz / 2.0 / rbw_hz));
  const std::size_t nbins = static_cast<std::size_t>(2 * half_bins + 1);
  std::vector<double> acc(nbins, 0.0);
  const double df = field.fs_hz / static_cast<double>(params.segment_length);
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    long b = std::lround(freqs[k] / rbw_hz);
    b = std::clamp(b, -half_bins, half_bins);
    acc[static_cast<std::size_t>(b + half_bins)] += psd[k] * df;
  }

  Spectrum out;
  out.rbw_hz = rbw_hz;
  out.freqs_hz.resize(nbins);
  out.power_dbm.resize(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    out.freqs_hz[b] =
        field.center_offset_hz + (static_cast<double>(b) - half_bins) * rbw_hz;
    out.power_dbm[b] = 10.0 * std::log10(std::max(acc[b], 1e-300));
  }
  return out;
}

double estimate_linewidth_hz(const PsdEstimate& psd, double f_lo_hz, double f_hi_hz) {
  std::vector<double> band;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k)
    if (psd.freqs_hz[k] >= f_lo_hz && psd.freqs_hz[k] <= f_hi_hz)
      band.push_back(psd.psd[k]);
  if (band.empty()) throw InvalidParameter("estimate_linewidth_hz: empty fit band");
  auto mid = band.begin() + band.size() / 2;
  std::nth_element(band.begin(), mid, band.end());
  double h0 = *mid;
  if (band.size() % 2 == 0) {
    auto lo = std::max_element(band.begin(), mid);
    h0 = 0.5 * (h0 + *lo);
  }
  return kPi * h0;
}

double fit_lorentzian_fwhm_hz(const SampledField& field, WelchParams params) {
  check_field(field, "fit_lorentzian_fwhm_hz");
  auto [freqs, psd] = welch_psd_complex(field.iq, field.fs_hz, params);

  std::size_t pk = 0;
  for (std::size_t k = 1; k < psd.size(); ++k)
    if (psd[k] > psd[pk]) pk = k;
  const double peak = psd[pk];
  if (!(peak > 0.0)) throw InvalidParameter("fit_lorentzian_fwhm_hz: empty spectrum");

  // line center from the centroid of the top half of the peak
  double cw = 0.0, cf = 0.0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (psd[k] >= 0.5 * peak) {
      cw += psd[k];
      cf += psd[k] * freqs[k];
    }
  }
  const double f0 = cf / cw;

  // 1/S = a + b (f - f0)^2 for a Lorentzian; weight by S^2 so the noisy wings
  // do not dominate the regression
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (psd[k] < 0.25 * peak) continue;
    const double x = (freqs[k] - f0) * (freqs[k] - f0);
    const double y = 1.0 / psd[k];
    const double w = psd[k] * psd[k];
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double den = sw * sxx - sx * sx;
  if (den == 0.0) throw InvalidParameter("fit_lorentzian_fwhm_hz: degenerate fit band");
  const double b = (sw * sxy - sx * sy) / den;
  const double a = (sy - b * sx) / sw;
  if (!(a > 0.0) || !(b > 0.0))
    throw InvalidParameter("fit_lorentzian_fwhm_hz: fit did not converge to a Lorentzian");
  return 2.0 * std::sqrt(a / b);
}

namespace {

void write_lines(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("write_csv: cannot open " + path.string());
  out << text;
}

}  // namespace

void write_csv(const PsdEstimate& psd, const std::filesystem::path& path,
               const std::string& unit) {
  std::string text = "# unit: " + unit + "\nfreq_hz,value\n";
  char buf[80];
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", psd.freqs_hz[k], psd.psd[k]);
    text += buf;
  }
  write_lines(path, text);
}

void write_csv(const Spectrum& spec, const std::filesystem::path& path) {
  std::string text = "# unit: dBm\nfreq_hz,value\n";
  char buf[80];
  for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", spec.freqs_hz[k], spec.power_dbm[k]);
    text += buf;
  }
  write_lines(path, text);
}

}  // namespace ccs::metrology
