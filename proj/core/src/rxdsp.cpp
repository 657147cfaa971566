#include "ccs/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/fft.hpp"

namespace ccs::rxdsp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
}  // namespace

SampledField cd_compensate(const SampledField& field, const txrx::FiberConfig& cfg) {
  check_field(field, "cd_compensate");
  cfg.validate();
  SampledField out = field;
  if (cfg.length_km == 0.0 || cfg.dispersion_ps_nm_km == 0.0) return out;

  // conjugate of the fiber's dispersion phase, amplitude untouched
  const double lambda_m = cfg.wavelength_nm * 1e-9;
  const double d_si = cfg.dispersion_ps_nm_km * 1e-6;
  const double coeff =
      kPi * lambda_m * lambda_m * d_si * (cfg.length_km * 1e3) / kSpeedOfLight;
  fft::forward_inplace(out.iq);
  const std::size_t n = out.iq.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = fft::bin_frequency_hz(k, n, out.fs_hz);
    out.iq[k] *= std::polar(1.0, +coeff * f * f);
  }
  fft::inverse_inplace(out.iq);
  return out;
}

FreqOffsetEstimate estimate_freq_offset(std::span<const std::complex<double>> symbols,
                                        double baud_hz) {
  if (symbols.size() < (1u << 14))
    throw InvalidParameter("estimate_freq_offset: need at least 2^14 symbols");
  if (!(baud_hz > 0.0)) throw InvalidParameter("estimate_freq_offset: baud_hz must be > 0");

  std::size_t nfft = 1u << 14;
  while (nfft < symbols.size()) nfft *= 2;
  std::vector<std::complex<double>> s4(nfft, {0.0, 0.0});
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    const auto s2 = symbols[k] * symbols[k];
    s4[k] = s2 * s2;
  }
  fft::forward_inplace(s4);

  std::vector<double> power(nfft);
  for (std::size_t k = 0; k < nfft; ++k) power[k] = std::norm(s4[k]);
  std::size_t pk = 0;
  for (std::size_t k = 1; k < nfft; ++k)
    if (power[k] > power[pk]) pk = k;

  std::vector<double> med = power;
  auto mid = med.begin() + med.size() / 2;
  std::nth_element(med.begin(), mid, med.end());
  const double median = std::max(*mid, 1e-300);

  FreqOffsetEstimate est;
  est.peak_to_median_db = 10.0 * std::log10(std::max(power[pk], 1e-300) / median);
  if (est.peak_to_median_db < 6.0) throw NoSpectralPeak(est.peak_to_median_db);

  // parabolic refinement on log power
  double delta = 0.0;
  const double pa = power[(pk + nfft - 1) % nfft];
  const double pc = power[(pk + 1) % nfft];
  if (pa > 0.0 && pc > 0.0 && power[pk] > 0.0) {
    const double la = std::log(pa), lb = std::log(power[pk]), lc = std::log(pc);
    const double den = la - 2.0 * lb + lc;
    if (den < 0.0) delta = 0.5 * (la - lc) / den;
  }
  const double f4 = fft::bin_frequency_hz(pk, nfft, baud_hz) +
                    delta * baud_hz / static_cast<double>(nfft);
  est.offset_hz = f4 / 4.0;
  return est;
}

std::vector<std::complex<double>> derotate(std::span<const std::complex<double>> symbols,
                                           double offset_hz, double baud_hz) {
  std::vector<std::complex<double>> out(symbols.size());
  const double cyc = offset_hz / baud_hz;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    const double turns = std::fmod(cyc * static_cast<double>(k), 1.0);
    out[k] = symbols[k] * std::polar(1.0, -2.0 * kPi * turns);
  }
  return out;
}

std::vector<std::complex<double>> matched_filter_downsample(
    const SampledField& field, const txrx::ModemConfig& modem,
    std::size_t timing_offset_samples, std::size_t n_symbols) {
  check_field(field, "matched_filter_downsample");
  modem.validate();
  if (n_symbols == 0) throw InvalidParameter("matched_filter_downsample: n_symbols must be > 0");
  const auto taps = txrx::rrc_taps(modem.sps, modem.rolloff, modem.rrc_span_symbols);
  const std::size_t n = field.size();
  const std::size_t last_center =
      timing_offset_samples + (n_symbols - 1) * static_cast<std::size_t>(modem.sps);
  if (timing_offset_samples >= n || last_center >= n)
    throw InvalidParameter("matched_filter_downsample: timing offset out of range");

  std::vector<std::complex<double>> out(n_symbols);
  for (std::size_t m = 0; m < n_symbols; ++m) {
    const std::size_t t = timing_offset_samples + m * static_cast<std::size_t>(modem.sps);
    std::complex<double> acc{0.0, 0.0};
    const std::size_t j_hi = std::min(taps.size() - 1, t);
    for (std::size_t j = 0; j <= j_hi; ++j) acc += taps[j] * field.iq[t - j];
    out[m] = acc;
  }
  return out;
}

void PllConfig::validate() const {
  if (!(mu1 > 0.0 && mu1 < 1.0)) throw InvalidParameter("PllConfig: mu1 must lie in (0, 1)");
  if (!(mu2 >= 0.0 && mu2 < mu1))
    throw InvalidParameter("PllConfig: mu2 must satisfy 0 <= mu2 < mu1");
}

PllResult dd_pll(std::span<const std::complex<double>> symbols, const PllConfig& cfg,
                 const qam::Constellation& constellation,
                 std::span<const std::complex<double>> known) {
  cfg.validate();
  if (symbols.empty()) throw InvalidParameter("dd_pll: no symbols");
  const bool data_aided = cfg.decision_mode == PllConfig::DecisionMode::DataAided;
  if (data_aided) {
    if (known.size() < symbols.size())
      throw InvalidParameter("dd_pll: data-aided mode needs known symbols for the whole record");
  } else if (known.size() < 64) {
    throw InvalidParameter("dd_pll: decided mode needs a preamble of at least 64 symbols");
  }

  PllResult res;
  res.corrected.resize(symbols.size());
  res.phase_rad.resize(symbols.size());
  double phi = 0.0;
  double acc = 0.0;

  const std::size_t var_skip = data_aided
      ? std::min(symbols.size(), static_cast<std::size_t>(std::ceil(10.0 / cfg.mu1)))
      : std::min(symbols.size(), known.size());
  double var_sum = 0.0, var_sq = 0.0;
  std::size_t var_n = 0;

  for (std::size_t k = 0; k < symbols.size(); ++k) {
    res.phase_rad[k] = phi;
    const std::complex<double> y = symbols[k] * std::polar(1.0, -phi);
    res.corrected[k] = y;
    const std::complex<double> d =
        (data_aided || k < known.size()) ? known[k] : constellation.nearest(y);
    const double e = std::arg(y * std::conj(d));
    acc += e;
    phi += cfg.mu1 * e + cfg.mu2 * acc;
    if (k >= var_skip) {
      var_sum += e;
      var_sq += e * e;
      ++var_n;
    }
  }
  if (var_n > 1) {
    const double mean = var_sum / static_cast<double>(var_n);
    res.error_variance_rad2 = var_sq / static_cast<double>(var_n) - mean * mean;
  }
  return res;
}

int resolve_rotation(std::span<const std::complex<double>> corrected_preamble,
                     std::span<const std::complex<double>> known_preamble,
                     double min_margin_db) {
  const std::size_t n = std::min(corrected_preamble.size(), known_preamble.size());
  if (n == 0) throw InvalidParameter("resolve_rotation: empty preamble");
  std::complex<double> c{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k)
    c += corrected_preamble[k] * std::conj(known_preamble[k]);

  // score of rotation q: Re(c * conj(i^q))
  const double scores[4] = {c.real(), c.imag(), -c.real(), -c.imag()};
  int best = 0;
  for (int q = 1; q < 4; ++q)
    if (scores[q] > scores[best]) best = q;
  double second = -std::numeric_limits<double>::infinity();
  for (int q = 0; q < 4; ++q)
    if (q != best) second = std::max(second, scores[q]);

  if (min_margin_db > 0.0 && scores[best] > 0.0 && second > 0.0) {
    const double margin_db = 10.0 * std::log10(scores[best] / second);
    if (margin_db < min_margin_db) throw AmbiguousRotation(margin_db);
  } else if (min_margin_db > 0.0 && !(scores[best] > 0.0)) {
    throw AmbiguousRotation(0.0);
  }
  return best;
}

BitErrorCount count_ber(std::span<const std::uint8_t> tx_bits,
                        std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size() || tx_bits.empty())
    throw InvalidParameter("count_ber: bit sequences must have equal nonzero length");
  BitErrorCount c;
  c.bits_compared = tx_bits.size();
  for (std::size_t k = 0; k < tx_bits.size(); ++k)
    c.bit_errors += (tx_bits[k] != rx_bits[k]) ? 1u : 0u;
  c.ber = static_cast<double>(c.bit_errors) / static_cast<double>(c.bits_compared);
  return c;
}

void FecPolicy::validate() const {
  if (!(ber_7pct > 0.0 && ber_20pct > ber_7pct))
    throw InvalidParameter("FecPolicy: thresholds must satisfy 0 < ber_7pct < ber_20pct");
}

const char* to_string(FecClass c) {
  switch (c) {
    case FecClass::Pass7Pct: return "PASS_7PCT";
    case FecClass::Pass20Pct: return "PASS_20PCT";
    case FecClass::Fail: return "FAIL";
  }
  return "FAIL";
}

FecClass classify_fec(double ber, const FecPolicy& policy) {
  policy.validate();
  if (!(ber >= 0.0 && ber <= 1.0)) throw InvalidParameter("classify_fec: ber must lie in [0, 1]");
  if (ber < policy.ber_7pct) return FecClass::Pass7Pct;
  if (ber < policy.ber_20pct) return FecClass::Pass20Pct;
  return FecClass::Fail;
}

}  // namespace ccs::rxdsp
