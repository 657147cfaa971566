#include "ccs/transceiver.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "ccs/errors.hpp"
#include "ccs/fft.hpp"
#include "ccs/rng.hpp"

namespace ccs::txrx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;  // m/s

}  // namespace

void ModemConfig::validate() const {
  if (m != 4 && m != 16 && m != 64 && m != 256)
    throw InvalidParameter("ModemConfig: m must be a perfect even-power square (4, 16, 64, 256)");
  if (!(baud_hz > 0.0)) throw InvalidParameter("ModemConfig: baud_hz must be > 0");
  if (sps < 2) throw InvalidParameter("ModemConfig: sps must be an integer >= 2");
  if (!(rolloff > 0.0 && rolloff <= 1.0))
    throw InvalidParameter("ModemConfig: rolloff must lie in (0, 1]");
  if (rrc_span_symbols < 2) throw InvalidParameter("ModemConfig: rrc_span_symbols must be >= 2");
  if ((rrc_span_symbols * sps) % 2 != 0)
    throw InvalidParameter("ModemConfig: rrc_span_symbols * sps must be even");
  if (preamble_symbols < 0)
    throw InvalidParameter("ModemConfig: preamble_symbols must be >= 0");
}

std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols) {
  if (sps < 1 || span_symbols < 1 || !(rolloff > 0.0 && rolloff <= 1.0))
    throw InvalidParameter("rrc_taps: invalid shaping parameters");
  const int n = span_symbols * sps;
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  const double b = rolloff;
  for (int i = 0; i <= n; ++i) {
    const double t = (static_cast<double>(i) - n / 2.0) / sps;  // in symbols
    double v;
    if (std::abs(t) < 1e-12) {
      v = 1.0 - b + 4.0 * b / kPi;
    } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
      v = (b / std::sqrt(2.0)) *
          ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
           (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
    } else {
      v = (std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b))) /
          (kPi * t * (1.0 - 16.0 * b * b * t * t));
    }
    h[static_cast<std::size_t>(i)] = v;
  }
  double e = 0.0;
  for (double v : h) e += v * v;
  const double norm = 1.0 / std::sqrt(e);
  for (double& v : h) v *= norm;
  return h;
}

SampledField rrc_shape(std::span<const std::complex<double>> symbols,
                       const ModemConfig& cfg) {
  cfg.validate();
  if (symbols.empty()) throw InvalidParameter("rrc_shape: no symbols");
  const auto taps = rrc_taps(cfg.sps, cfg.rolloff, cfg.rrc_span_symbols);
  SampledField out;
  out.fs_hz = cfg.fs_hz();
  out.center_offset_hz = 0.0;
  out.iq.assign(symbols.size() * static_cast<std::size_t>(cfg.sps) + taps.size() - 1,
                {0.0, 0.0});
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const std::size_t base = s * static_cast<std::size_t>(cfg.sps);
    const std::complex<double> a = symbols[s];
    for (std::size_t j = 0; j < taps.size(); ++j) out.iq[base + j] += a * taps[j];
  }
  return out;
}

void FiberConfig::validate() const {
  if (!(length_km >= 0.0)) throw InvalidParameter("FiberConfig: length_km must be >= 0");
  if (!(attenuation_db_km >= 0.0))
    throw InvalidParameter("FiberConfig: attenuation_db_km must be >= 0");
  if (!(wavelength_nm > 0.0)) throw InvalidParameter("FiberConfig: wavelength_nm must be > 0");
  if (!std::isfinite(dispersion_ps_nm_km))
    throw InvalidParameter("FiberConfig: dispersion_ps_nm_km must be finite");
}

SampledField propagate_fiber(const SampledField& field, const FiberConfig& cfg) {
  check_field(field, "propagate_fiber");
  cfg.validate();
  SampledField out = field;
  if (cfg.length_km == 0.0) return out;

  const double att = std::pow(10.0, -cfg.attenuation_db_km * cfg.length_km / 20.0);
  if (cfg.dispersion_ps_nm_km == 0.0) {
    for (auto& v : out.iq) v *= att;
    return out;
  }

  // exp(-i pi lambda^2 D L f^2 / c) on the baseband spectrum
  const double lambda_m = cfg.wavelength_nm * 1e-9;
  const double d_si = cfg.dispersion_ps_nm_km * 1e-6;  // s/m^2
  const double coeff = kPi * lambda_m * lambda_m * d_si * (cfg.length_km * 1e3) / kSpeedOfLight;
  fft::forward_inplace(out.iq);
  const std::size_t n = out.iq.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double f = fft::bin_frequency_hz(k, n, out.fs_hz);
    out.iq[k] *= std::polar(att, -coeff * f * f);
  }
  fft::inverse_inplace(out.iq);
  return out;
}

SampledField load_awgn(const SampledField& field, const NoiseConfig& cfg,
                       const ModemConfig& modem) {
  check_field(field, "load_awgn");
  if (std::isinf(cfg.target_snr_db) && cfg.target_snr_db > 0) return field;
  if (!std::isfinite(cfg.target_snr_db))
    throw InvalidParameter("load_awgn: target_snr_db must be finite or +inf");

  // mean sample power away from the shaping-filter edges
  const auto n = field.size();
  std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(modem.rrc_span_symbols) *
                                             static_cast<std::size_t>(modem.sps),
                                         n / 4);
  std::size_t hi = n - lo;
  double p = 0.0;
  for (std::size_t k = lo; k < hi; ++k) p += std::norm(field.iq[k]);
  p /= static_cast<double>(hi - lo);

  const double snr = std::pow(10.0, cfg.target_snr_db / 10.0);
  const double sigma2 = p * static_cast<double>(modem.sps) / snr;
  const double s = std::sqrt(sigma2 / 2.0);

  SampledField out = field;
  rng::NormalSampler gauss(cfg.seed);
  for (auto& v : out.iq) {
    const double re = s * gauss();
    const double im = s * gauss();
    v += std::complex<double>(re, im);
  }
  return out;
}

SampledField modulate(const SampledField& carrier, const SampledField& baseband) {
  check_field(carrier, "modulate");
  check_field(baseband, "modulate");
  if (carrier.fs_hz != baseband.fs_hz)
    throw InvalidParameter("modulate: sample-rate mismatch between carrier and baseband");
  if (carrier.size() != baseband.size())
    throw InvalidParameter("modulate: length mismatch between carrier and baseband");
  SampledField out;
  out.fs_hz = carrier.fs_hz;
  out.center_offset_hz = carrier.center_offset_hz + baseband.center_offset_hz;
  out.iq.resize(carrier.size());
  for (std::size_t k = 0; k < out.iq.size(); ++k)
    out.iq[k] = carrier.iq[k] * baseband.iq[k];
  return out;
}

SampledField modulate(const comb::DemuxedCarrier& carrier, const SampledField& baseband) {
  return modulate(carrier.field, baseband);
}

SampledField coherent_rx(const SampledField& field, const SampledField& lo) {
  check_field(field, "coherent_rx");
  check_field(lo, "coherent_rx");
  if (field.fs_hz != lo.fs_hz)
    throw InvalidParameter("coherent_rx: sample-rate mismatch between signal and LO");
  if (field.size() != lo.size())
    throw InvalidParameter("coherent_rx: length mismatch between signal and LO");
  const double p_lo = mean_power_mw(lo);
  if (!(p_lo > 0.0)) throw InvalidParameter("coherent_rx: LO has zero power");
  const double s = 1.0 / std::sqrt(p_lo);
  SampledField out;
  out.fs_hz = field.fs_hz;
  out.center_offset_hz = field.center_offset_hz - lo.center_offset_hz;
  out.iq.resize(field.size());
  for (std::size_t k = 0; k < out.iq.size(); ++k)
    out.iq[k] = field.iq[k] * std::conj(lo.iq[k]) * s;
  return out;
}

namespace {

void put_u32_le(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32_le(std::ofstream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32_le(out, bits);
}

float get_f32_le(std::ifstream& in) {
  const std::uint32_t bits = get_u32_le(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void write_waveform(const SampledField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("write_waveform: cannot open " + path.string());
  out.write("CCS1", 4);
  put_u32_le(out, static_cast<std::uint32_t>(std::llround(field.fs_hz / 1000.0)));
  put_u32_le(out, static_cast<std::uint32_t>(field.size()));
  put_u32_le(out, 0);  // reserved
  for (const auto& v : field.iq) {
    put_f32_le(out, static_cast<float>(v.real()));
    put_f32_le(out, static_cast<float>(v.imag()));
  }
}

SampledField read_waveform(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("read_waveform: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CCS1", 4) != 0)
    throw InvalidParameter("read_waveform: bad magic, not a CCS1 waveform");
  SampledField f;
  f.fs_hz = static_cast<double>(get_u32_le(in)) * 1000.0;
  const std::uint32_t count = get_u32_le(in);
  get_u32_le(in);  // reserved
  f.iq.resize(count);
  for (auto& v : f.iq) {
    const float re = get_f32_le(in);
    const float im = get_f32_le(in);
    v = {re, im};
  }
  if (!in) throw InvalidParameter("read_waveform: truncated file");
  return f;
}

}  // namespace ccs::txrx
