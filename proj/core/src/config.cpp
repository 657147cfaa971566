#include "ccs/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ccs/errors.hpp"

namespace ccs::harness {

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.comb_spec.fsr_hz = 10e9;
  cfg.comb_spec.n_lines = 17;
  cfg.comb_spec.center_line_index = 8;
  cfg.comb_spec.line_powers_mw = comb::CombSpec::flat_powers(17, 10.0);
  // sub-Hz master: white floor 0.3 Hz^2/Hz, flicker passing 1e3 Hz^2/Hz at 100 Hz
  cfg.comb_spec.master = {0.3, 1e5, 10.0, 0.0};
  // 10 GHz drive clean enough to stay invisible at line +-8
  cfg.comb_spec.rf_drive = {1e-4, 0.0, 1.0, 0.0};
  cfg.demux.locking_half_range_hz = 2.5e9;
  cfg.demux.suppression_db = 40.0;
  cfg.demux.output_power_mw = 10.0;
  cfg.noise.target_snr_db = 28.0;
  // MHz-class free-running DFB pair; unrecoverable for 64-QAM at 5 GBaud
  cfg.free_dfb = {1e6 / std::numbers::pi, 0.0, 10.0, 0.0};
  return cfg;
}

std::vector<int> ExperimentConfig::channel_list() const {
  if (!channels.empty()) return channels;
  std::vector<int> all(static_cast<std::size_t>(comb_spec.n_lines));
  for (int k = 0; k < comb_spec.n_lines; ++k) all[static_cast<std::size_t>(k)] = k;
  return all;
}

void ExperimentConfig::validate() const {
  comb_spec.validate();
  demux.validate();
  modem.validate();
  fiber.validate();
  pll.validate();
  fec.validate();
  free_dfb.validate();
  if (!std::isfinite(lo_offset_hz))
    throw InvalidParameter("lo_offset_hz must be finite");
  if (!std::isfinite(demux_detuning_hz))
    throw InvalidParameter("demux.detuning_hz must be finite");
  for (int ch : channels)
    if (ch < 0 || ch >= comb_spec.n_lines)
      throw InvalidParameter("channels must lie in [0, comb.n_lines)");
  if (n_symbols < 10000)
    throw InvalidParameter("n_symbols must be >= 10000 for BER runs");
  if (!(metrology.fs_hz > 0.0)) throw InvalidParameter("metrology.fs_hz must be > 0");
  if (metrology.n_samples < 4096)
    throw InvalidParameter("metrology.n_samples must be >= 4096");
  for (int ln : metrology.lines)
    if (ln < 0 || ln >= comb_spec.n_lines)
      throw InvalidParameter("metrology.lines must lie in [0, comb.n_lines)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& v, int line) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(line, "expected a number, got '" + v + "'");
  return d;
}

long long parse_int(const std::string& v, int line) {
  char* end = nullptr;
  const long long d = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  return d;
}

std::uint64_t parse_u64(const std::string& v, int line) {
  char* end = nullptr;
  const unsigned long long d = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(line, "expected an unsigned integer, got '" + v + "'");
  return d;
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(line, "empty entry in list");
    out.push_back(static_cast<int>(parse_int(item, line)));
  }
  if (out.empty()) throw ConfigError(line, "empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(line, "empty entry in list");
    out.push_back(parse_double(item, line));
  }
  if (out.empty()) throw ConfigError(line, "empty list");
  return out;
}

bool apply_oscillator_key(osc::OscillatorSpec& spec, const std::string& sub,
                          const std::string& value, int line) {
  if (sub == "h0_hz2_per_hz") spec.h0_hz2_per_hz = parse_double(value, line);
  else if (sub == "h_flicker_hz2") spec.h_flicker_hz2 = parse_double(value, line);
  else if (sub == "power_mw") spec.power_mw = parse_double(value, line);
  else if (sub == "freq_offset_hz") spec.freq_offset_hz = parse_double(value, line);
  else return false;
  return true;
}

struct PendingPower {
  bool flat_set = false;
  double flat_mw = 10.0;
  bool list_set = false;
  std::vector<double> list;
};

void apply_key(ExperimentConfig& cfg, PendingPower& power, const std::string& key,
               const std::string& value, int line) {
  auto bad = [&]() -> ConfigError { return {line, "unknown key '" + key + "'"}; };

  if (key == "master_seed") { cfg.master_seed = parse_u64(value, line); return; }
  if (key == "n_symbols") { cfg.n_symbols = static_cast<std::size_t>(parse_u64(value, line)); return; }
  if (key == "lo_offset_hz") { cfg.lo_offset_hz = parse_double(value, line); return; }
  if (key == "channels") {
    if (value == "all") cfg.channels.clear();
    else cfg.channels = parse_int_list(value, line);
    return;
  }

  const auto dot = key.find('.');
  if (dot == std::string::npos) throw bad();
  const std::string section = key.substr(0, dot);
  const std::string rest = key.substr(dot + 1);

  if (section == "comb") {
    if (rest == "fsr_hz") cfg.comb_spec.fsr_hz = parse_double(value, line);
    else if (rest == "n_lines") cfg.comb_spec.n_lines = static_cast<int>(parse_int(value, line));
    else if (rest == "center_line_index")
      cfg.comb_spec.center_line_index = static_cast<int>(parse_int(value, line));
    else if (rest == "line_power_mw") { power.flat_set = true; power.flat_mw = parse_double(value, line); }
    else if (rest == "line_powers_mw") { power.list_set = true; power.list = parse_double_list(value, line); }
    else if (rest.rfind("master.", 0) == 0) {
      if (!apply_oscillator_key(cfg.comb_spec.master, rest.substr(7), value, line)) throw bad();
    } else if (rest.rfind("rf_drive.", 0) == 0) {
      if (!apply_oscillator_key(cfg.comb_spec.rf_drive, rest.substr(9), value, line)) throw bad();
    } else throw bad();
    return;
  }
  if (section == "demux") {
    if (rest == "detuning_hz") cfg.demux_detuning_hz = parse_double(value, line);
    else if (rest == "locking_half_range_hz") cfg.demux.locking_half_range_hz = parse_double(value, line);
    else if (rest == "suppression_db") cfg.demux.suppression_db = parse_double(value, line);
    else if (rest == "output_power_mw") cfg.demux.output_power_mw = parse_double(value, line);
    else throw bad();
    return;
  }
  if (section == "modem") {
    if (rest == "m") cfg.modem.m = static_cast<int>(parse_int(value, line));
    else if (rest == "baud_hz") cfg.modem.baud_hz = parse_double(value, line);
    else if (rest == "sps") cfg.modem.sps = static_cast<int>(parse_int(value, line));
    else if (rest == "rolloff") cfg.modem.rolloff = parse_double(value, line);
    else if (rest == "rrc_span_symbols") cfg.modem.rrc_span_symbols = static_cast<int>(parse_int(value, line));
    else if (rest == "preamble_symbols") cfg.modem.preamble_symbols = static_cast<int>(parse_int(value, line));
    else throw bad();
    return;
  }
  if (section == "fiber") {
    if (rest == "length_km") cfg.fiber.length_km = parse_double(value, line);
    else if (rest == "dispersion_ps_nm_km") cfg.fiber.dispersion_ps_nm_km = parse_double(value, line);
    else if (rest == "attenuation_db_km") cfg.fiber.attenuation_db_km = parse_double(value, line);
    else if (rest == "wavelength_nm") cfg.fiber.wavelength_nm = parse_double(value, line);
    else throw bad();
    return;
  }
  if (section == "noise") {
    if (rest == "target_snr_db") {
      cfg.noise.target_snr_db = (value == "inf")
          ? std::numeric_limits<double>::infinity()
          : parse_double(value, line);
    } else throw bad();
    return;
  }
  if (section == "pll") {
    if (rest == "mu1") cfg.pll.mu1 = parse_double(value, line);
    else if (rest == "mu2") cfg.pll.mu2 = parse_double(value, line);
    else if (rest == "decision_mode") {
      if (value == "decided") cfg.pll.decision_mode = rxdsp::PllConfig::DecisionMode::Decided;
      else if (value == "data-aided") cfg.pll.decision_mode = rxdsp::PllConfig::DecisionMode::DataAided;
      else throw ConfigError(line, "pll.decision_mode must be 'decided' or 'data-aided'");
    } else throw bad();
    return;
  }
  if (section == "fec") {
    if (rest == "ber_7pct") cfg.fec.ber_7pct = parse_double(value, line);
    else if (rest == "ber_20pct") cfg.fec.ber_20pct = parse_double(value, line);
    else throw bad();
    return;
  }
  if (section == "dfb") {
    if (!apply_oscillator_key(cfg.free_dfb, rest, value, line)) throw bad();
    return;
  }
  if (section == "metrology") {
    if (rest == "fs_hz") cfg.metrology.fs_hz = parse_double(value, line);
    else if (rest == "n_samples") cfg.metrology.n_samples = static_cast<std::size_t>(parse_u64(value, line));
    else if (rest == "lines") cfg.metrology.lines = parse_int_list(value, line);
    else throw bad();
    return;
  }
  throw bad();
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e6) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char s[40];
    std::snprintf(s, sizeof(s), "%.*g", prec, v);
    if (std::strtod(s, nullptr) == v) return s;
  }
  return buf;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  PendingPower power;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    apply_key(cfg, power, key, value, line);
  }

  if (power.list_set) cfg.comb_spec.line_powers_mw = power.list;
  else cfg.comb_spec.line_powers_mw =
      comb::CombSpec::flat_powers(cfg.comb_spec.n_lines,
                                  power.flat_set ? power.flat_mw : 10.0);
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  return parse_config(in);
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# ccs experiment configuration\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  out << "n_symbols = " << cfg.n_symbols << "\n";
  out << "channels = " << (cfg.channels.empty() ? "all" : fmt_int_list(cfg.channels)) << "\n";
  out << "lo_offset_hz = " << fmt_double(cfg.lo_offset_hz) << "\n";
  out << "\n# comb source\n";
  out << "comb.fsr_hz = " << fmt_double(cfg.comb_spec.fsr_hz) << "\n";
  out << "comb.n_lines = " << cfg.comb_spec.n_lines << "\n";
  out << "comb.center_line_index = " << cfg.comb_spec.center_line_index << "\n";
  bool flat = true;
  for (double p : cfg.comb_spec.line_powers_mw)
    if (p != cfg.comb_spec.line_powers_mw.front()) flat = false;
  if (flat) {
    out << "comb.line_power_mw = " << fmt_double(cfg.comb_spec.line_powers_mw.front()) << "\n";
  } else {
    out << "comb.line_powers_mw = ";
    for (std::size_t i = 0; i < cfg.comb_spec.line_powers_mw.size(); ++i)
      out << (i ? "," : "") << fmt_double(cfg.comb_spec.line_powers_mw[i]);
    out << "\n";
  }
  auto emit_osc = [&](const char* prefix, const osc::OscillatorSpec& s) {
    out << prefix << ".h0_hz2_per_hz = " << fmt_double(s.h0_hz2_per_hz) << "\n";
    out << prefix << ".h_flicker_hz2 = " << fmt_double(s.h_flicker_hz2) << "\n";
    out << prefix << ".power_mw = " << fmt_double(s.power_mw) << "\n";
    out << prefix << ".freq_offset_hz = " << fmt_double(s.freq_offset_hz) << "\n";
  };
  emit_osc("comb.master", cfg.comb_spec.master);
  emit_osc("comb.rf_drive", cfg.comb_spec.rf_drive);
  out << "\n# injection-locked demultiplexer\n";
  out << "demux.detuning_hz = " << fmt_double(cfg.demux_detuning_hz) << "\n";
  out << "demux.locking_half_range_hz = " << fmt_double(cfg.demux.locking_half_range_hz) << "\n";
  out << "demux.suppression_db = " << fmt_double(cfg.demux.suppression_db) << "\n";
  out << "demux.output_power_mw = " << fmt_double(cfg.demux.output_power_mw) << "\n";
  out << "\n# modem\n";
  out << "modem.m = " << cfg.modem.m << "\n";
  out << "modem.baud_hz = " << fmt_double(cfg.modem.baud_hz) << "\n";
  out << "modem.sps = " << cfg.modem.sps << "\n";
  out << "modem.rolloff = " << fmt_double(cfg.modem.rolloff) << "\n";
  out << "modem.rrc_span_symbols = " << cfg.modem.rrc_span_symbols << "\n";
  out << "modem.preamble_symbols = " << cfg.modem.preamble_symbols << "\n";
  out << "\n# fiber\n";
  out << "fiber.length_km = " << fmt_double(cfg.fiber.length_km) << "\n";
  out << "fiber.dispersion_ps_nm_km = " << fmt_double(cfg.fiber.dispersion_ps_nm_km) << "\n";
  out << "fiber.attenuation_db_km = " << fmt_double(cfg.fiber.attenuation_db_km) << "\n";
  out << "fiber.wavelength_nm = " << fmt_double(cfg.fiber.wavelength_nm) << "\n";
  out << "\n# receiver\n";
  out << "noise.target_snr_db = " << fmt_double(cfg.noise.target_snr_db) << "\n";
  out << "pll.mu1 = " << fmt_double(cfg.pll.mu1) << "\n";
  out << "pll.mu2 = " << fmt_double(cfg.pll.mu2) << "\n";
  out << "pll.decision_mode = "
      << (cfg.pll.decision_mode == rxdsp::PllConfig::DecisionMode::Decided ? "decided"
                                                                           : "data-aided")
      << "\n";
  out << "fec.ber_7pct = " << fmt_double(cfg.fec.ber_7pct) << "\n";
  out << "fec.ber_20pct = " << fmt_double(cfg.fec.ber_20pct) << "\n";
  out << "\n# free-running DFB reference\n";
  emit_osc("dfb", cfg.free_dfb);
  out << "\n# metrology runs\n";
  out << "metrology.fs_hz = " << fmt_double(cfg.metrology.fs_hz) << "\n";
  out << "metrology.n_samples = " << cfg.metrology.n_samples << "\n";
  out << "metrology.lines = " << fmt_int_list(cfg.metrology.lines) << "\n";
  return out.str();
}

}  // namespace ccs::harness
