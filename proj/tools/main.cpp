// ccs - comb-referenced coherent superchannel simulator.
//
// Subcommands: sweep, constellation, fmnoise, calibrate-awgn, plan, defaults.
// Every run writes plot-ready CSV files plus a JSON manifest into --out.
// Results are deterministic in (config, seed) and independent of --threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ccs/errors.hpp"
#include "ccs/harness.hpp"
#include "ccs/metrology.hpp"
#include "ccs/transceiver.hpp"
#include "ccs/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::vector<int>> channels;
  int threads = 0;
};

ccs::harness::ExperimentConfig load_config(const CommonOpts& opts) {
  auto cfg = opts.config_path.empty()
                 ? ccs::harness::ExperimentConfig::defaults()
                 : ccs::harness::parse_config_file(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.channels) cfg.channels = *opts.channels;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ccs::InvalidParameter("cannot open output file " + path.string());
  out << text;
}

json manifest_skeleton(const std::string& subcommand,
                       const ccs::harness::ExperimentConfig& cfg, int threads) {
  json m;
  m["tool"] = "ccs";
  m["version"] = ccs::kVersion;
  m["subcommand"] = subcommand;
  m["master_seed"] = cfg.master_seed;
  m["threads"] = threads;
  m["config"] = ccs::harness::emit_config(cfg);
  return m;
}

void finish_manifest(json& m, const fs::path& out_dir,
                     const std::vector<std::string>& outputs) {
  m["outputs"] = outputs;
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

int run_sweep(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const fs::path out_dir(opts.out_dir);
  fs::create_directories(out_dir);

  const auto report = ccs::harness::run_channel_sweep(cfg, opts.threads);
  write_text(out_dir / "sweep.csv", ccs::harness::sweep_csv(report));

  json m = manifest_skeleton("sweep", cfg, opts.threads);
  json chans = json::array();
  int failures = 0;
  for (const auto& row : report.rows) {
    json c;
    c["channel"] = row.channel;
    c["wall_ms"] = row.wall_ms;
    if (row.record) {
      c["ber"] = row.record->ber;
      c["fec_class"] = ccs::rxdsp::to_string(row.record->fec_class);
    } else {
      c["error"] = row.error;
      ++failures;
    }
    chans.push_back(c);
  }
  m["channels"] = chans;
  finish_manifest(m, out_dir, {"sweep.csv"});

  for (const auto& row : report.rows) {
    if (row.record)
      std::printf("channel %2d  ber %.3e  %s\n", row.channel, row.record->ber,
                  ccs::rxdsp::to_string(row.record->fec_class));
    else
      std::printf("channel %2d  ERROR: %s\n", row.channel, row.error.c_str());
  }
  return failures ? 2 : 0;
}

int run_constellation(const CommonOpts& opts, bool dump_waveforms) {
  auto cfg = load_config(opts);
  const fs::path out_dir(opts.out_dir);
  fs::create_directories(out_dir);

  const auto cmp = ccs::harness::run_constellation_compare(cfg);
  write_text(out_dir / "constellation_with_ref.csv",
             ccs::harness::symbols_csv(cmp.with_ref.payload_symbols));
  write_text(out_dir / "constellation_without_ref.csv",
             ccs::harness::symbols_csv(cmp.without_ref.payload_symbols));
  write_text(out_dir / "constellation_compare.csv", ccs::harness::compare_csv(cmp));

  std::vector<std::string> outputs = {"constellation_with_ref.csv",
                                      "constellation_without_ref.csv",
                                      "constellation_compare.csv"};
  json m = manifest_skeleton("constellation", cfg, 1);
  m["with_ref"] = {{"ber", cmp.with_ref.record.ber}, {"clusters", cmp.clusters_with}};
  m["without_ref"] = {{"ber", cmp.without_ref.record.ber},
                      {"clusters", cmp.clusters_without}};
  if (dump_waveforms) {
    // re-run the clean case just for its waveform is wasteful; dump symbols
    // as a CCS1 record at symbol rate instead
    ccs::SampledField f;
    f.fs_hz = cfg.modem.baud_hz;
    f.iq = cmp.with_ref.payload_symbols;
    ccs::txrx::write_waveform(f, out_dir / "symbols_with_ref.ccs1");
    outputs.push_back("symbols_with_ref.ccs1");
  }
  finish_manifest(m, out_dir, outputs);

  std::printf("with referencing:    ber %.3e  clusters %d\n", cmp.with_ref.record.ber,
              cmp.clusters_with);
  std::printf("without referencing: ber %.3e  clusters %d\n",
              cmp.without_ref.record.ber, cmp.clusters_without);
  return 0;
}

int run_fmnoise(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const fs::path out_dir(opts.out_dir);
  fs::create_directories(out_dir);

  const auto psds = ccs::harness::run_fm_noise_report(cfg);
  std::vector<std::string> outputs;
  for (const auto& named : psds) {
    const std::string file = "fmnoise_" + named.name + ".csv";
    ccs::metrology::write_csv(named.psd, out_dir / file);
    outputs.push_back(file);
    std::printf("%-16s  %zu bins\n", named.name.c_str(), named.psd.freqs_hz.size());
  }
  json m = manifest_skeleton("fmnoise", cfg, 1);
  finish_manifest(m, out_dir, outputs);
  return 0;
}

int run_calibrate(const CommonOpts& opts, std::vector<double> snrs,
                  std::size_t n_symbols) {
  const auto cfg = load_config(opts);
  const fs::path out_dir(opts.out_dir);
  fs::create_directories(out_dir);
  if (snrs.empty()) snrs = {20.0, 20.5, 21.0, 21.5, 22.0, 22.5, 23.0, 23.5, 24.0};

  const auto points = ccs::harness::run_awgn_calibration(cfg, snrs, n_symbols);
  write_text(out_dir / "calibration.csv", ccs::harness::calibration_csv(points));
  json m = manifest_skeleton("calibrate-awgn", cfg, 1);
  m["n_symbols"] = n_symbols;
  finish_manifest(m, out_dir, {"calibration.csv"});

  for (const auto& p : points)
    std::printf("snr %5.2f dB  sim %.3e  analytic %.3e\n", p.snr_db, p.ber_sim,
                p.ber_analytic);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comb-referenced coherent superchannel simulator"};
  app.set_version_flag("--version", std::string(ccs::kVersion));
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* cmd, bool with_channels = true) {
    cmd->add_option("--config", opts.config_path, "configuration file");
    cmd->add_option("--seed", opts.seed, "override master seed");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (0: hardware)");
    if (with_channels)
      cmd->add_option("--channels", opts.channels, "channel indices")->delimiter(',');
  };

  auto* sweep = app.add_subcommand("sweep", "per-channel BER sweep over the comb");
  add_common(sweep);

  auto* constellation =
      app.add_subcommand("constellation", "comb-referenced vs free-running comparison");
  add_common(constellation);
  bool dump_waveforms = false;
  constellation->add_flag("--dump", dump_waveforms, "also write a CCS1 symbol dump");

  auto* fmnoise = app.add_subcommand("fmnoise", "FM-noise PSD report");
  add_common(fmnoise, false);

  auto* calibrate = app.add_subcommand("calibrate-awgn", "BER vs SNR against the analytic curve");
  add_common(calibrate, false);
  std::vector<double> snrs;
  std::size_t cal_symbols = 1000000;
  calibrate->add_option("--snr", snrs, "SNR points, dB")->delimiter(',');
  calibrate->add_option("--symbols", cal_symbols, "symbols per point");

  auto* plan = app.add_subcommand("plan", "usable superchannel span");
  double plan_fsr = 10e9;
  int plan_channels = 17;
  std::string plan_config;
  plan->add_option("--fsr", plan_fsr, "line spacing, Hz");
  plan->add_option("--channels", plan_channels, "number of carriers");
  plan->add_option("--config", plan_config, "take fsr and line count from a config");

  auto* defaults = app.add_subcommand("defaults", "print the reference configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_sweep(opts);
    if (constellation->parsed()) return run_constellation(opts, dump_waveforms);
    if (fmnoise->parsed()) return run_fmnoise(opts);
    if (calibrate->parsed()) return run_calibrate(opts, snrs, cal_symbols);
    if (plan->parsed()) {
      if (!plan_config.empty()) {
        const auto cfg = ccs::harness::parse_config_file(plan_config);
        plan_fsr = cfg.comb_spec.fsr_hz;
        plan_channels = cfg.comb_spec.n_lines;
      }
      const double span = ccs::harness::usable_span_hz(plan_fsr, plan_channels);
      std::printf("usable span: %.9g Hz (%.6g GHz) = %.6g Hz FSR x (%d - 1)\n", span,
                  span / 1e9, plan_fsr, plan_channels);
      return 0;
    }
    if (defaults->parsed()) {
      std::cout << ccs::harness::emit_config(ccs::harness::ExperimentConfig::defaults());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
