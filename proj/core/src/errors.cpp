#include "ccs/errors.hpp"

#include <cstdio>

namespace ccs {

namespace {

std::string format_msg(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

}  // namespace

NoLineInLockingRange::NoLineInLockingRange(double det, double half)
    : std::runtime_error(format_msg(
          "no comb line in locking range: nearest detuning %.6g Hz exceeds half range %.6g Hz",
          det, half)),
      detuning_hz(det),
      half_range_hz(half) {}

NoSpectralPeak::NoSpectralPeak(double ratio_db)
    : std::runtime_error(format_msg(
          "no spectral peak: peak-to-median %.2f dB below the 6 dB detection threshold",
          ratio_db, 0.0)),
      peak_to_median_db(ratio_db) {}

AmbiguousRotation::AmbiguousRotation(double margin)
    : std::runtime_error(format_msg(
          "ambiguous rotation: top two correlation scores within %.2f dB", margin, 0.0)),
      margin_db(margin) {}

ConfigError::ConfigError(int l, const std::string& message)
    : std::runtime_error(l > 0 ? "config line " + std::to_string(l) + ": " + message
                               : "config: " + message),
      line(l) {}

}  // namespace ccs
