#include "ccs/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ccs/errors.hpp"

namespace ccs {

double mean_power_mw(const SampledField& f) {
  if (f.iq.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : f.iq) acc += std::norm(v);
  return acc / static_cast<double>(f.iq.size());
}

SampledField frequency_shift(SampledField f, double delta_hz) {
  const double cycles_per_sample = delta_hz / f.fs_hz;
  for (std::size_t k = 0; k < f.iq.size(); ++k) {
    // fmod keeps the polar argument small for long records
    const double turns = std::fmod(cycles_per_sample * static_cast<double>(k), 1.0);
    f.iq[k] *= std::polar(1.0, 2.0 * std::numbers::pi * turns);
  }
  return f;
}

void check_field(const SampledField& f, const char* what) {
  const std::string w(what);
  if (f.iq.empty()) throw InvalidParameter(w + ": field is empty");
  if (!(f.fs_hz > 0.0)) throw InvalidParameter(w + ": fs_hz must be > 0");
  for (const auto& v : f.iq) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidParameter(w + ": field contains non-finite samples");
  }
}

}  // namespace ccs
