#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ccs {

/// Uniformly sampled complex baseband optical field; |iq|^2 is instantaneous
/// power in mW. Samples are the envelope about an absolute carrier at
/// center_offset_hz relative to the simulation center frequency: a component
/// at in-record frequency f physically sits at center_offset_hz + f.
struct SampledField {
  std::vector<std::complex<double>> iq;
  double fs_hz = 0.0;
  double center_offset_hz = 0.0;

  std::size_t size() const { return iq.size(); }
};

double mean_power_mw(const SampledField& f);

/// Multiplies by exp(+i 2 pi delta_hz t): moves content by +delta_hz within
/// the sampled band. Metadata is left untouched.
SampledField frequency_shift(SampledField f, double delta_hz);

/// Throws InvalidParameter when the field is empty, fs_hz <= 0, or any sample
/// is non-finite.
void check_field(const SampledField& f, const char* what);

}  // namespace ccs
