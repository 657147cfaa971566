#include "ccs/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <unordered_map>

namespace ccs::fft {

namespace {

// Plan cache. FFTW_ESTIMATE keeps plan selection deterministic (no runtime
// measurement), FFTW_UNALIGNED lets one plan serve any buffer. Planner calls
// are serialized; execution via the new-array interface is thread safe.
std::mutex g_mutex;
std::unordered_map<std::uint64_t, fftw_plan> g_plans;

fftw_plan plan_for(std::size_t n, int sign) {
  const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) | (sign == FFTW_BACKWARD ? 1u : 0u);
  std::lock_guard lock(g_mutex);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  std::vector<std::complex<double>> dummy(n);
  auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  g_plans.emplace(key, plan);
  return plan;
}

}  // namespace

void forward_inplace(std::span<std::complex<double>> x) {
  if (x.size() < 2) return;
  auto* p = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(plan_for(x.size(), FFTW_FORWARD), p, p);
}

void inverse_inplace(std::span<std::complex<double>> x) {
  if (x.empty()) return;
  if (x.size() > 1) {
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan_for(x.size(), FFTW_BACKWARD), p, p);
  }
  const double s = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= s;
}

std::vector<std::complex<double>> forward(std::vector<std::complex<double>> x) {
  forward_inplace(x);
  return x;
}

std::vector<std::complex<double>> inverse(std::vector<std::complex<double>> x) {
  inverse_inplace(x);
  return x;
}

double bin_frequency_hz(std::size_t k, std::size_t n, double fs_hz) {
  const auto half = (n + 1) / 2;
  const double idx = (k < half) ? static_cast<double>(k)
                                : static_cast<double>(k) - static_cast<double>(n);
  return idx * fs_hz / static_cast<double>(n);
}

}  // namespace ccs::fft
