#include "mu3/fft.hpp"

#include <cstring>
#include <mutex>
#include <new>

#include <fftw3.h>

namespace mu3 {

namespace {
// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft3::Fft3(const GridShape& shape) : shape_(shape) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_buf_ = fftw_alloc_real(shape_.size());
  auto* cbuf = fftw_alloc_complex(spectrum_size());
  complex_buf_ = cbuf;
  if (!real_buf_ || !cbuf) throw std::bad_alloc();
  forward_plan_ = fftw_plan_dft_r2c_3d(shape_.ns, shape_.nt, shape_.nu, real_buf_, cbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_c2r_3d(shape_.ns, shape_.nt, shape_.nu, cbuf, real_buf_, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft3::~Fft3() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

std::vector<std::complex<double>> Fft3::forward(const std::vector<double>& in) const {
  std::vector<double> src(in);
  std::vector<std::complex<double>> out(spectrum_size());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), src.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> Fft3::inverse(const std::vector<std::complex<double>>& spectrum) const {
  // c2r overwrites its input.
  std::vector<std::complex<double>> src(spectrum);
  std::vector<double> out(shape_.size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(src.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(shape_.size());
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace mu3
