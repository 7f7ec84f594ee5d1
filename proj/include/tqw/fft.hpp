#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace tqw {

namespace detail {
/// FFTW's planner is not re-entrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Forward/backward complex DFT pair of fixed length on an owned aligned buffer.
/// forward: X_j = sum_l x_l e^{-2 pi i j l / n}; backward is unnormalized.
class FftPair {
 public:
  explicit FftPair(std::size_t n) : n_(n) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int len = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(len, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(len, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  void forward(std::vector<std::complex<double>>& data) { run(fwd_, data); }
  void backward(std::vector<std::complex<double>>& data) { run(bwd_, data); }

 private:
  void run(fftw_plan plan, std::vector<std::complex<double>>& data) {
    if (data.size() != n_) throw std::invalid_argument("fft length mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      buf_[i][0] = data[i].real();
      buf_[i][1] = data[i].imag();
    }
    fftw_execute(plan);
    for (std::size_t i = 0; i < n_; ++i) data[i] = {buf_[i][0], buf_[i][1]};
  }

  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace tqw
