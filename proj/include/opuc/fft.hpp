#pragma once

// Thin RAII layer over FFTW3. Plans are created with FFTW_ESTIMATE; the FFTW
// planner is not re-entrant, so plan creation and destruction are serialized.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

namespace opuc::fft {

using cplx = std::complex<double>;

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanGuard {
  fftw_plan plan = nullptr;
  ~PlanGuard() {
    if (plan != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

template <typename T>
struct FftwBuffer {
  T* data;
  explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace detail

/// Scaled forward transform of real samples: X_k = (1/N) sum_j x_j e^{-2 pi i jk/N}, k = 0..N/2.
inline std::vector<cplx> real_forward(std::span<const double> x) {
  const std::size_t n = x.size();
  detail::FftwBuffer<double> in(n);
  detail::FftwBuffer<fftw_complex> out(n / 2 + 1);
  detail::PlanGuard guard;
  {
    std::lock_guard lock(detail::planner_mutex());
    guard.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data, out.data, FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < n; ++j) in.data[j] = x[j];
  fftw_execute(guard.plan);
  std::vector<cplx> result(n / 2 + 1);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = cplx(out.data[k][0], out.data[k][1]) * scale;
  return result;
}

/// Synthesis of a real signal from its half spectrum: x_j = sum_{k=-N/2+1}^{N/2} X_k e^{2 pi i jk/N}
/// with X_{-k} = conj(X_k). Inverse of real_forward.
inline std::vector<double> real_backward(std::span<const cplx> half, std::size_t n) {
  detail::FftwBuffer<fftw_complex> in(n / 2 + 1);
  detail::FftwBuffer<double> out(n);
  detail::PlanGuard guard;
  {
    std::lock_guard lock(detail::planner_mutex());
    guard.plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data, out.data, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    const cplx v = k < half.size() ? half[k] : cplx{};
    in.data[k][0] = v.real();
    in.data[k][1] = v.imag();
  }
  fftw_execute(guard.plan);
  return std::vector<double>(out.data, out.data + n);
}

/// Evaluates the one-sided series sum_{k<N} v_k xi_j^k at the N grid points xi_j = e^{2 pi i j/N}.
inline std::vector<cplx> series_on_grid(std::span<const cplx> coefficients, std::size_t n) {
  detail::FftwBuffer<fftw_complex> buf(n);
  detail::PlanGuard guard;
  {
    std::lock_guard lock(detail::planner_mutex());
    guard.plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cplx v = k < coefficients.size() ? coefficients[k] : cplx{};
    buf.data[k][0] = v.real();
    buf.data[k][1] = v.imag();
  }
  fftw_execute(guard.plan);
  std::vector<cplx> result(n);
  for (std::size_t j = 0; j < n; ++j) result[j] = cplx(buf.data[j][0], buf.data[j][1]);
  return result;
}

}  // namespace opuc::fft
