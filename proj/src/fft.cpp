#include "eigentube/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace eigentube {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft1D::Dft1D(int n) : n_(n) {
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dft1D::~Dft1D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Dft1D::forward(cplx* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void Dft1D::backward(cplx* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
}

Dft2D::Dft2D(int n0, int n1) : n0_(n0), n1_(n1) {
  std::vector<cplx> scratch(static_cast<std::size_t>(n0) * n1);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_2d(n0, n1, buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dft2D::~Dft2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Dft2D::forward(cplx* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void Dft2D::backward(cplx* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
}

}  // namespace eigentube
