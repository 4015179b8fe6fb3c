#ifndef EIGENTUBE_FFT_HPP
#define EIGENTUBE_FFT_HPP

#include <memory>

#include "eigentube/common.hpp"

namespace eigentube {

// Thin FFTW wrapper. Plans are created once per object (planner access is
// serialized internally); execution on caller buffers is thread-safe, so a
// single instance can serve parallel workers. Transforms are unnormalized:
// forward applies e^{-i x k}, backward e^{+i x k}.
class Dft1D {
 public:
  explicit Dft1D(int n);
  ~Dft1D();
  Dft1D(const Dft1D&) = delete;
  Dft1D& operator=(const Dft1D&) = delete;

  int size() const { return n_; }
  void forward(cplx* data) const;
  void backward(cplx* data) const;

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// 2-D transform on a row-major n0 x n1 array; frequency bin (k0,k1) lives
// at the same layout, with signed frequency k - n for bins above n/2.
class Dft2D {
 public:
  Dft2D(int n0, int n1);
  ~Dft2D();
  Dft2D(const Dft2D&) = delete;
  Dft2D& operator=(const Dft2D&) = delete;

  int rows() const { return n0_; }
  int cols() const { return n1_; }
  void forward(cplx* data) const;
  void backward(cplx* data) const;

 private:
  int n0_, n1_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Signed frequency for bin k of an n-point transform.
inline int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }
// Bin holding signed frequency f (requires |f| <= n/2).
inline int freq_bin(int f, int n) { return f >= 0 ? f : f + n; }

}  // namespace eigentube

#endif
