#ifndef EIGENTUBE_COMMON_HPP
#define EIGENTUBE_COMMON_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <future>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigentube {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPi = 4.0 * kPi;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
    return {x / n, y / n, z / n};
  }
};

// Angle between unit vectors, stable near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return 2.0 * std::asin(0.5 * (a - b).norm());
}

// Fixed-order pairwise summation. The result depends only on the input
// order, never on scheduling, so parallel callers can sum chunk results
// with the same routine and stay bit-reproducible.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

// Thread cap: EIGENTUBE_THREADS if set, hardware_concurrency otherwise.
int thread_count();

// Runs fn(begin, end) over fixed-size chunks of [0, n). The chunk layout is
// independent of the thread count, so any per-chunk outputs are identical
// for every parallel schedule.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn,
                     std::size_t chunk = 1u << 16);

// Parallel reduction over fixed chunks; chunk partials are combined by
// pairwise summation in chunk order.
double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t, std::size_t)>& chunk_sum);

// FNV-1a, used for config hashes embedded in reports.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace eigentube

#endif
