#ifndef EIGENTUBE_MODELS_HPP
#define EIGENTUBE_MODELS_HPP

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "eigentube/common.hpp"
#include "eigentube/geometry.hpp"

namespace eigentube {

enum class SphereFamily { zonal, highest_weight, single_lm, random_gaussian };

// Explicit eigenfunction family member on S^2; the associated frequency is
// lambda = sqrt(l(l+1)) so that -Laplace e = lambda^2 e holds exactly.
struct SphereHarmonicSpec {
  SphereFamily family = SphereFamily::zonal;
  int l = 1;
  int m = 0;                 // single_lm only
  std::uint64_t seed = 0;    // random_gaussian only

  double lambda() const { return std::sqrt(static_cast<double>(l) * (l + 1)); }
};

struct LatticePoint {
  long long x = 0, y = 0;
  bool operator==(const LatticePoint&) const = default;
};

// Torus eigenfunction sum a_l e^{i x.l} over the lattice circle |l|^2 = n;
// lambda = sqrt(n). Sampled with the (2pi)^{-1} prefactor so that the
// Lebesgue L^2 mass on [0,2pi)^2 equals sum |a_l|^2.
struct TorusEigenfunction {
  long long n = 1;
  std::vector<std::pair<LatticePoint, cplx>> coefficients;

  double lambda() const { return std::sqrt(static_cast<double>(n)); }
};

struct SampledField {
  std::shared_ptr<const QuadratureGrid> grid;
  std::vector<cplx> values;
  Manifold manifold = Manifold::sphere;
};

// All lattice points with x^2 + y^2 = n, sorted by angle from the positive
// x-axis using exact integer comparisons. Empty when n has no representation.
std::vector<LatticePoint> lattice_circle_points(long long n);

// Fully normalized associated Legendre P~_l^m (Condon-Shortley phase),
// int_{-1}^{1} 2*pi*P~_l^m(x)^2 dx = 1. Sectoral seed is computed in log
// space; degrees above 4096 are rejected ("degree overflow").
double normalized_plm(int l, int m, double x);
// Column over degrees is implicit; this fills P~_l^m(x_j) for fixed (l,m).
void normalized_plm_many(int l, int m, std::span<const double> x,
                         std::span<double> out);
// P~_l^m(x) for all m = 0..l at a single x (out has l+1 entries).
void normalized_plm_all_m(int l, double x, std::span<double> out);

// Unit-l2 coefficient vector over m = -l..l for the requested family.
std::vector<cplx> family_coefficients(const SphereHarmonicSpec& spec);

// L^2-normalized samples on a sphere grid (grid.nphi must exceed 2l).
SampledField eval_sphere_harmonic(const SphereHarmonicSpec& spec,
                                  std::shared_ptr<const QuadratureGrid> grid);
// Direct pointwise evaluation (restriction integrals use this, not grid
// interpolation). Points must be unit vectors.
std::vector<cplx> eval_sphere_harmonic_at(const SphereHarmonicSpec& spec,
                                          std::span<const Vec3> points);

// Samples of (2pi)^{-1} sum a_l e^{i x.l}; not normalized (callers decide).
SampledField eval_torus_eigenfunction(const TorusEigenfunction& e,
                                      std::shared_ptr<const QuadratureGrid> grid);
std::vector<cplx> eval_torus_eigenfunction_at(
    const TorusEigenfunction& e, std::span<const std::array<double, 2>> points);

double l2_norm(const SampledField& f);
SampledField l2_normalize(const SampledField& f);

}  // namespace eigentube

#endif
