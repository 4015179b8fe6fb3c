#ifndef EIGENTUBE_LATTICE_HPP
#define EIGENTUBE_LATTICE_HPP

#include <vector>

#include "eigentube/models.hpp"

namespace eigentube {

// Arc query on the circle of radius lambda = sqrt(n): the window has
// arclength lambda^{1+a}, i.e. aperture angle lambda^a. Windows at least as
// long as the circumference count every point.
struct ArcQuery {
  long long n = 1;
  double aperture_exp = -0.5;
};

struct ArcCountResult {
  int count = 0;
  int total_points = 0;
  LatticePoint window_first{};  // witness arc endpoints (valid when count > 0)
  LatticePoint window_last{};
};

ArcCountResult max_arc_count(const ArcQuery& q);

struct ArcScanRow {
  long long n = 0;
  int r2 = 0;
  int count = 0;
  int running_max = 0;
};

// max_arc_count with a = -1/2 - delta for every sum-of-two-squares n <= N,
// with the running maximum sequence.
std::vector<ArcScanRow> cc_regime_scan(long long N, double delta);

// Exact L^4 norm of the L^2-normalized eigenfunction under the normalized
// measure dx/(2pi)^2, by convolving the coefficient vector with itself:
// |e|_4^4 = sum_s |c_s|^2, c_s = sum_{l+l'=s} b_l b_{l'}.
double zygmund_l4(const TorusEigenfunction& e);

// int_gamma |e|^2 ds by exact 1-D Parseval of the restricted trigonometric
// polynomial; when n_pts > 0 a periodic-trapezoid evaluation cross-checks
// the value (mismatch beyond 1e-8 relative is a hard error).
double torus_restriction(const TorusEigenfunction& e, const TorusLine& line,
                         int n_pts);

// Number of lattice points on the circle of radius sqrt(n).
int r2_count(long long n);

}  // namespace eigentube

#endif
