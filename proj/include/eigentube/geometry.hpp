#ifndef EIGENTUBE_GEOMETRY_HPP
#define EIGENTUBE_GEOMETRY_HPP

#include <functional>
#include <memory>
#include <vector>

#include "eigentube/common.hpp"

namespace eigentube {

enum class Manifold { sphere, torus };

// A closed great circle on S^2, stored by its unit pole. Poles n and -n
// describe the same circle; canonical() picks the representative whose last
// nonzero coordinate is nonnegative.
struct GreatCircle {
  Vec3 pole;

  explicit GreatCircle(Vec3 n);
  GreatCircle canonical() const;
  // Orthonormal frame (u, v) spanning the circle: curve(t) = u cos t + v sin t.
  void frame(Vec3& u, Vec3& v) const;
};

// Closed geodesic on T^2 = [0,2pi)^2: primitive direction (p,q), offset along
// the normal (-q,p)/|(p,q)|. The line closes with length 2*pi*sqrt(p^2+q^2);
// offsets live in [0, 2*pi/sqrt(p^2+q^2)).
struct TorusLine {
  int p = 1, q = 0;
  double offset = 0.0;

  TorusLine() = default;
  TorusLine(int p_, int q_, double offset_);
  double length() const;
  double perp_period() const;  // 2*pi/sqrt(p^2+q^2)
  // Point at arclength t from the anchor, wrapped to [0,2pi)^2.
  std::array<double, 2> point(double t) const;
};

struct Tube {
  Manifold manifold;
  GreatCircle circle{Vec3{0, 0, 1}};
  TorusLine line;
  double radius;

  static Tube around(const GreatCircle& g, double radius);
  static Tube around(const TorusLine& l, double radius);
};

// Product quadrature grid. Sphere: Gauss-Legendre nodes in cos(theta) times
// uniform longitudes, node index i = itheta*nphi + jphi. Torus: uniform n x n
// on [0,2pi)^2, node index i = i1*n + i2, x = (2pi/n)*(i1,i2).
struct QuadratureGrid {
  Manifold manifold;
  std::vector<double> mu;   // cos(theta), ascending
  std::vector<double> wmu;  // Gauss-Legendre weights
  int nphi = 0;
  int n = 0;                // torus nodes per axis
  int exactness = 0;

  std::size_t size() const;
  double weight(std::size_t i) const;
  Vec3 sphere_node(std::size_t i) const;
  std::array<double, 2> torus_node(std::size_t i) const;
  double node_spacing() const;  // coarsest geodesic spacing between nodes
};

// Discretized space of geodesics used to seed the sup search.
struct GeodesicGrid {
  Manifold manifold;
  std::vector<GreatCircle> poles;
  std::vector<TorusLine> lines;
  double resolution = 0.0;
};

struct RefineResult {
  GreatCircle geodesic{Vec3{0, 0, 1}};
  TorusLine line;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Gauss-Legendre nodes (ascending) and weights on (-1,1).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Sphere grid exact for all spherical polynomials of degree <= 4*l_max
// (enough to integrate |Y_l^m|^4 for l <= l_max).
std::shared_ptr<const QuadratureGrid> sphere_grid(int l_max);
// Explicit resolution control (used for oversampled tube quadrature).
std::shared_ptr<const QuadratureGrid> sphere_grid_custom(int n_theta, int n_phi);
std::shared_ptr<const QuadratureGrid> torus_grid(int n_per_axis);

double dist_to_great_circle(const Vec3& p, const GreatCircle& g);
double dist_to_torus_line(const std::array<double, 2>& x, const TorusLine& l);

// Sharp indicator mask: w_i * 1[dist(node_i, geodesic) <= radius].
std::vector<double> tube_mask(const QuadratureGrid& grid, const Tube& t);

// K Fibonacci poles on the upper hemisphere; covering resolution
// h ~ sqrt(2*pi/K), verified by seeded random sampling at construction.
GeodesicGrid geodesic_grid_sphere(int K);
// Primitive directions with |p|,q bounded by qmax plus axis lines; offsets
// spaced at most `spacing` apart along each normal period.
GeodesicGrid geodesic_grid_torus(int qmax, double spacing);

// Derivative-free compass-search ascent in the 2-parameter pole chart.
// Terminates when the step drops below tol; hitting the iteration cap
// returns the best-so-far flagged unconverged.
RefineResult refine_sup(const std::function<double(const GreatCircle&)>& objective,
                        const GreatCircle& start, double tol,
                        double initial_step = 0.1, int max_rounds = 200);

// 1-D compass refinement of a torus line offset (direction stays fixed).
RefineResult refine_sup_torus(const std::function<double(const TorusLine&)>& objective,
                              const TorusLine& start, double tol,
                              double initial_step = 0.05, int max_rounds = 200);

}  // namespace eigentube

#endif
