#ifndef EIGENTUBE_NORMS_HPP
#define EIGENTUBE_NORMS_HPP

#include <optional>

#include "eigentube/geometry.hpp"
#include "eigentube/models.hpp"

namespace eigentube {

// Result of the tube-norm sup search. kn_value follows
// KN = sqrt(lambda^{1/2-eps0} * sup tube mass); the unit-arc value slides a
// unit-length window along the argmax geodesic, giving the comparable
// quantity for unit-length geodesic segments.
struct KNResult {
  double lambda = 0.0;
  double eps0 = 0.0;
  double tube_radius = 0.0;
  double sup_tube_mass = 0.0;
  double coarse_tube_mass = 0.0;
  double kn_value = 0.0;
  double unit_arc_mass = 0.0;
  bool refinement_converged = false;
  Manifold manifold = Manifold::sphere;
  GreatCircle argmax_circle{Vec3{0, 0, 1}};
  TorusLine argmax_line;
  std::optional<double> quadrature_error;  // filled by grid-doubling callers
};

// (sum_i w_i |v_i|^p)^{1/p}; p = infinity gives the max norm.
double lp_norm(const SampledField& f, double p);

// Weighted L^p over an explicit mask (tube restriction norms).
double lp_norm_masked(const SampledField& f, std::span<const double> mask, double p);

// Integral of |e|^2 along a closed geodesic by the periodic trapezoid rule;
// sphere families are evaluated directly at curve points.
double restriction_norm(const SphereHarmonicSpec& spec, const GreatCircle& g,
                        int n_pts);
double restriction_norm(const TorusEigenfunction& e, const TorusLine& line,
                        int n_pts);

// Tube mass sum_(dist<=radius) w_i |v_i|^2 for an arbitrary geodesic.
double tube_mass(const SampledField& f, const GreatCircle& g, double radius);
double tube_mass(const SampledField& f, const TorusLine& line, double radius);

// Sup over the geodesic grid plus compass refinement of the tube mass in a
// width lambda^{-1/2+eps0} tube; fails "under-resolved" when the tube is
// thinner than 3 grid spacings.
KNResult kn_norm(const SampledField& f, double lambda, double eps0,
                 const GeodesicGrid& candidates, double refine_tol = 1e-3);

// Empirical constant of the L^4 / tube-mass inequality:
// |f|_4 / ( lambda^{1/8} |f|_2^{1/2} (sup tube mass)^{1/4} ).
double ratio_l4_tube(const SampledField& f, double lambda, double eps0,
                     const GeodesicGrid& candidates);

struct TubeRatioPair {
  double vs_tube_l2 = 0.0;   // |f|_4 / (lambda^{1/8}  sup_g |f|_{L2(T)}^{1/2})
  double vs_tube_l4 = 0.0;   // |f|_4 / (lambda^{1/16} sup_g |f|_{L4(T)}^{1/2})
  double sup_tube_l2 = 0.0;
  double sup_tube_l4 = 0.0;
};

// Both ratios at tube width lambda^{-1/2}; the sups run the same
// grid-plus-refinement search per objective.
TubeRatioPair ratio_l4_tube_halfwidth(const SampledField& f, double lambda,
                                      const GeodesicGrid& candidates);

}  // namespace eigentube

#endif
