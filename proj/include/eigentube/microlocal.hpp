#ifndef EIGENTUBE_MICROLOCAL_HPP
#define EIGENTUBE_MICROLOCAL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "eigentube/fft.hpp"
#include "eigentube/models.hpp"

namespace eigentube {

// Spectral reproducing cutoff: rho has rho_hat equal to the unit-mass
// triangle on (1,2) peaked at 3/2, so rho(0) = 1 and the operator
// f_hat(l) -> rho(lambda - |l|) f_hat(l) reproduces exact eigenfunctions.
struct SpectralCutoff {
  double lambda = 1.0;

  cplx rho(double s) const;
  // C_rho with |rho(s)| <= C_rho (1+|s|)^{-2}; the sup of (1+|s|)^2 |rho| is
  // 21.69, attained near s = 8.9; tests verify the bound.
  static constexpr double kDecayConstant = 22.0;
};

// beta(z) = B(z1) B(z2) with B a smooth step difference; sum_nu beta(z+nu)=1
// and supp beta inside {|z| <= 2}.
double partition_bump(double z1, double z2);

// Geodesic chart on the flat torus: s = intercept on the x2 = 0 axis,
// omega = xi_1/|xi|. Requires |xi_2| >= |xi|/2 (transversal directions).
std::array<double, 2> phi_map(const std::array<double, 2>& x,
                              const std::array<double, 2>& xi);

struct PhaseSpaceTile {
  double theta = 1.0;
  int nu1 = 0;
  int nu2 = 0;
};

struct TileValue {
  double theta = 0.0;
  int nu1 = 0, nu2 = 0;
  double value = 0.0;  // theta^{-1/2} |Q f|_2
};

struct MKNResult {
  double lambda = 0.0;
  double eps0 = 0.0;
  std::vector<TileValue> tile_values;
  double sup = 0.0;
  double l2_term = 0.0;
  double total = 0.0;
  TileValue argmax{};
};

struct TubeLeakResult {
  double leak_fraction = 0.0;     // output L2 mass outside T_{C theta}(gamma)
  double output_mass_ratio = 0.0; // output L2 mass / input L2 mass
};

struct SeparationBin {
  double separation = 0.0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  int count = 0;
};

struct OrthogonalityTable {
  std::vector<SeparationBin> bilinear;  // |int g_nu^2 conj(g_nu'^2)| by |nu-nu'|
  double quad_near = 0.0;
  double quad_far = 0.0;
  double far_over_near = 0.0;
  double far_separation = 0.0;
};

struct BilinearBound {
  double value = 0.0;
  bool converged = false;
  int alternations = 0;
};

// Phase-space decomposition on a fixed patch of the flat torus.
//
// Patch: x0 = (0, 3/2), delta = 1/20, so the d_g-in-(1,2) supports of the
// reproducing kernel stay wrap-free. Upsilon constant c = 1/4 keeps the
// spectral cutoff's frequency support inside the pass band for lambda >= 32.
// The chart covers the downward cone xi_2 <= -|xi|/2; a tile then localizes
// along a single geodesic line, which is what the tube statements need
// (the mirror cone is the conjugate family).
class TorusPhaseSpace {
 public:
  static constexpr double kPatchX1 = 0.0;
  static constexpr double kPatchX2 = 1.5;
  static constexpr double kDelta = 0.05;
  static constexpr double kUpsilonC = 0.25;

  TorusPhaseSpace(std::shared_ptr<const QuadratureGrid> grid, double lambda,
                  double eps0);

  double lambda() const { return lambda_; }
  double eps0() const { return eps0_; }
  double theta0() const { return theta0_; }
  const std::vector<double>& theta_levels() const { return levels_; }
  std::shared_ptr<const QuadratureGrid> grid() const { return grid_; }

  static double alpha_cut(double x1, double x2);
  static double upsilon(double s);

  // Full symbol q(x,l) = alpha beta(theta^{-1} phi + nu) Upsilon(|l|/lambda);
  // zero off the chart cone.
  double symbol(const PhaseSpaceTile& t, double x1, double x2, double l1,
                double l2) const;

  // Fourier multiplier rho(lambda - |l|).
  SampledField apply_chi(const SampledField& f) const;

  // Kohn-Nirenberg action of one tile; output is alpha-patch supported.
  SampledField apply_tile(const PhaseSpaceTile& t, const SampledField& f) const;
  // chi_lambda Q^nu_theta f.
  SampledField apply_chi_tile(const PhaseSpaceTile& t, const SampledField& f) const;

  // Sup over dyadic theta in {theta0, 2 theta0, ..., 1} and over tiles of
  // theta^{-1/2}|Q f|_2, plus the |f|_2 term. Requires f to carry at most
  // 1e-6 of its mass outside the alpha patch.
  MKNResult mkn_norm(const SampledField& f) const;

  // |Q^nu_theta|_{L2->L2} by power iteration (5 restarts, 1e-4 rel tol).
  double tile_operator_norm(const PhaseSpaceTile& t, std::uint64_t seed = 1,
                            int restarts = 5, double tol = 1e-4) const;
  // |sum_nu (Q^nu)* Q^nu|_{L2->L2} at one theta level.
  double square_function_norm(double theta, std::uint64_t seed = 1,
                              int restarts = 3, double tol = 1e-4) const;

  // chi Q applied to a grid point mass sitting on the tile's line (offset
  // y_perp_offset off it); returns the mass fraction escaping the
  // C_tube*theta tube around the line and the total transmitted mass.
  TubeLeakResult kernel_tube_leak(const PhaseSpaceTile& t, double c_tube,
                                  double y_perp_offset = 0.0) const;

  // Decay tables for the bilinear-square and quadrilinear tile couplings.
  OrthogonalityTable orthogonality_quad(const SampledField& f,
                                        int max_tiles = 24) const;

  // Lower bound on the bilinear operator norm by alternating maximization
  // of |(chi Q^mu f1)(chi Q^mu' f2)|_2 over separable unit inputs.
  BilinearBound bilinear_lower_bound(const PhaseSpaceTile& mu,
                                     const PhaseSpaceTile& mu_prime,
                                     std::uint64_t seed = 1,
                                     int max_alternations = 50) const;

  // Tile at level theta whose strip runs through the patch center with
  // angular index nu2.
  PhaseSpaceTile tile_through_patch(double theta, int nu2) const;

  // alpha * chi(white noise), L2-normalized: the standard test field.
  SampledField random_patch_field(std::uint64_t seed) const;

  // Line {x1 - slope*x2 = s} carrying the tile: returns (slope, s).
  std::array<double, 2> tile_line(const PhaseSpaceTile& t) const;

 private:
  struct Freq {
    int bin;
    double l1, l2;
    double norm;
    double omega;
    double slope;  // l1/l2
    double ups;
  };
  struct PatchNode {
    std::size_t idx;
    double x1, x2;
    double alpha;
    double w;
  };

  std::vector<cplx> forward_hat(const std::vector<cplx>& values) const;
  void synth_inplace(std::vector<cplx>& hat) const;
  void chi_multiply(std::vector<cplx>& hat) const;
  double weighted_l2(const std::vector<cplx>& values) const;

  // (Q f) restricted to patch nodes, from pruned f_hat.
  std::vector<cplx> tile_apply_patch(const PhaseSpaceTile& t,
                                     const std::vector<cplx>& hat) const;
  // Adjoint: patch-supported g -> h_hat over all bins.
  std::vector<cplx> tile_adjoint_hat(const PhaseSpaceTile& t,
                                     const std::vector<cplx>& g_patch) const;
  std::vector<cplx> chi_tile_field(const PhaseSpaceTile& t,
                                   const std::vector<cplx>& hat) const;

  std::shared_ptr<const QuadratureGrid> grid_;
  int n_ = 0;
  double lambda_ = 0.0, eps0_ = 0.0, theta0_ = 0.0;
  std::vector<double> levels_;
  std::unique_ptr<Dft2D> dft_;
  std::vector<Freq> freqs_;       // admissible chart frequencies
  std::vector<PatchNode> patch_;
  double node_weight_ = 0.0;
};

}  // namespace eigentube

#endif
