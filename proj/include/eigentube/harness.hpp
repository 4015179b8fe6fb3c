#ifndef EIGENTUBE_HARNESS_HPP
#define EIGENTUBE_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "eigentube/lattice.hpp"
#include "eigentube/microlocal.hpp"
#include "eigentube/norms.hpp"
#include "eigentube/oscillatory.hpp"
#include "eigentube/report.hpp"

namespace eigentube {

struct SweepConfig {
  SphereFamily family = SphereFamily::zonal;
  int m = 0;  // single_lm
  std::vector<int> l_list;
  std::vector<double> eps0_list = {0.1};
  int grid_k = 512;          // geodesic candidates for the tube sup
  int restriction_k = 96;    // candidates for the restriction sup
  int oversample = 8;        // tube grid rows per degree
  std::uint64_t seed = 7;
  bool quadrature_check = true;  // grid-doubling error estimate per tube sup

  std::string canonical() const;
  std::string hash() const { return hex64(fnv1a64(canonical())); }
};

struct KNRow {
  double eps0 = 0.0;
  KNResult kn;
  double ratio_11pp = 0.0;
};

struct FamilySweepRow {
  int l = 0;
  double lambda = 0.0;
  double l2 = 0.0, l4 = 0.0, linf = 0.0;
  double restriction_sup = 0.0;
  std::vector<KNRow> kn_rows;
  TubeRatioPair halfwidth;
  int norm_grid_theta = 0, norm_grid_phi = 0;
  int tube_grid_theta = 0, tube_grid_phi = 0;
};

// (lambda, value) sweep with the fitted log-log slope and residuals.
struct ScalingReport {
  std::string quantity;
  std::string family;
  std::vector<std::pair<double, double>> points;
  double slope = 0.0, intercept = 0.0, max_residual = 0.0;
  std::string config_hash;
};

struct SweepResult {
  SweepConfig cfg;
  std::string config_hash;
  std::vector<FamilySweepRow> rows;
  std::vector<ScalingReport> reports;
  std::vector<std::string> failures;  // per-point errors, sweep continues
};

// Least squares of log(value) against log(lambda): >= 3 positive points.
SlopeFit fit_loglog(std::span<const double> lambda, std::span<const double> value);

SweepResult run_sweep(const SweepConfig& cfg);
Json sweep_to_json(const SweepResult& r);

// The three-exponent consistency table of the corollary, with the
// restriction/tube implication check. The o_- proxy declares an exponent
// "small" when the fitted slope sits at least `margin` below the reference.
struct CorollaryReport {
  std::string family;
  double exp_l4 = 0.0;          // |e|_4 on M, reference 1/8
  double exp_tube_l4 = 0.0;     // sup tube L4 at width lambda^{-1/2}, ref 1/8
  double exp_tube_l2 = 0.0;     // sup tube L2, reference 0
  double exp_restriction = 0.0; // restriction sup, reference 0
  bool small_l4 = false, small_tube_l4 = false, small_tube_l2 = false;
  bool consistent = false;
  bool premise_restriction = false;  // (1.6)-type O(lambda^eps)
  bool premise_tube_l2 = false;      // (1.7)-type O(lambda^{-1/4+eps})
  bool conclusion_l4 = false;        // (1.5)-type O(lambda^eps)
  bool implication_holds = false;
  std::string verdict;
  double tol = 0.05;
  double margin = 0.02;
};

CorollaryReport corollary_report(const SweepResult& r);
Json corollary_to_json(const CorollaryReport& c);

std::string family_name(SphereFamily f);

// --- CLI report builders ---------------------------------------------------

struct MicrolocalCheckConfig {
  double lambda = 64.0;
  int grid = 256;
  double eps0 = 0.1;
  std::uint64_t seed = 7;
  int fields = 5;  // random filtered fields for the MKN/KN domination table

  std::string canonical() const;
  std::string hash() const { return hex64(fnv1a64(canonical())); }
};
Json microlocal_check(const MicrolocalCheckConfig& cfg);

struct OscNormConfig {
  std::vector<double> lambdas = {50, 100, 200, 400};
  std::vector<double> thetas = {0.4, 0.2, 0.1, 0.05};
  double theta_fixed = 0.2;
  double lambda_fixed = 200.0;
  double eta = 0.0;  // 0: euclidean; > 0: radial perturbation amplitude
  double resolution = 2.2;

  std::string canonical() const;
  std::string hash() const { return hex64(fnv1a64(canonical())); }
};
Json osc_norm_report(const OscNormConfig& cfg);

// Deterministic circle choice for the toral L^4 study: `count` admissible n
// nearest to log-spaced targets in [32, nmax].
std::vector<long long> pick_circles(long long nmax, int count);

std::string torus_l4_csv(long long nmax, int circles, int trials,
                         std::uint64_t seed);
std::string lattice_arcs_csv(long long nmax, double aperture_exp);

}  // namespace eigentube

#endif
